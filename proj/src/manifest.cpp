#include "poissonkit/manifest.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace poissonkit {

namespace {

using nlohmann::json;

[[noreturn]] void manifest_error(const std::string& msg) {
    throw std::runtime_error("manifest error: " + msg);
}

std::string fnv1a64(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << h;
    return os.str();
}

mpq_class rational_from_json(const json& v, const std::string& what) {
    try {
        if (v.is_string()) {
            mpq_class q(v.get<std::string>());
            q.canonicalize();
            return q;
        }
        if (v.is_number_integer()) return mpq_class(v.get<long>());
    } catch (const std::exception&) {
        manifest_error(what + ": cannot parse exact rational from '" + v.dump() + "'");
    }
    manifest_error(what + ": expected an integer or a rational string, got " + v.dump());
}

Point point_from_json(const json& v, int dim, const std::string& what) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim) {
        manifest_error(what + ": expected " + std::to_string(dim) + " coordinates");
    }
    std::vector<mpq_class> coords;
    for (const auto& c : v) coords.push_back(rational_from_json(c, what));
    return Point(std::move(coords));
}

Indices indices_from_key(const std::string& key, int dim, const std::string& what) {
    Indices idx;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            idx.push_back(std::stoi(part));
        } catch (const std::exception&) {
            manifest_error(what + ": bad index key '" + key + "'");
        }
    }
    for (size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= dim) manifest_error(what + ": index out of range in '" + key + "'");
        if (i > 0 && idx[i] <= idx[i - 1]) {
            manifest_error(what + ": indices must be strictly increasing in '" + key + "'");
        }
    }
    return idx;
}

Expr expr_from_json(const json& v, const ChartPtr& chart, const std::string& what) {
    if (!v.is_string()) manifest_error(what + ": expected an expression string, got " + v.dump());
    try {
        return Expr::parse(v.get<std::string>(), chart);
    } catch (const ParseError& e) {
        manifest_error(what + ": " + e.what());
    }
}

KVector field_from_json(const json& v, const ChartPtr& chart, const std::string& what) {
    if (!v.is_array() || static_cast<int>(v.size()) != chart->dim()) {
        manifest_error(what + ": expected one component per coordinate");
    }
    KVector x(chart, 1);
    for (int i = 0; i < chart->dim(); ++i) {
        Expr c = expr_from_json(v[static_cast<size_t>(i)], chart, what);
        if (!c.is_zero()) x.add_term({i}, c);
    }
    return x;
}

}  // namespace

Manifest Manifest::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) manifest_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_string(buf.str());
}

Manifest Manifest::load_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        manifest_error(std::string("invalid JSON: ") + e.what());
    }
    Manifest m;
    m.digest = fnv1a64(text);

    if (!j.contains("dim") || !j["dim"].is_number_integer()) manifest_error("missing integer 'dim'");
    const int dim = j["dim"].get<int>();
    if (!j.contains("variables") || !j["variables"].is_array() ||
        static_cast<int>(j["variables"].size()) != dim) {
        manifest_error("'variables' must list exactly dim names");
    }
    std::vector<std::string> vars;
    for (const auto& v : j["variables"]) vars.push_back(v.get<std::string>());
    try {
        m.chart = make_chart(vars);
    } catch (const std::exception& e) {
        manifest_error(e.what());
    }

    KVector p(m.chart, 2);
    if (!j.contains("bivector") || !j["bivector"].is_object()) {
        manifest_error("missing 'bivector' table");
    }
    for (const auto& [key, val] : j["bivector"].items()) {
        Indices idx = indices_from_key(key, dim, "bivector");
        if (idx.size() != 2) manifest_error("bivector keys must be strictly upper pairs 'i,j'");
        Expr c = expr_from_json(val, m.chart, "bivector[" + key + "]");
        if (!c.is_zero()) p.add_term(idx, c);
    }
    m.structure = PoissonStructure(m.chart, std::move(p));

    if (j.contains("bounds")) {
        const auto& b = j["bounds"];
        if (b.contains("degree_bound")) m.degree_bound = b["degree_bound"].get<int>();
        if (b.contains("tolerance")) m.tolerance = b["tolerance"].get<double>();
        if (b.contains("quadrature_order")) m.quadrature_order = b["quadrature_order"].get<int>();
    }

    if (j.contains("volume_forms")) {
        for (const auto& [name, val] : j["volume_forms"].items()) {
            Expr c = expr_from_json(val, m.chart, "volume_forms." + name);
            if (c.is_zero()) manifest_error("volume_forms." + name + ": coefficient is zero");
            m.volume_forms.emplace(name, VolumeForm(m.chart, c));
        }
    }

    if (j.contains("leaves")) {
        for (const auto& [name, val] : j["leaves"].items()) {
            const std::string what = "leaves." + name;
            if (!val.contains("type")) manifest_error(what + ": missing 'type'");
            const std::string type = val["type"].get<std::string>();
            try {
                if (type == "point") {
                    Point x0 = point_from_json(val.at("coordinates"), dim, what);
                    m.leaves.emplace(name,
                                     std::make_shared<const Leaf>(Leaf::point(m.structure, x0)));
                } else if (type == "parameterized") {
                    if (!val.contains("parameters") || !val["parameters"].is_array()) {
                        manifest_error(what + ": missing 'parameters'");
                    }
                    std::vector<std::string> pnames;
                    for (const auto& s : val["parameters"]) pnames.push_back(s.get<std::string>());
                    ChartPtr pchart = make_chart(pnames);
                    std::vector<LeafChart> charts;
                    for (const auto& cj : val.at("charts")) {
                        LeafChart lc;
                        lc.params = pchart;
                        for (const auto& seg : cj.at("box")) {
                            lc.box.emplace_back(seg.at(0).get<double>(), seg.at(1).get<double>());
                        }
                        for (const auto& comp : cj.at("map")) {
                            lc.map.push_back(expr_from_json(comp, pchart, what + ".map"));
                        }
                        charts.push_back(std::move(lc));
                    }
                    std::vector<Expr> casimirs;
                    if (val.contains("casimirs")) {
                        for (const auto& c : val["casimirs"]) {
                            casimirs.push_back(expr_from_json(c, m.chart, what + ".casimirs"));
                        }
                    }
                    int order = val.contains("quadrature_order")
                                    ? val["quadrature_order"].get<int>()
                                    : m.quadrature_order;
                    m.leaves.emplace(
                        name, std::make_shared<const Leaf>(Leaf::parameterized(
                                  m.structure, std::move(charts), std::move(casimirs), order,
                                  m.tolerance)));
                } else {
                    manifest_error(what + ": unknown leaf type '" + type + "'");
                }
            } catch (const std::runtime_error&) {
                throw;
            } catch (const std::exception& e) {
                manifest_error(what + ": " + e.what());
            }
        }
    }

    if (j.contains("distributions")) {
        for (const auto& [name, val] : j["distributions"].items()) {
            const std::string what = "distributions." + name;
            if (!val.contains("type")) manifest_error(what + ": missing 'type'");
            const std::string type = val["type"].get<std::string>();
            DistributionDecl decl;
            try {
                if (type == "dirac") {
                    decl.value = Distribution::dirac(point_from_json(val.at("point"), dim, what));
                } else if (type == "dirac_derivative") {
                    Point x0 = point_from_json(val.at("point"), dim, what);
                    std::vector<mpq_class> dir;
                    for (const auto& c : val.at("direction")) {
                        dir.push_back(rational_from_json(c, what + ".direction"));
                    }
                    if (static_cast<int>(dir.size()) != dim) {
                        manifest_error(what + ": direction must have dim components");
                    }
                    decl.value = Distribution::dirac_derivative(std::move(x0), std::move(dir));
                } else if (type == "leaf_delta" || type == "transversal_delta") {
                    decl.leaf_name = val.at("leaf").get<std::string>();
                    auto it = m.leaves.find(decl.leaf_name);
                    if (it == m.leaves.end()) {
                        manifest_error(what + ": unknown leaf '" + decl.leaf_name + "'");
                    }
                    if (type == "leaf_delta") {
                        decl.value = Distribution::leaf_delta(it->second);
                    } else {
                        const int grade = dim - it->second->leaf_dim();
                        KVector u(m.chart, grade);
                        for (const auto& [key, comp] : val.at("components").items()) {
                            Indices idx = indices_from_key(key, dim, what + ".components");
                            if (static_cast<int>(idx.size()) != grade) {
                                manifest_error(what + ": component grade must be " +
                                               std::to_string(grade));
                            }
                            u.add_term(idx, expr_from_json(comp, m.chart, what + ".components"));
                        }
                        decl.value = Distribution::transversal_delta(it->second, std::move(u));
                    }
                } else {
                    manifest_error(what + ": unknown distribution type '" + type + "'");
                }
            } catch (const std::runtime_error&) {
                throw;
            } catch (const std::exception& e) {
                manifest_error(what + ": " + e.what());
            }
            m.distributions.emplace(name, std::move(decl));
        }
    }

    if (j.contains("vector_fields")) {
        for (const auto& [name, val] : j["vector_fields"].items()) {
            m.vector_fields.emplace(name,
                                    field_from_json(val, m.chart, "vector_fields." + name));
        }
    }
    if (j.contains("annihilator_checks")) {
        for (const auto& entry : j["annihilator_checks"]) {
            std::string leaf = entry.at(0).get<std::string>();
            std::string field = entry.at(1).get<std::string>();
            if (!m.leaves.count(leaf)) manifest_error("annihilator_checks: unknown leaf " + leaf);
            if (!m.vector_fields.count(field)) {
                manifest_error("annihilator_checks: unknown field " + field);
            }
            m.annihilator_checks.emplace_back(std::move(leaf), std::move(field));
        }
    }
    if (j.contains("separating_functions")) {
        for (const auto& s : j["separating_functions"]) {
            m.separating_functions.push_back(expr_from_json(s, m.chart, "separating_functions"));
        }
    }
    return m;
}

}  // namespace poissonkit
