#include "poissonkit/multivector.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace poissonkit {

namespace detail {

bool merge_indices(const Indices& a, const Indices& b, Indices& out, int& sign) {
    std::vector<int> idx;
    idx.reserve(a.size() + b.size());
    idx.insert(idx.end(), a.begin(), a.end());
    idx.insert(idx.end(), b.begin(), b.end());
    return sort_indices(std::move(idx), out, sign);
}

bool sort_indices(std::vector<int> idx, Indices& out, int& sign) {
    sign = 1;
    // insertion sort, counting transpositions
    for (size_t i = 1; i < idx.size(); ++i) {
        int v = idx[i];
        size_t j = i;
        while (j > 0 && idx[j - 1] > v) {
            idx[j] = idx[j - 1];
            --j;
            sign = -sign;
        }
        idx[j] = v;
    }
    for (size_t i = 1; i < idx.size(); ++i) {
        if (idx[i] == idx[i - 1]) return false;
    }
    out = std::move(idx);
    return true;
}

}  // namespace detail

template <typename Tag>
Alternating<Tag> Alternating<Tag>::scalar(const ChartPtr& chart, Expr value) {
    Alternating r(chart, 0);
    if (!value.is_zero()) r.coeffs_.emplace(Indices{}, std::move(value));
    return r;
}

template <typename Tag>
Alternating<Tag> Alternating<Tag>::basis(const ChartPtr& chart, const Indices& idx) {
    for (size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= chart->dim()) throw std::out_of_range("basis index");
        if (i > 0 && idx[i] <= idx[i - 1]) throw std::invalid_argument("indices must increase");
    }
    Alternating r(chart, static_cast<int>(idx.size()));
    r.coeffs_.emplace(idx, Expr::one(chart));
    return r;
}

template <typename Tag>
Expr Alternating<Tag>::coeff(const Indices& idx) const {
    auto it = coeffs_.find(idx);
    return it == coeffs_.end() ? Expr::zero(chart_) : it->second;
}

template <typename Tag>
void Alternating<Tag>::add_term(const Indices& idx, const Expr& c) {
    if (c.is_zero()) return;
    Indices sorted;
    int sign = 0;
    if (!detail::sort_indices(idx, sorted, sign)) return;
    if (static_cast<int>(sorted.size()) != grade_) throw std::invalid_argument("grade mismatch in add_term");
    for (int i : sorted) {
        if (i < 0 || i >= dim()) throw std::out_of_range("index out of chart range");
    }
    Expr v = sign > 0 ? c : -c;
    auto [it, inserted] = coeffs_.emplace(std::move(sorted), v);
    if (!inserted) {
        it->second = it->second + v;
        if (it->second.is_zero()) coeffs_.erase(it);
    }
}

template <typename Tag>
Alternating<Tag> Alternating<Tag>::operator+(const Alternating& o) const {
    require_same_chart(chart_, o.chart_);
    if (!is_zero() && !o.is_zero() && grade_ != o.grade_) {
        throw std::invalid_argument("grade mismatch in addition");
    }
    Alternating r = *this;
    if (is_zero() && !o.is_zero()) r.grade_ = o.grade_;
    for (const auto& [idx, c] : o.coeffs_) r.add_term(idx, c);
    return r;
}

template <typename Tag>
Alternating<Tag> Alternating<Tag>::operator-(const Alternating& o) const {
    return *this + (-o);
}

template <typename Tag>
Alternating<Tag> Alternating<Tag>::operator-() const {
    Alternating r(chart_, grade_);
    for (const auto& [idx, c] : coeffs_) r.coeffs_.emplace(idx, -c);
    return r;
}

template <typename Tag>
Alternating<Tag> Alternating<Tag>::scaled(const Expr& c) const {
    Alternating r(chart_, grade_);
    if (c.is_zero()) return r;
    for (const auto& [idx, v] : coeffs_) {
        Expr w = v * c;
        if (!w.is_zero()) r.coeffs_.emplace(idx, std::move(w));
    }
    return r;
}

template <typename Tag>
bool Alternating<Tag>::operator==(const Alternating& o) const {
    require_same_chart(chart_, o.chart_);
    if (is_zero() && o.is_zero()) return true;
    return grade_ == o.grade_ && coeffs_ == o.coeffs_;
}

template <typename Tag>
std::map<Indices, mpq_class> Alternating<Tag>::eval(const Point& p) const {
    std::map<Indices, mpq_class> out;
    for (const auto& [idx, c] : coeffs_) {
        mpq_class v = c.eval(p);
        if (v != 0) out.emplace(idx, std::move(v));
    }
    return out;
}

template <typename Tag>
std::map<Indices, double> Alternating<Tag>::eval_double(const std::vector<double>& p) const {
    std::map<Indices, double> out;
    for (const auto& [idx, c] : coeffs_) out.emplace(idx, c.eval_double(p));
    return out;
}

template <typename Tag>
std::string Alternating<Tag>::to_string() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [idx, c] : coeffs_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.to_string() << ")";
        for (size_t i = 0; i < idx.size(); ++i) {
            os << (i == 0 ? "*" : "^") << Tag::prefix << chart_->var(idx[i]);
        }
    }
    return os.str();
}

template class Alternating<detail::VectorTag>;
template class Alternating<detail::FormTag>;

template <typename Tag>
Alternating<Tag> wedge(const Alternating<Tag>& a, const Alternating<Tag>& b) {
    require_same_chart(a.chart(), b.chart());
    Alternating<Tag> r(a.chart(), a.grade() + b.grade());
    Indices merged;
    int sign;
    for (const auto& [ia, ca] : a.coeffs()) {
        for (const auto& [ib, cb] : b.coeffs()) {
            if (!detail::merge_indices(ia, ib, merged, sign)) continue;
            Expr c = ca * cb;
            r.add_term(merged, sign > 0 ? c : -c);
        }
    }
    return r;
}

template KVector wedge(const KVector&, const KVector&);
template KForm wedge(const KForm&, const KForm&);

KForm exterior_derivative(const KForm& w) {
    KForm r(w.chart(), w.grade() + 1);
    const int n = w.dim();
    for (const auto& [idx, c] : w.coeffs()) {
        for (int v = 0; v < n; ++v) {
            Expr dc = c.diff(v);
            if (dc.is_zero()) continue;
            Indices ext;
            ext.reserve(idx.size() + 1);
            ext.push_back(v);
            ext.insert(ext.end(), idx.begin(), idx.end());
            r.add_term(ext, dc);
        }
    }
    return r;
}

namespace {

// Interior product of a single coordinate field on a basis form index.
// Returns the position sign, or 0 if the index is absent.
int strike_index(const Indices& idx, int a, Indices& out) {
    auto it = std::find(idx.begin(), idx.end(), a);
    if (it == idx.end()) return 0;
    int pos = static_cast<int>(it - idx.begin());
    out.clear();
    out.insert(out.end(), idx.begin(), it);
    out.insert(out.end(), it + 1, idx.end());
    return (pos % 2 == 0) ? 1 : -1;
}

}  // namespace

KForm contract_or_zero(const KVector& u, const KForm& w) {
    require_same_chart(u.chart(), w.chart());
    if (u.grade() > w.grade()) return KForm::zero(w.chart(), 0);
    KForm r(w.chart(), w.grade() - u.grade());
    for (const auto& [iu, cu] : u.coeffs()) {
        for (const auto& [iw, cw] : w.coeffs()) {
            // iterated interior product, first factor innermost
            Indices cur = iw;
            Indices next;
            int sign = 1;
            bool alive = true;
            for (int a : iu) {
                int s = strike_index(cur, a, next);
                if (s == 0) {
                    alive = false;
                    break;
                }
                sign *= s;
                cur = next;
            }
            if (!alive) continue;
            Expr c = cu * cw;
            r.add_term(cur, sign > 0 ? c : -c);
        }
    }
    return r;
}

KForm contract(const KVector& u, const KForm& w) {
    if (u.grade() > w.grade()) {
        throw std::invalid_argument("contract: multivector grade exceeds form grade");
    }
    return contract_or_zero(u, w);
}

KForm lie_derivative(const KVector& x, const KForm& w) {
    require_same_chart(x.chart(), w.chart());
    KForm a = contract_or_zero(x, exterior_derivative(w));
    KForm b = exterior_derivative(contract_or_zero(x, w));
    return (x.grade() % 2 == 0) ? a - b : a + b;
}

namespace {

struct Factor {
    Expr coeff;  // scalar coefficient; the basis factors after the first carry 1
    int index;
};

// Lie bracket of two coefficient-scaled coordinate fields:
// [c (d/dx_a), e (d/dx_b)] = c (d_a e) d/dx_b - e (d_b c) d/dx_a.
void factor_bracket(const Factor& f, const Factor& g, std::vector<Factor>& out) {
    out.clear();
    Expr t1 = f.coeff * g.coeff.diff(f.index);
    if (!t1.is_zero()) out.push_back({std::move(t1), g.index});
    Expr t2 = g.coeff * f.coeff.diff(g.index);
    if (!t2.is_zero()) out.push_back({-t2, f.index});
}

void accumulate_wedge_term(KVector& acc, const Expr& lead_coeff, int lead_index,
                           const std::vector<Factor>& factors, size_t skip_f, size_t skip_g,
                           size_t split, int outer_sign) {
    Expr c = lead_coeff;
    std::vector<int> idx;
    idx.reserve(factors.size());
    idx.push_back(lead_index);
    for (size_t t = 0; t < factors.size(); ++t) {
        bool in_f = t < split;
        size_t local = in_f ? t : t - split;
        if ((in_f && local == skip_f) || (!in_f && local == skip_g)) continue;
        idx.push_back(factors[t].index);
        if (!factors[t].coeff.is_one()) c = c * factors[t].coeff;
        if (c.is_zero()) return;
    }
    acc.add_term(idx, outer_sign > 0 ? c : -c);
}

// Schouten bracket of a multivector with a function, for one basis term:
// [c dx_I, f] = sum_i (-1)^{i+1} X_i(f) X_1 ^ ... ^ hat X_i ^ ... ^ X_m.
void schouten_with_function(KVector& acc, const std::vector<Factor>& factors, const Expr& f) {
    for (size_t i = 0; i < factors.size(); ++i) {
        Expr xif = factors[i].coeff * f.diff(factors[i].index);
        if (xif.is_zero()) continue;
        Expr c = xif;
        std::vector<int> idx;
        for (size_t t = 0; t < factors.size(); ++t) {
            if (t == i) continue;
            idx.push_back(factors[t].index);
            if (!factors[t].coeff.is_one()) c = c * factors[t].coeff;
        }
        if (c.is_zero()) continue;
        int sign = (i % 2 == 0) ? 1 : -1;  // (-1)^{i+1} with 1-based i
        acc.add_term(idx, sign > 0 ? c : -c);
    }
}

std::vector<Factor> term_factors(const Indices& idx, const Expr& coeff, const ChartPtr& chart) {
    std::vector<Factor> fs;
    fs.reserve(idx.size());
    for (size_t t = 0; t < idx.size(); ++t) {
        fs.push_back({t == 0 ? coeff : Expr::one(chart), idx[t]});
    }
    return fs;
}

}  // namespace

KVector schouten(const KVector& u, const KVector& v) {
    require_same_chart(u.chart(), v.chart());
    const ChartPtr& chart = u.chart();
    const int p = u.grade(), q = v.grade();
    if (p == 0 && q == 0) return KVector::zero(chart, 0);
    KVector acc(chart, p + q - 1);

    if (q == 0) {
        Expr f = v.coeff({});
        for (const auto& [idx, c] : u.coeffs()) {
            schouten_with_function(acc, term_factors(idx, c, chart), f);
        }
        return acc;
    }
    if (p == 0) {
        // paper symmetry: [f, V] = (-1)^{0 * |V|} [V, f]
        Expr f = u.coeff({});
        for (const auto& [idx, c] : v.coeffs()) {
            schouten_with_function(acc, term_factors(idx, c, chart), f);
        }
        return acc;
    }

    std::vector<Factor> bracket;
    for (const auto& [iu, cu] : u.coeffs()) {
        for (const auto& [iv, cv] : v.coeffs()) {
            std::vector<Factor> factors = term_factors(iu, cu, chart);
            const size_t split = factors.size();
            {
                std::vector<Factor> gf = term_factors(iv, cv, chart);
                factors.insert(factors.end(), gf.begin(), gf.end());
            }
            int prefactor = (p % 2 == 0) ? -1 : 1;  // (-1)^{m+1}
            for (size_t i = 0; i < static_cast<size_t>(p); ++i) {
                for (size_t j = 0; j < static_cast<size_t>(q); ++j) {
                    factor_bracket(factors[i], factors[split + j], bracket);
                    if (bracket.empty()) continue;
                    int sij = ((i + j) % 2 == 0) ? 1 : -1;  // (-1)^{i+j} with 1-based i, j
                    for (const Factor& lead : bracket) {
                        accumulate_wedge_term(acc, lead.coeff, lead.index, factors, i, j, split,
                                              prefactor * sij);
                    }
                }
            }
        }
    }
    return acc;
}

VolumeForm::VolumeForm(KForm w) : form_(std::move(w)) {
    if (form_.grade() != form_.dim()) throw std::invalid_argument("volume form must have top grade");
    if (form_.is_zero()) throw std::invalid_argument("volume form coefficient is zero");
}

VolumeForm::VolumeForm(const ChartPtr& chart, const Expr& coefficient)
    : form_(KForm::zero(chart, chart->dim())) {
    Indices full(static_cast<size_t>(chart->dim()));
    for (int i = 0; i < chart->dim(); ++i) full[static_cast<size_t>(i)] = i;
    form_.add_term(full, coefficient);
    if (form_.is_zero()) throw std::invalid_argument("volume form coefficient is zero");
}

Expr VolumeForm::coefficient() const {
    Indices full(static_cast<size_t>(chart()->dim()));
    for (int i = 0; i < chart()->dim(); ++i) full[static_cast<size_t>(i)] = i;
    return form_.coeff(full);
}

}  // namespace poissonkit
