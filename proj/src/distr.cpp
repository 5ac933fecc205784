#include "poissonkit/distr.hpp"

#include <algorithm>
#include <cmath>

namespace poissonkit {

namespace {

Indices full_indices(int n) {
    Indices idx(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    return idx;
}

// Value of a 2k-form on the chart frame at a node (sum of minors).
double form_on_frame(const KForm& w, const Leaf::NodeData& nd) {
    const int m = static_cast<int>(nd.jacobian.cols());
    if (w.is_zero()) return 0.0;
    if (w.grade() != m) throw std::logic_error("form grade does not match frame size");
    double acc = 0.0;
    for (const auto& [idx, c] : w.coeffs()) {
        Eigen::MatrixXd sub(m, m);
        for (int r = 0; r < m; ++r) {
            for (int s = 0; s < m; ++s) sub(r, s) = nd.jacobian(idx[static_cast<size_t>(r)], s);
        }
        acc += c.eval_double(nd.x) * sub.determinant();
    }
    return acc;
}

}  // namespace

bool Primitive::pairs_with_functions() const {
    return !std::holds_alternative<TransversalDeltaPrimitive>(data);
}

bool Primitive::is_exact() const {
    if (std::holds_alternative<LeafDeltaPrimitive>(data)) {
        return std::get<LeafDeltaPrimitive>(data).leaf->is_point();
    }
    if (std::holds_alternative<TransversalDeltaPrimitive>(data)) {
        return std::get<TransversalDeltaPrimitive>(data).leaf->is_point();
    }
    return true;
}

TestObject TestObject::top_form(KForm a) {
    if (!a.is_zero() && a.grade() != a.dim()) {
        throw std::invalid_argument("test form must have top degree");
    }
    return {std::move(a)};
}

Distribution Distribution::dirac(Point x0) {
    return from_terms({{mpq_class(1), Primitive{DiracPrimitive{std::move(x0)}, {}}}});
}

Distribution Distribution::dirac_derivative(Point x0, std::vector<mpq_class> direction) {
    return from_terms(
        {{mpq_class(1), Primitive{DiracDerivativePrimitive{std::move(x0), std::move(direction)}, {}}}});
}

Distribution Distribution::leaf_delta(LeafPtr leaf) {
    return from_terms({{mpq_class(1), Primitive{LeafDeltaPrimitive{std::move(leaf)}, {}}}});
}

Distribution Distribution::transversal_delta(LeafPtr leaf, KVector u_ext) {
    const int expected = leaf->ambient_dim() - leaf->leaf_dim();
    if (!u_ext.is_zero() && u_ext.grade() != expected) {
        throw std::invalid_argument("transversal multivector grade must be dim - leaf dim");
    }
    return from_terms(
        {{mpq_class(1), Primitive{TransversalDeltaPrimitive{std::move(leaf), std::move(u_ext)}, {}}}});
}

Distribution Distribution::from_terms(std::vector<std::pair<mpq_class, Primitive>> terms) {
    Distribution d;
    for (auto& [w, p] : terms) {
        if (w != 0) d.terms_.push_back({std::move(w), std::move(p)});
    }
    return d;
}

Distribution Distribution::operator+(const Distribution& o) const {
    Distribution d = *this;
    d.terms_.insert(d.terms_.end(), o.terms_.begin(), o.terms_.end());
    return d;
}

Distribution Distribution::scaled(const mpq_class& c) const {
    Distribution d;
    if (c == 0) return d;
    d.terms_ = terms_;
    for (auto& [w, p] : d.terms_) w *= c;
    return d;
}

Realization Distribution::realization() const {
    if (terms_.empty()) return Realization::Function;
    bool fn = terms_.front().second.pairs_with_functions();
    for (const auto& [w, p] : terms_) {
        if (p.pairs_with_functions() != fn) {
            throw std::logic_error("distribution mixes both realizations");
        }
    }
    return fn ? Realization::Function : Realization::TopForm;
}

bool Distribution::is_exact() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const auto& t) { return t.second.is_exact(); });
}

namespace {

mpq_class directional_derivative(const Expr& f, const Point& x0,
                                 const std::vector<mpq_class>& v) {
    mpq_class acc = 0;
    for (int j = 0; j < f.chart()->dim(); ++j) {
        const mpq_class& vj = v[static_cast<size_t>(j)];
        if (vj == 0) continue;
        acc += f.diff(j).eval(x0) * vj;
    }
    return acc;
}

// Folds the deferred actions into the test object through the adjoints.
TestObject adjoint_fold(const std::vector<Action>& deferred, TestObject t) {
    for (auto it = deferred.rbegin(); it != deferred.rend(); ++it) {
        if (std::holds_alternative<Expr>(t.value)) {
            Expr g = std::get<Expr>(t.value);
            if (const auto* mul = std::get_if<MultiplyAction>(&*it)) {
                t.value = mul->f * g;
            } else {
                const auto& x = std::get<DeriveAction>(*it).x;
                KForm dg = exterior_derivative(KForm::scalar(g.chart(), g));
                t.value = -contract_or_zero(x, dg).coeff({});
            }
        } else {
            KForm a = std::get<KForm>(t.value);
            if (const auto* mul = std::get_if<MultiplyAction>(&*it)) {
                t.value = a.scaled(mul->f);
            } else {
                t.value = -lie_derivative(std::get<DeriveAction>(*it).x, a);
            }
        }
    }
    return t;
}

PairingValue pair_primitive(const Primitive& prim, const TestObject& raw) {
    TestObject t = adjoint_fold(prim.deferred, raw);
    PairingValue out;
    if (const auto* d = std::get_if<DiracPrimitive>(&prim.data)) {
        out.exact = true;
        out.q = std::get<Expr>(t.value).eval(d->x0);
        return out;
    }
    if (const auto* dd = std::get_if<DiracDerivativePrimitive>(&prim.data)) {
        out.exact = true;
        out.q = -directional_derivative(std::get<Expr>(t.value), dd->x0, dd->direction);
        return out;
    }
    if (const auto* ld = std::get_if<LeafDeltaPrimitive>(&prim.data)) {
        const Expr& f = std::get<Expr>(t.value);
        if (ld->leaf->is_point()) {
            out.exact = true;
            out.q = f.eval(ld->leaf->point_coords());
            return out;
        }
        out.exact = false;
        out.d = ld->leaf->integrate(f);
        return out;
    }
    const auto& td = std::get<TransversalDeltaPrimitive>(prim.data);
    const KForm& alpha = std::get<KForm>(t.value);
    KForm iua = contract_or_zero(td.u_ext, alpha);
    if (td.leaf->is_point()) {
        out.exact = true;
        out.q = iua.is_zero() ? mpq_class(0) : iua.coeff({}).eval(td.leaf->point_coords());
        return out;
    }
    out.exact = false;
    double acc = 0.0;
    const Leaf& leaf = *td.leaf;
    for (size_t ci = 0; ci < leaf.nodes().size(); ++ci) {
        double chart_acc = 0.0;
        for (const auto& nd : leaf.nodes()[ci]) {
            chart_acc += nd.weight * form_on_frame(iua, nd);
        }
        acc += leaf.orientations()[ci] * chart_acc;
    }
    out.d = acc;
    return out;
}

}  // namespace

PairingValue pair(const Distribution& phi, const TestObject& t) {
    if (phi.realization() != t.realization()) {
        throw std::invalid_argument("test object realization does not match the distribution");
    }
    PairingValue acc;
    acc.exact = true;
    acc.q = 0;
    acc.d = 0.0;
    for (const auto& [w, prim] : phi.terms()) {
        PairingValue v = pair_primitive(prim, t);
        if (v.exact) {
            acc.q += w * v.q;
        } else {
            acc.exact = false;
            acc.d += w.get_d() * v.d;
        }
    }
    if (!acc.exact) {
        acc.d += acc.q.get_d();
        acc.q = 0;
    }
    return acc;
}

namespace {

std::vector<mpq_class> eval_field_at(const KVector& x, const Point& p, int n) {
    std::vector<mpq_class> out(static_cast<size_t>(n), mpq_class(0));
    for (const auto& [idx, c] : x.coeffs()) out[static_cast<size_t>(idx[0])] = c.eval(p);
    return out;
}

bool all_zero(const std::vector<mpq_class>& v) {
    return std::all_of(v.begin(), v.end(), [](const mpq_class& q) { return q == 0; });
}

}  // namespace

Distribution multiply(const Expr& f, const Distribution& phi) {
    std::vector<std::pair<mpq_class, Primitive>> terms;
    for (const auto& [w, prim] : phi.terms()) {
        if (const auto* d = std::get_if<DiracPrimitive>(&prim.data)) {
            mpq_class f0 = f.eval(d->x0);
            if (f0 != 0) terms.push_back({w * f0, Primitive{DiracPrimitive{d->x0}, {}}});
        } else if (const auto* dd = std::get_if<DiracDerivativePrimitive>(&prim.data)) {
            // f delta'(v) = f(x0) delta'(v) - f'_{x0}(v) delta
            mpq_class f0 = f.eval(dd->x0);
            mpq_class fv = directional_derivative(f, dd->x0, dd->direction);
            if (f0 != 0) {
                terms.push_back({w * f0, Primitive{DiracDerivativePrimitive{dd->x0, dd->direction}, {}}});
            }
            if (fv != 0) terms.push_back({-w * fv, Primitive{DiracPrimitive{dd->x0}, {}}});
        } else {
            Primitive p = prim;
            p.deferred.push_back(MultiplyAction{f});
            terms.push_back({w, std::move(p)});
        }
    }
    return Distribution::from_terms(std::move(terms));
}

Distribution derive(const KVector& x, const Distribution& phi) {
    if (!x.is_zero() && x.grade() != 1) throw std::invalid_argument("derive needs a vector field");
    std::vector<std::pair<mpq_class, Primitive>> terms;
    const ChartPtr& ch = x.chart();
    for (const auto& [w, prim] : phi.terms()) {
        if (const auto* d = std::get_if<DiracPrimitive>(&prim.data)) {
            // <X(delta), f> = -(Xf)(x0) = <delta'(X(x0)), f>
            std::vector<mpq_class> v = eval_field_at(x, d->x0, ch->dim());
            if (!all_zero(v)) {
                terms.push_back({w, Primitive{DiracDerivativePrimitive{d->x0, std::move(v)}, {}}});
            }
        } else if (const auto* dd = std::get_if<DiracDerivativePrimitive>(&prim.data)) {
            // Closed in the family only when X(x0) = 0; then
            // X(delta'(v)) = -delta'( (D_v X)(x0) ).
            std::vector<mpq_class> at0 = eval_field_at(x, dd->x0, ch->dim());
            if (!all_zero(at0)) {
                throw std::domain_error(
                    "derivative of a Dirac derivative along a field not vanishing at its point "
                    "is not closed in the primitive family");
            }
            std::vector<mpq_class> jv(static_cast<size_t>(ch->dim()), mpq_class(0));
            for (const auto& [idx, c] : x.coeffs()) {
                jv[static_cast<size_t>(idx[0])] =
                    directional_derivative(c, dd->x0, dd->direction);
            }
            if (!all_zero(jv)) {
                terms.push_back({-w, Primitive{DiracDerivativePrimitive{dd->x0, std::move(jv)}, {}}});
            }
        } else {
            Primitive p = prim;
            p.deferred.push_back(DeriveAction{x});
            terms.push_back({w, std::move(p)});
        }
    }
    return Distribution::from_terms(std::move(terms));
}

Distribution bracket_action(const PoissonStructure& ps, const Expr& f, const Distribution& phi) {
    return derive(ps.hamiltonian_field(f), phi);
}

GencReport genc_check(const PoissonStructure& ps, const Distribution& phi, int degree_bound,
                      double tolerance) {
    GencReport rep;
    rep.degree_bound = degree_bound;
    rep.tolerance = tolerance;
    rep.exact = phi.is_exact();
    rep.pass = true;
    if (phi.empty()) return rep;
    std::vector<Expr> mons = monomials_up_to(ps.chart(), degree_bound);

    if (phi.realization() == Realization::Function) {
        // dual formulation: <Phi, {f,g}> = 0 for all monomial pairs
        for (size_t a = 0; a < mons.size(); ++a) {
            for (size_t b = a + 1; b < mons.size(); ++b) {
                Expr br = ps.bracket(mons[a], mons[b]);
                if (br.is_zero()) continue;
                PairingValue v = pair(phi, TestObject::function(br));
                bool bad;
                double mag = std::abs(v.as_double());
                if (v.exact) {
                    bad = v.q != 0;
                } else {
                    bad = mag > tolerance;
                }
                rep.worst_residual = std::max(rep.worst_residual, mag);
                if (bad && rep.pass) {
                    rep.pass = false;
                    rep.violating_pair = mons[a].to_string() + " , " + mons[b].to_string();
                } else if (bad) {
                    rep.pass = false;
                }
            }
        }
        return rep;
    }

    // top-form realization: <{f, Phi}, alpha> over monomial f and
    // monomial-coefficient top forms alpha
    Indices full = full_indices(ps.dim());
    for (const Expr& f : mons) {
        Distribution bf = bracket_action(ps, f, phi);
        for (const Expr& g : mons) {
            KForm alpha(ps.chart(), ps.dim());
            alpha.add_term(full, g);
            PairingValue v = pair(bf, TestObject::top_form(alpha));
            double mag = std::abs(v.as_double());
            bool bad = v.exact ? v.q != 0 : mag > tolerance;
            rep.worst_residual = std::max(rep.worst_residual, mag);
            if (bad && rep.pass) {
                rep.pass = false;
                rep.violating_pair = "f = " + f.to_string() + " , alpha = (" + g.to_string() +
                                     ") * top";
            } else if (bad) {
                rep.pass = false;
            }
        }
    }
    return rep;
}

IndependenceReport leaf_delta_independence(const std::vector<LeafPtr>& leaves,
                                           const std::vector<Expr>& separating_functions,
                                           double condition_threshold) {
    IndependenceReport rep;
    const size_t m = leaves.size();
    const size_t k = separating_functions.size();
    rep.pairing_matrix.assign(m, std::vector<double>(k, 0.0));
    Eigen::MatrixXd mat(static_cast<long>(m), static_cast<long>(k));
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < k; ++j) {
            Distribution d = Distribution::leaf_delta(leaves[i]);
            double v = pair(d, TestObject::function(separating_functions[j])).as_double();
            rep.pairing_matrix[i][j] = v;
            mat(static_cast<long>(i), static_cast<long>(j)) = v;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
    for (long i = 0; i < svd.singularValues().size(); ++i) {
        rep.singular_values.push_back(svd.singularValues()(i));
    }
    double top = rep.singular_values.empty() ? 0.0 : rep.singular_values.front();
    rep.rank = 0;
    for (double s : rep.singular_values) {
        if (top > 0.0 && s > condition_threshold * top) ++rep.rank;
    }
    rep.full_rank = rep.rank == static_cast<int>(std::min(m, k));
    return rep;
}

AnnihilatorReport delta_N_annihilator_check(const PoissonStructure& ps, const LeafPtr& leaf,
                                            const KVector& x, int degree_bound, double tolerance) {
    AnnihilatorReport rep;
    rep.tolerance = tolerance;
    Distribution dn = Distribution::leaf_delta(leaf);
    Distribution xd = derive(x, dn);
    // pairing residuals over monomials
    for (const Expr& f : monomials_up_to(ps.chart(), degree_bound)) {
        double v = std::abs(pair(xd, TestObject::function(f)).as_double());
        rep.worst_pairing_residual = std::max(rep.worst_pairing_residual, v);
    }
    rep.annihilates = rep.worst_pairing_residual <= tolerance;
    if (leaf->is_point()) {
        // tangency at a point leaf means X(x0) = 0
        std::vector<mpq_class> v = eval_field_at(x, leaf->point_coords(), ps.dim());
        rep.tangent = all_zero(v);
        for (const mpq_class& q : v) {
            rep.worst_tangency_residual = std::max(rep.worst_tangency_residual, std::abs(q.get_d()));
        }
        return rep;
    }
    // tangency at quadrature nodes
    rep.tangent = true;
    for (const auto& chart_nodes : leaf->nodes()) {
        for (const auto& nd : chart_nodes) {
            Eigen::VectorXd xv = Eigen::VectorXd::Zero(ps.dim());
            for (const auto& [idx, c] : x.coeffs()) xv(idx[0]) = c.eval_double(nd.x);
            Eigen::VectorXd xi = nd.jacobian.completeOrthogonalDecomposition().solve(xv);
            double res = (nd.jacobian * xi - xv).norm();
            rep.worst_tangency_residual = std::max(rep.worst_tangency_residual, res);
            if (res > tolerance * std::max(1.0, xv.norm())) rep.tangent = false;
        }
    }
    // pointwise flow derivative of the omega^k density in chart parameters:
    // residual of sum_a d/dp_a (rho xi_a), central differences
    const int m = leaf->leaf_dim();
    for (size_t ci = 0; ci < leaf->charts().size(); ++ci) {
        const auto& box = leaf->charts()[ci].box;
        double hscale = 0.0;
        for (const auto& [lo, hi] : box) hscale = std::max(hscale, hi - lo);
        double h = 1e-5 * std::max(1.0, hscale);
        auto rho_xi = [&](const std::vector<double>& p) {
            Leaf::NodeData nd = leaf->node_at(ci, p);
            Eigen::VectorXd xv = Eigen::VectorXd::Zero(ps.dim());
            for (const auto& [idx, c] : x.coeffs()) xv(idx[0]) = c.eval_double(nd.x);
            Eigen::VectorXd xi = nd.jacobian.completeOrthogonalDecomposition().solve(xv);
            return std::pair<double, Eigen::VectorXd>(nd.density, xi);
        };
        for (const auto& nd : leaf->nodes()[ci]) {
            double div = 0.0;
            for (int a = 0; a < m; ++a) {
                std::vector<double> pp = nd.param, pm = nd.param;
                pp[static_cast<size_t>(a)] += h;
                pm[static_cast<size_t>(a)] -= h;
                auto [rp, xip] = rho_xi(pp);
                auto [rm, xim] = rho_xi(pm);
                div += (rp * xip(a) - rm * xim(a)) / (2.0 * h);
            }
            rep.lie_density_residual = std::max(rep.lie_density_residual, std::abs(div));
        }
    }
    return rep;
}

FlatnessReport transversal_delta_flatness(const PoissonStructure& ps, const LeafPtr& leaf,
                                          const KVector& u_ext, int degree_bound,
                                          double tolerance) {
    FlatnessReport rep;
    rep.casimir_direct = true;
    rep.flat_bott = true;
    Distribution du = Distribution::transversal_delta(leaf, u_ext);
    std::vector<Expr> mons = monomials_up_to(ps.chart(), degree_bound);
    Indices full = full_indices(ps.dim());
    // route (a): direct pairings of {f, delta^u} against monomial top forms
    for (const Expr& f : mons) {
        Distribution bf = bracket_action(ps, f, du);
        for (const Expr& g : mons) {
            KForm alpha(ps.chart(), ps.dim());
            alpha.add_term(full, g);
            if (alpha.is_zero()) continue;
            PairingValue v = pair(bf, TestObject::top_form(alpha));
            double mag = std::abs(v.as_double());
            bool bad = v.exact ? v.q != 0 : mag > tolerance;
            rep.worst_residual = std::max(rep.worst_residual, mag);
            if (bad) {
                rep.casimir_direct = false;
                if (rep.violating_case.empty()) {
                    rep.violating_case =
                        "f = " + f.to_string() + " , alpha = (" + g.to_string() + ") * top";
                }
            }
        }
    }
    // route (b): Bott covariant derivative of the transversal class
    for (const Expr& f : mons) {
        if (leaf->is_point()) {
            auto cls = bott_derivative_multi_point(ps, leaf->point_coords(), f, u_ext);
            if (!cls.empty()) {
                rep.flat_bott = false;
                if (rep.violating_case.empty()) rep.violating_case = "f = " + f.to_string();
            }
        } else {
            KVector br = schouten(ps.hamiltonian_field(f), u_ext);
            for (const auto& chart_nodes : leaf->nodes()) {
                for (const auto& nd : chart_nodes) {
                    if (!leaf->class_is_zero(br.eval_double(nd.x), br.grade(), nd)) {
                        rep.flat_bott = false;
                    }
                }
            }
        }
    }
    rep.agree = rep.casimir_direct == rep.flat_bott;
    return rep;
}

}  // namespace poissonkit
