#include "poissonkit/poisson.hpp"

#include "poissonkit/linalg.hpp"

#include <algorithm>
#include <functional>

namespace poissonkit {

PoissonStructure::PoissonStructure(ChartPtr chart, KVector bivector)
    : chart_(std::move(chart)), p_(std::move(bivector)) {
    require_same_chart(chart_, p_.chart());
    if (!p_.is_zero() && p_.grade() != 2) {
        throw std::invalid_argument("Poisson bivector must have grade 2");
    }
    if (p_.is_zero()) p_ = KVector::zero(chart_, 2);
    pp_ = schouten(p_, p_);
    jacobi_ = pp_.is_zero() ? JacobiStatus::Verified : JacobiStatus::Failed;
}

Expr PoissonStructure::bracket(const Expr& f, const Expr& g) const {
    require_same_chart(chart_, f.chart());
    require_same_chart(chart_, g.chart());
    KForm df = exterior_derivative(KForm::scalar(chart_, f));
    KForm dg = exterior_derivative(KForm::scalar(chart_, g));
    return contract(p_, wedge(df, dg)).coeff({});
}

KVector PoissonStructure::hamiltonian_field(const Expr& f) const {
    KVector x(chart_, 1);
    for (int i = 0; i < dim(); ++i) {
        Expr c = bracket(Expr::variable(chart_, i), f);
        if (!c.is_zero()) x.add_term({i}, c);
    }
    return x;
}

KVector PoissonStructure::sigma(const KVector& w) const {
    if (w.grade() == 0) return hamiltonian_field(w.coeff({}));
    return schouten(p_, w);
}

KForm PoissonStructure::canonical_delta(const KForm& w) const {
    KForm a = contract_or_zero(p_, exterior_derivative(w));
    KForm b = exterior_derivative(contract_or_zero(p_, w));
    if (w.grade() == 0) return KForm::zero(chart_, 0);
    KForm r = a - b;
    // normalize the nominal grade of an identically zero result
    if (r.is_zero()) return KForm::zero(chart_, std::max(0, w.grade() - 1));
    return r;
}

KForm PoissonStructure::canonical_delta_expanded(const Expr& phi0,
                                                 const std::vector<Expr>& phis) const {
    const int k = static_cast<int>(phis.size());
    KForm out(chart_, std::max(0, k - 1));
    auto d_of = [&](const Expr& f) { return exterior_derivative(KForm::scalar(chart_, f)); };
    // sum_i (-1)^{i+1} {phi0, phi_i} dphi_1 ^ ... ^ hat i ^ ... ^ dphi_k
    for (int i = 0; i < k; ++i) {
        Expr c = bracket(phi0, phis[static_cast<size_t>(i)]);
        if (c.is_zero()) continue;
        KForm tail = KForm::scalar(chart_, c);
        for (int t = 0; t < k; ++t) {
            if (t == i) continue;
            tail = wedge(tail, d_of(phis[static_cast<size_t>(t)]));
        }
        out = (i % 2 == 0) ? out + tail : out - tail;  // (-1)^{i+1}, 1-based i
    }
    // sum_{i<j} (-1)^{i+j} phi0 d{phi_i, phi_j} ^ dphi_1 ^ ... hat i ... hat j ... ^ dphi_k
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            Expr br = bracket(phis[static_cast<size_t>(i)], phis[static_cast<size_t>(j)]);
            KForm lead = d_of(br).scaled(phi0);
            if (lead.is_zero()) continue;
            KForm tail = lead;
            for (int t = 0; t < k; ++t) {
                if (t == i || t == j) continue;
                tail = wedge(tail, d_of(phis[static_cast<size_t>(t)]));
            }
            // (-1)^{i+j} with 1-based indices = (-1)^{i+j} with 0-based ones
            out = ((i + j) % 2 == 0) ? out + tail : out - tail;
        }
    }
    return out;
}

namespace {

Matrix<Expr> bivector_matrix(const PoissonStructure& ps) {
    const int n = ps.dim();
    Matrix<Expr> m(static_cast<size_t>(n),
                   std::vector<Expr>(static_cast<size_t>(n), Expr::zero(ps.chart())));
    for (const auto& [idx, c] : ps.bivector().coeffs()) {
        m[static_cast<size_t>(idx[0])][static_cast<size_t>(idx[1])] = c;
        m[static_cast<size_t>(idx[1])][static_cast<size_t>(idx[0])] = -c;
    }
    return m;
}

Indices full_indices(int n) {
    Indices idx(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    return idx;
}

// Determinant pairing P^k(dx_I, dx_J) = det [ P(dx_{I_a}, dx_{J_b}) ].
Expr pk_pairing(const Matrix<Expr>& pm, const Indices& I, const Indices& J, const ChartPtr& ch) {
    const size_t k = I.size();
    if (k == 0) return Expr::one(ch);
    Matrix<Expr> sub(k, std::vector<Expr>(k, Expr::zero(ch)));
    for (size_t a = 0; a < k; ++a) {
        for (size_t b = 0; b < k; ++b) {
            sub[a][b] = pm[static_cast<size_t>(I[a])][static_cast<size_t>(J[b])];
        }
    }
    // cofactor expansion; k <= dim stays small
    std::function<Expr(const Matrix<Expr>&)> det = [&](const Matrix<Expr>& m) -> Expr {
        const size_t s = m.size();
        if (s == 1) return m[0][0];
        Expr acc = Expr::zero(ch);
        for (size_t c = 0; c < s; ++c) {
            if (m[0][c].is_zero()) continue;
            Matrix<Expr> minor(s - 1, std::vector<Expr>(s - 1, Expr::zero(ch)));
            for (size_t i = 1; i < s; ++i) {
                size_t jj = 0;
                for (size_t j = 0; j < s; ++j) {
                    if (j == c) continue;
                    minor[i - 1][jj++] = m[i][j];
                }
            }
            Expr term = m[0][c] * det(minor);
            acc = (c % 2 == 0) ? acc + term : acc - term;
        }
        return acc;
    };
    return det(sub);
}

void enumerate_increasing(int n, int k, const std::function<void(const Indices&)>& fn) {
    Indices idx(static_cast<size_t>(k));
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            fn(idx);
            return;
        }
        for (int v = start; v < n; ++v) {
            idx[static_cast<size_t>(depth)] = v;
            rec(v + 1, depth + 1);
        }
    };
    if (k == 0) {
        fn(Indices{});
        return;
    }
    rec(0, 0);
}

int complement_sign(const Indices& I, int n, Indices& K) {
    std::vector<bool> in(static_cast<size_t>(n), false);
    for (int i : I) in[static_cast<size_t>(i)] = true;
    K.clear();
    for (int v = 0; v < n; ++v) {
        if (!in[static_cast<size_t>(v)]) K.push_back(v);
    }
    std::vector<int> joined(I.begin(), I.end());
    joined.insert(joined.end(), K.begin(), K.end());
    Indices sorted;
    int sign = 0;
    detail::sort_indices(joined, sorted, sign);
    return sign;
}

}  // namespace

bool PoissonStructure::is_nondegenerate() const {
    Matrix<Expr> pm = bivector_matrix(*this);
    return inverse(pm, Expr::zero(chart_), Expr::one(chart_)).has_value();
}

KForm PoissonStructure::symplectic_form() const {
    Matrix<Expr> pm = bivector_matrix(*this);
    auto inv = inverse(pm, Expr::zero(chart_), Expr::one(chart_));
    if (!inv) throw std::domain_error("star undefined for degenerate structure");
    // w(X_f, X_g) = {f,g} forces the matrix of w to be -P^{-1}
    KForm w(chart_, 2);
    for (int a = 0; a < dim(); ++a) {
        for (int b = a + 1; b < dim(); ++b) {
            Expr c = -(*inv)[static_cast<size_t>(a)][static_cast<size_t>(b)];
            if (!c.is_zero()) w.add_term({a, b}, c);
        }
    }
    return w;
}

KForm PoissonStructure::liouville_volume() const {
    KForm w = symplectic_form();
    const int n = dim() / 2;
    KForm vol = KForm::scalar(chart_, Expr::one(chart_));
    mpq_class fact = 1;
    for (int i = 1; i <= n; ++i) {
        vol = wedge(vol, w);
        fact *= i;
    }
    return vol.scaled(Expr::constant(chart_, mpq_class(1) / fact));
}

KForm PoissonStructure::star(const KForm& w) const {
    require_same_chart(chart_, w.chart());
    const int n = dim();
    const int k = w.grade();
    Matrix<Expr> pm = bivector_matrix(*this);
    if (!inverse(pm, Expr::zero(chart_), Expr::one(chart_))) {
        throw std::domain_error("star undefined for degenerate structure");
    }
    Expr volc = liouville_volume().coeff(full_indices(n));
    KForm out(chart_, n - k);
    // For each basis k-form dx_I, dx_I ^ (*w) = P^k(dx_I, w) vol picks out the
    // complementary coefficient of *w.
    enumerate_increasing(n, k, [&](const Indices& I) {
        Expr rhs = Expr::zero(chart_);
        for (const auto& [J, c] : w.coeffs()) {
            Expr pk = pk_pairing(pm, I, J, chart_);
            if (!pk.is_zero()) rhs = rhs + pk * c;
        }
        if (rhs.is_zero()) return;
        Indices K;
        int sign = complement_sign(I, n, K);
        Expr coeff = rhs * volc;
        out.add_term(K, sign > 0 ? coeff : -coeff);
    });
    return out;
}

KVector PoissonStructure::modular_field(const VolumeForm& w) const {
    require_same_chart(chart_, w.chart());
    Expr wc = w.coefficient();
    KVector mu(chart_, 1);
    Indices full = full_indices(dim());
    for (int i = 0; i < dim(); ++i) {
        KVector xi = hamiltonian_field(Expr::variable(chart_, i));
        KForm lw = lie_derivative(xi, w.form());
        Expr c = lw.coeff(full) / wc;
        if (!c.is_zero()) mu.add_term({i}, c);
    }
    return mu;
}

bool PoissonStructure::modular_change_of_volume_check_against(const VolumeForm& w, const Expr& phi,
                                                              const KVector& mu_phiw,
                                                              int degree_bound) const {
    if (phi.is_zero()) throw std::invalid_argument("phi must be nonzero");
    KVector mu = modular_field(w);
    for (const Expr& f : monomials_up_to(chart_, degree_bound)) {
        KForm df = exterior_derivative(KForm::scalar(chart_, f));
        Expr lhs = contract_or_zero(mu_phiw, df).coeff({});
        Expr rhs = contract_or_zero(mu, df).coeff({}) + bracket(phi, f) / phi;
        if (lhs != rhs) return false;
    }
    return true;
}

bool PoissonStructure::modular_change_of_volume_check(const VolumeForm& w, const Expr& phi,
                                                      int degree_bound) const {
    VolumeForm w1(chart_, phi * w.coefficient());
    return modular_change_of_volume_check_against(w, phi, modular_field(w1), degree_bound);
}

namespace {

std::vector<Exponents> monomial_exponents(int nvars, int bound) {
    std::vector<Exponents> out;
    Exponents e(static_cast<size_t>(nvars), 0u);
    std::function<void(int, int)> rec = [&](int var, int remaining) {
        if (var == nvars) {
            out.push_back(e);
            return;
        }
        for (int d = 0; d <= remaining; ++d) {
            e[static_cast<size_t>(var)] = static_cast<unsigned>(d);
            rec(var + 1, remaining - d);
        }
        e[static_cast<size_t>(var)] = 0;
    };
    rec(0, bound);
    std::sort(out.begin(), out.end(), [](const Exponents& a, const Exponents& b) {
        return GrlexGreater{}(b, a);  // ascending graded-lex
    });
    return out;
}

}  // namespace

std::vector<Expr> monomials_up_to(const ChartPtr& chart, int bound) {
    std::vector<Expr> out;
    for (const Exponents& e : monomial_exponents(chart->dim(), bound)) {
        Poly p(chart->dim());
        p.add_term(e, 1);
        out.push_back(Expr::from_poly(chart, p));
    }
    return out;
}

std::optional<Expr> PoissonStructure::modular_triviality_witness(const VolumeForm& w,
                                                                 int degree_bound) const {
    KVector mu = modular_field(w);
    for (const auto& [idx, c] : mu.coeffs()) {
        (void)idx;
        if (!c.is_polynomial()) return std::nullopt;  // no polynomial psi can match
    }
    auto exps = monomial_exponents(dim(), degree_bound);
    // unknown coefficients c_m of psi; equations: coefficients of
    // sigma(psi)_i - mu_i as polynomials must vanish for every component i
    std::map<std::pair<int, Exponents>, size_t> row_of;
    std::vector<std::vector<mpq_class>> rows;
    std::vector<mpq_class> rhs;
    auto row_for = [&](int comp, const Exponents& e) -> size_t {
        auto key = std::make_pair(comp, e);
        auto it = row_of.find(key);
        if (it != row_of.end()) return it->second;
        size_t r = rows.size();
        row_of.emplace(key, r);
        rows.emplace_back(exps.size(), mpq_class(0));
        rhs.emplace_back(0);
        return r;
    };
    for (size_t m = 0; m < exps.size(); ++m) {
        Poly p(dim());
        p.add_term(exps[m], 1);
        KVector xm = hamiltonian_field(Expr::from_poly(chart_, p));
        for (const auto& [idx, c] : xm.coeffs()) {
            if (!c.is_polynomial()) throw std::logic_error("polynomial bivector expected");
            for (const auto& [e, q] : c.num().terms()) {
                rows[row_for(idx[0], e)][m] = q;
            }
        }
    }
    for (const auto& [idx, c] : mu.coeffs()) {
        for (const auto& [e, q] : c.num().terms()) {
            rhs[row_for(idx[0], e)] = q;
        }
    }
    auto sol = solve(rows, rhs, mpq_class(0));
    if (!sol) return std::nullopt;
    Poly psi(dim());
    for (size_t m = 0; m < exps.size(); ++m) psi.add_term(exps[m], (*sol)[m]);
    return Expr::from_poly(chart_, psi);
}

std::vector<Expr> PoissonStructure::casimir_scan(int degree_bound) const {
    auto exps = monomial_exponents(dim(), degree_bound);
    // X_C = 0 componentwise, linear in the coefficients of C
    std::map<std::pair<int, Exponents>, size_t> row_of;
    std::vector<std::vector<mpq_class>> rows;
    auto row_for = [&](int comp, const Exponents& e) -> size_t {
        auto key = std::make_pair(comp, e);
        auto it = row_of.find(key);
        if (it != row_of.end()) return it->second;
        size_t r = rows.size();
        row_of.emplace(key, r);
        rows.emplace_back(exps.size(), mpq_class(0));
        return r;
    };
    for (size_t m = 0; m < exps.size(); ++m) {
        Poly p(dim());
        p.add_term(exps[m], 1);
        KVector xm = hamiltonian_field(Expr::from_poly(chart_, p));
        for (const auto& [idx, c] : xm.coeffs()) {
            if (!c.is_polynomial()) throw std::logic_error("polynomial bivector expected");
            for (const auto& [e, q] : c.num().terms()) {
                rows[row_for(idx[0], e)][m] = q;
            }
        }
    }
    std::vector<Expr> basis;
    if (rows.empty()) {
        // every monomial is a Casimir (zero bivector)
        for (const auto& e : exps) {
            Poly p(dim());
            p.add_term(e, 1);
            basis.push_back(Expr::from_poly(chart_, p));
        }
        return basis;
    }
    for (const auto& v : nullspace(rows, mpq_class(0), mpq_class(1))) {
        Poly p(dim());
        for (size_t m = 0; m < exps.size(); ++m) p.add_term(exps[m], v[m]);
        basis.push_back(Expr::from_poly(chart_, p));
    }
    return basis;
}

}  // namespace poissonkit
