#include "poissonkit/polynomial.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace poissonkit {

unsigned total_degree(const Exponents& e) {
    unsigned d = 0;
    for (unsigned x : e) d += x;
    return d;
}

bool GrlexGreater::operator()(const Exponents& a, const Exponents& b) const {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return false;
}

Poly Poly::constant(int nvars, const mpq_class& c) {
    Poly p(nvars);
    if (c != 0) p.terms_.emplace(Exponents(static_cast<size_t>(nvars), 0u), c);
    return p;
}

Poly Poly::variable(int nvars, int index) {
    if (index < 0 || index >= nvars) throw std::out_of_range("variable index");
    Poly p(nvars);
    Exponents e(static_cast<size_t>(nvars), 0u);
    e[static_cast<size_t>(index)] = 1;
    p.terms_.emplace(std::move(e), mpq_class(1));
    return p;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
}

int Poly::degree() const {
    if (terms_.empty()) return -1;
    return static_cast<int>(total_degree(terms_.begin()->first));
}

int Poly::degree_in(int var) const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(e[static_cast<size_t>(var)]));
    if (terms_.empty()) return -1;
    return d;
}

const mpq_class& Poly::leading_coeff() const {
    if (terms_.empty()) throw std::logic_error("leading_coeff of zero polynomial");
    return terms_.begin()->second;
}

const Exponents& Poly::leading_monomial() const {
    if (terms_.empty()) throw std::logic_error("leading_monomial of zero polynomial");
    return terms_.begin()->first;
}

mpq_class Poly::constant_term() const {
    Exponents zero(static_cast<size_t>(nvars_), 0u);
    auto it = terms_.find(zero);
    return it == terms_.end() ? mpq_class(0) : it->second;
}

void Poly::add_term(const Exponents& e, const mpq_class& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Poly Poly::operator-() const {
    Poly r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r(nvars_);
    Exponents e(static_cast<size_t>(nvars_), 0u);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

Poly Poly::scaled(const mpq_class& c) const {
    Poly r(nvars_);
    if (c == 0) return r;
    for (const auto& [e, k] : terms_) r.terms_.emplace(e, k * c);
    return r;
}

Poly Poly::pow(unsigned e) const {
    Poly r = Poly::constant(nvars_, 1);
    Poly base = *this;
    while (e > 0) {
        if (e & 1u) r = r * base;
        base = base * base;
        e >>= 1u;
    }
    return r;
}

Poly Poly::derivative(int var) const {
    Poly r(nvars_);
    const auto v = static_cast<size_t>(var);
    for (const auto& [e, c] : terms_) {
        if (e[v] == 0) continue;
        Exponents d = e;
        d[v] -= 1;
        r.add_term(d, c * static_cast<long>(e[v]));
    }
    return r;
}

mpq_class Poly::eval(const std::vector<mpq_class>& point) const {
    mpq_class acc = 0;
    for (const auto& [e, c] : terms_) {
        mpq_class t = c;
        for (size_t i = 0; i < e.size(); ++i) {
            for (unsigned k = 0; k < e[i]; ++k) t *= point[i];
        }
        acc += t;
    }
    return acc;
}

double Poly::eval_double(const std::vector<double>& point) const {
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c.get_d();
        for (size_t i = 0; i < e.size(); ++i) {
            for (unsigned k = 0; k < e[i]; ++k) t *= point[i];
        }
        acc += t;
    }
    return acc;
}

std::string Poly::to_string(const std::vector<std::string>& vars) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        mpq_class a = c;
        if (first) {
            if (a < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool has_vars = total_degree(e) > 0;
        if (!has_vars || a != 1) {
            os << a.get_str();
            if (has_vars) os << "*";
        }
        bool first_var = true;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (!first_var) os << "*";
            first_var = false;
            os << vars[i];
            if (e[i] > 1) os << "^" << e[i];
        }
    }
    return os.str();
}

Poly divexact(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw std::logic_error("divexact by zero polynomial");
    Poly rem = a;
    Poly quot(a.nvars());
    const Exponents& lb = b.is_zero() ? Exponents() : b.leading_monomial();
    const mpq_class& cb = b.leading_coeff();
    while (!rem.is_zero()) {
        const Exponents& la = rem.leading_monomial();
        Exponents q(la.size());
        for (size_t i = 0; i < la.size(); ++i) {
            if (la[i] < lb[i]) throw std::logic_error("divexact: not divisible");
            q[i] = la[i] - lb[i];
        }
        mpq_class qc = rem.leading_coeff() / cb;
        Poly qterm(a.nvars());
        qterm.add_term(q, qc);
        quot = quot + qterm;
        rem = rem - qterm * b;
    }
    return quot;
}

namespace {

// --- integer-coefficient helpers for the gcd ------------------------------

mpz_class int_content(const Poly& p) {
    mpz_class g = 0;
    for (const auto& [e, c] : p.terms()) {
        (void)e;
        mpz_class num = c.get_num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
    }
    return g;
}

mpz_class denom_lcm(const Poly& p) {
    mpz_class l = 1;
    for (const auto& [e, c] : p.terms()) {
        (void)e;
        mpz_class den = c.get_den();
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
    }
    return l;
}

// Clears denominators and divides out the integer content; result has
// coprime integer coefficients and positive leading coefficient.
Poly primitive_z(const Poly& p) {
    if (p.is_zero()) return p;
    Poly q = p.scaled(mpq_class(denom_lcm(p)));
    mpz_class c = int_content(q);
    q = q.scaled(mpq_class(1) / mpq_class(c));
    if (q.leading_coeff() < 0) q = -q;
    return q;
}

int first_active_var(const Poly& a, const Poly& b) {
    for (int v = 0; v < a.nvars(); ++v) {
        if (a.degree_in(v) > 0 || b.degree_in(v) > 0) return v;
    }
    return -1;
}

// Coefficients of p viewed as univariate in `var`, each a polynomial in the
// remaining variables (exponent of `var` zeroed out).
std::vector<Poly> univariate_view(const Poly& p, int var) {
    int d = p.degree_in(var);
    std::vector<Poly> coeffs(static_cast<size_t>(d + 1), Poly(p.nvars()));
    for (const auto& [e, c] : p.terms()) {
        Exponents r = e;
        unsigned k = r[static_cast<size_t>(var)];
        r[static_cast<size_t>(var)] = 0;
        coeffs[k].add_term(r, c);
    }
    return coeffs;
}

Poly gcd_z(Poly a, Poly b);

Poly content_in_var(const Poly& p, int var) {
    auto coeffs = univariate_view(p, var);
    Poly g(p.nvars());
    for (const auto& c : coeffs) {
        if (!c.is_zero()) g = gcd_z(g, c);
    }
    return g;
}

Poly mul_var_power(const Poly& p, int var, unsigned k) {
    Poly r(p.nvars());
    for (const auto& [e, c] : p.terms()) {
        Exponents d = e;
        d[static_cast<size_t>(var)] += k;
        r.add_term(d, c);
    }
    return r;
}

// Pseudo-remainder of a by b in the variable `var`.
Poly pseudo_rem(Poly a, const Poly& b, int var) {
    int db = b.degree_in(var);
    auto bc = univariate_view(b, var);
    const Poly& lcb = bc.back();
    while (!a.is_zero() && a.degree_in(var) >= db) {
        auto ac = univariate_view(a, var);
        int da = static_cast<int>(ac.size()) - 1;
        const Poly& lca = ac.back();
        a = a * lcb - mul_var_power(lca * b, var, static_cast<unsigned>(da - db));
        if (!a.is_zero() && a.degree_in(var) >= da) {
            throw std::logic_error("pseudo_rem failed to reduce degree");
        }
    }
    return a;
}

// GCD of primitive-or-arbitrary integer polynomials, recursive in the set of
// active variables (primitive PRS).
Poly gcd_z(Poly a, Poly b) {
    if (a.is_zero()) return primitive_z(b);
    if (b.is_zero()) return primitive_z(a);
    int var = first_active_var(a, b);
    if (var < 0) {
        // both constants
        mpz_class g;
        mpz_class ca = a.leading_coeff().get_num();
        mpz_class cb = b.leading_coeff().get_num();
        mpz_gcd(g.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
        return Poly::constant(a.nvars(), mpq_class(g));
    }
    Poly cont_a = content_in_var(a, var);
    Poly cont_b = content_in_var(b, var);
    Poly c = gcd_z(cont_a, cont_b);
    Poly pa = divexact(a, cont_a);
    Poly pb = divexact(b, cont_b);
    if (pa.degree_in(var) < pb.degree_in(var)) std::swap(pa, pb);
    while (true) {
        if (pb.is_zero()) return primitive_z(c * pa);
        if (pb.degree_in(var) == 0) {
            // a nonzero element of the coefficient ring: primitive parts coprime in var
            return primitive_z(c);
        }
        Poly r = pseudo_rem(pa, pb, var);
        pa = pb;
        pb = r.is_zero() ? r : divexact(r, content_in_var(r, var));
    }
}

}  // namespace

Poly poly_gcd(const Poly& a, const Poly& b) {
    if (a.is_zero() && b.is_zero()) return a;
    return primitive_z(gcd_z(primitive_z(a), primitive_z(b)));
}

}  // namespace poissonkit
