#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace poissonkit {

/// Exponent tuple of a monomial; length equals the number of chart variables.
using Exponents = std::vector<unsigned>;

unsigned total_degree(const Exponents& e);

/// Graded lexicographic order, "greater" variant so that map iteration visits
/// the leading term first. Ties on total degree break lexicographically with
/// earlier variables weighing more.
struct GrlexGreater {
    bool operator()(const Exponents& a, const Exponents& b) const;
};

/// Sparse multivariate polynomial with exact rational coefficients.
/// Terms are kept in descending graded-lex order and never store a zero
/// coefficient, so equal polynomials have identical representations.
class Poly {
public:
    using TermMap = std::map<Exponents, mpq_class, GrlexGreater>;

    Poly() : nvars_(0) {}
    explicit Poly(int nvars) : nvars_(nvars) {}

    static Poly zero(int nvars) { return Poly(nvars); }
    static Poly constant(int nvars, const mpq_class& c);
    static Poly variable(int nvars, int index);

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    const TermMap& terms() const { return terms_; }

    /// Degree of the leading monomial; -1 for the zero polynomial.
    int degree() const;
    int degree_in(int var) const;

    const mpq_class& leading_coeff() const;
    const Exponents& leading_monomial() const;
    mpq_class constant_term() const;

    void add_term(const Exponents& e, const mpq_class& c);

    Poly operator-() const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    bool operator==(const Poly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly scaled(const mpq_class& c) const;
    Poly pow(unsigned e) const;
    Poly derivative(int var) const;

    mpq_class eval(const std::vector<mpq_class>& point) const;
    double eval_double(const std::vector<double>& point) const;

    std::string to_string(const std::vector<std::string>& vars) const;

private:
    int nvars_;
    TermMap terms_;
};

/// Exact quotient a / b; throws std::logic_error if b does not divide a.
Poly divexact(const Poly& a, const Poly& b);

/// GCD over Q[x1..xn], returned primitive over Z with positive leading
/// coefficient (so gcd(a, b) is unique). gcd(0, 0) = 0.
Poly poly_gcd(const Poly& a, const Poly& b);

}  // namespace poissonkit
