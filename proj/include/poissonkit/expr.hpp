#pragma once

#include "poissonkit/chart.hpp"
#include "poissonkit/polynomial.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace poissonkit {

/// Error from the expression parser, carrying the byte offset of the problem.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, size_t offset)
        : std::runtime_error(message + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    size_t offset() const { return offset_; }

private:
    size_t offset_;
};

class PoleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact rational function over Q in the chart variables, stored in canonical
/// form: gcd(num, den) is a unit and den is monic under graded-lex order.
/// Structural equality therefore coincides with equality of values.
class Expr {
public:
    Expr() = default;

    static Expr zero(const ChartPtr& chart);
    static Expr one(const ChartPtr& chart);
    static Expr constant(const ChartPtr& chart, const mpq_class& c);
    static Expr variable(const ChartPtr& chart, int index);
    static Expr from_poly(const ChartPtr& chart, Poly p);
    static Expr fraction(const ChartPtr& chart, Poly num, Poly den);

    /// Parses the expression grammar (see docs/grammar in the README):
    /// integer literals, declared variables, + - * /, unary minus, ^ with an
    /// integer exponent, parentheses.
    static Expr parse(const std::string& text, const ChartPtr& chart);

    const ChartPtr& chart() const { return chart_; }
    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const;
    bool is_polynomial() const;
    /// Constant value if the expression is a rational constant.
    std::optional<mpq_class> as_constant() const;

    Expr operator+(const Expr& o) const;
    Expr operator-(const Expr& o) const;
    Expr operator*(const Expr& o) const;
    Expr operator/(const Expr& o) const;  ///< throws std::domain_error on division by zero
    Expr operator-() const;
    Expr inverse() const;
    Expr pow(long e) const;

    bool operator==(const Expr& o) const;
    bool operator!=(const Expr& o) const { return !(*this == o); }

    Expr diff(int var) const;
    Expr diff(const std::string& var) const;

    /// Exact evaluation; throws PoleError if the denominator vanishes.
    mpq_class eval(const Point& p) const;
    double eval_double(const std::vector<double>& p) const;

    std::string to_string() const;

private:
    Expr(ChartPtr chart, Poly num, Poly den);
    void normalize();

    ChartPtr chart_;
    Poly num_;
    Poly den_;
};

Expr operator*(const mpq_class& c, const Expr& e);

}  // namespace poissonkit
