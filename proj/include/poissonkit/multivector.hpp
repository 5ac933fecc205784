#pragma once

#include "poissonkit/expr.hpp"

#include <map>
#include <string>
#include <vector>

namespace poissonkit {

/// Strictly increasing multi-index into the chart coordinates.
using Indices = std::vector<int>;

namespace detail {

/// Merges two increasing index tuples into one, tracking the sign of the
/// permutation. Returns false if an index repeats (the wedge vanishes).
bool merge_indices(const Indices& a, const Indices& b, Indices& out, int& sign);

/// Sorts an arbitrary index list into increasing order, tracking the sign.
/// Returns false on repeated indices.
bool sort_indices(std::vector<int> idx, Indices& out, int& sign);

struct VectorTag {
    static constexpr const char* prefix = "@";
};
struct FormTag {
    static constexpr const char* prefix = "d";
};

}  // namespace detail

/// Antisymmetric tensor field of fixed grade with Expr coefficients, indexed
/// by strictly increasing multi-indices. The zero tensor of any grade is the
/// empty coefficient map.
template <typename Tag>
class Alternating {
public:
    using CoeffMap = std::map<Indices, Expr>;

    Alternating() = default;
    Alternating(ChartPtr chart, int grade) : chart_(std::move(chart)), grade_(grade) {}

    static Alternating zero(const ChartPtr& chart, int grade) { return Alternating(chart, grade); }
    static Alternating scalar(const ChartPtr& chart, Expr value);
    /// Basis element with coefficient 1 on the given increasing indices.
    static Alternating basis(const ChartPtr& chart, const Indices& idx);

    const ChartPtr& chart() const { return chart_; }
    int dim() const { return chart_ ? chart_->dim() : 0; }
    int grade() const { return grade_; }
    bool is_zero() const { return coeffs_.empty(); }
    const CoeffMap& coeffs() const { return coeffs_; }

    /// Coefficient on an increasing multi-index (zero expression if absent).
    Expr coeff(const Indices& idx) const;
    /// Adds c on idx, which may be unsorted; the sign is adjusted.
    void add_term(const Indices& idx, const Expr& c);

    Alternating operator+(const Alternating& o) const;
    Alternating operator-(const Alternating& o) const;
    Alternating operator-() const;
    Alternating scaled(const Expr& c) const;

    bool operator==(const Alternating& o) const;
    bool operator!=(const Alternating& o) const { return !(*this == o); }

    std::map<Indices, mpq_class> eval(const Point& p) const;
    std::map<Indices, double> eval_double(const std::vector<double>& p) const;

    std::string to_string() const;

private:
    ChartPtr chart_;
    int grade_ = 0;
    CoeffMap coeffs_;
};

using KVector = Alternating<detail::VectorTag>;
using KForm = Alternating<detail::FormTag>;

/// Parsers for the tensor grammar ("(coef)*@x^@y", "(coef)*dx^dy", ...).
KVector parse_kvector(const std::string& text, const ChartPtr& chart);
KForm parse_kform(const std::string& text, const ChartPtr& chart);

template <typename Tag>
Alternating<Tag> wedge(const Alternating<Tag>& a, const Alternating<Tag>& b);

/// d on forms; grade rises by one (identically zero above top degree).
KForm exterior_derivative(const KForm& w);

/// Interior product i_U(w). The iterated product over a decomposable
/// multivector applies the first factor innermost, which normalizes
/// contract(X (\) Y, a (\) b) = a(X)b(Y) - a(Y)b(X); in particular
/// contract(P, df (\) dg) is the Poisson bracket pairing P(df, dg).
/// Throws std::invalid_argument when grade(U) > grade(w).
KForm contract(const KVector& u, const KForm& w);

/// As contract, but grade(U) > grade(w) yields the zero form (used by the
/// operator formulas where out-of-range contractions vanish).
KForm contract_or_zero(const KVector& u, const KForm& w);

/// Generalized Lie derivative L_X = i_X d - (-1)^{|X|} d i_X.
KForm lie_derivative(const KVector& x, const KForm& w);

/// Schouten-Nijenhuis bracket for multivector fields of any grades >= 0;
/// grade-0 arguments act as functions. Result grade is |U| + |V| - 1.
KVector schouten(const KVector& u, const KVector& v);

/// Top-degree form with a single, not identically zero coefficient.
class VolumeForm {
public:
    explicit VolumeForm(KForm w);
    VolumeForm(const ChartPtr& chart, const Expr& coefficient);

    const KForm& form() const { return form_; }
    const ChartPtr& chart() const { return form_.chart(); }
    /// Coefficient on dx_0 (\) ... (\) dx_{n-1}.
    Expr coefficient() const;

private:
    KForm form_;
};

extern template class Alternating<detail::VectorTag>;
extern template class Alternating<detail::FormTag>;

}  // namespace poissonkit
