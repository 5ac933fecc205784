#pragma once

#include "poissonkit/leaf.hpp"

#include <string>
#include <variant>
#include <vector>

namespace poissonkit {

// --- primitives -------------------------------------------------------------

struct DiracPrimitive {
    Point x0;
};

/// <delta'_{x0}(v), f> = -f'_{x0}(v).
struct DiracDerivativePrimitive {
    Point x0;
    std::vector<mpq_class> direction;
};

/// <delta_N, f> = integral over N of f against omega_N^k.
struct LeafDeltaPrimitive {
    LeafPtr leaf;
};

/// <delta^u, alpha> = integral over N of i_u alpha (evaluation at x0 for a
/// point leaf). u_ext is an ambient representative of the transversal class,
/// of grade dim - dim(N).
struct TransversalDeltaPrimitive {
    LeafPtr leaf;
    KVector u_ext;
};

/// Deferred module actions on leaf-type primitives, applied through the
/// adjoint identities at pairing time.
struct MultiplyAction {
    Expr f;
};
struct DeriveAction {
    KVector x;  // grade 1
};
using Action = std::variant<MultiplyAction, DeriveAction>;

struct Primitive {
    std::variant<DiracPrimitive, DiracDerivativePrimitive, LeafDeltaPrimitive,
                 TransversalDeltaPrimitive>
        data;
    std::vector<Action> deferred;  // in application order (outermost last)

    bool pairs_with_functions() const;
    bool is_exact() const;
};

enum class Realization { Function, TopForm };

/// Finite formal combination of primitives with exact rational weights.
class Distribution {
public:
    Distribution() = default;

    static Distribution dirac(Point x0);
    static Distribution dirac_derivative(Point x0, std::vector<mpq_class> direction);
    static Distribution leaf_delta(LeafPtr leaf);
    static Distribution transversal_delta(LeafPtr leaf, KVector u_ext);
    static Distribution from_terms(std::vector<std::pair<mpq_class, Primitive>> terms);

    const std::vector<std::pair<mpq_class, Primitive>>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    Distribution operator+(const Distribution& o) const;
    Distribution scaled(const mpq_class& c) const;

    /// Realization the distribution pairs against; throws on a mixed sum.
    Realization realization() const;
    /// True when every term pairs exactly (Dirac-type, or leaf-type on point
    /// leaves).
    bool is_exact() const;

private:
    std::vector<std::pair<mpq_class, Primitive>> terms_;
};

struct TestObject {
    std::variant<Expr, KForm> value;

    static TestObject function(Expr f) { return {std::move(f)}; }
    static TestObject top_form(KForm a);
    Realization realization() const {
        return std::holds_alternative<Expr>(value) ? Realization::Function : Realization::TopForm;
    }
};

/// Exact-or-float pairing result.
struct PairingValue {
    bool exact = true;
    mpq_class q;
    double d = 0.0;

    double as_double() const { return exact ? q.get_d() : d; }
    bool is_zero() const { return exact ? q == 0 : d == 0.0; }
};

PairingValue pair(const Distribution& phi, const TestObject& t);

// --- module actions ----------------------------------------------------------

/// f . Phi with <f Phi, g> = <Phi, f g>.
Distribution multiply(const Expr& f, const Distribution& phi);
/// X(Phi) with <X(Phi), t> = -<Phi, X(t)> (Lie derivative on top forms).
/// Throws std::domain_error when the result leaves the primitive family
/// (derivative of a Dirac derivative along a field not vanishing at x0).
Distribution derive(const KVector& x, const Distribution& phi);
/// {f, Phi} = X_f(Phi).
Distribution bracket_action(const PoissonStructure& ps, const Expr& f, const Distribution& phi);

// --- verification reports -----------------------------------------------------

struct GencReport {
    bool pass = false;
    bool exact = false;
    double worst_residual = 0.0;
    double tolerance = 0.0;
    int degree_bound = 0;
    std::string violating_pair;
};

/// Generalized-center membership: <Phi, {f,g}> = 0 over all monomial pairs up
/// to degree_bound (function realization), or <{f, Phi}, alpha> = 0 over
/// monomial f and monomial-coefficient top forms (top-form realization).
GencReport genc_check(const PoissonStructure& ps, const Distribution& phi, int degree_bound,
                      double tolerance);

struct IndependenceReport {
    std::vector<std::vector<double>> pairing_matrix;
    std::vector<double> singular_values;
    int rank = 0;
    bool full_rank = false;
};

IndependenceReport leaf_delta_independence(const std::vector<LeafPtr>& leaves,
                                           const std::vector<Expr>& separating_functions,
                                           double condition_threshold);

struct AnnihilatorReport {
    bool annihilates = false;
    double worst_pairing_residual = 0.0;
    bool tangent = false;
    double worst_tangency_residual = 0.0;
    double lie_density_residual = 0.0;  ///< max node residual of the omega^k flow derivative
    double tolerance = 0.0;
};

/// Checks <X(delta_N), f> = 0 over monomials up to degree_bound, together
/// with node tangency of X and the pointwise flow-invariance of the leaf
/// volume density.
AnnihilatorReport delta_N_annihilator_check(const PoissonStructure& ps, const LeafPtr& leaf,
                                            const KVector& x, int degree_bound, double tolerance);

struct FlatnessReport {
    bool casimir_direct = false;   ///< route (a): every <{f, delta^u}, alpha> vanishes
    bool flat_bott = false;        ///< route (b): every nabla_{df}(u) class vanishes
    bool agree = false;
    double worst_residual = 0.0;
    std::string violating_case;
};

/// Cross-checks the generalized-Casimir property of a transversal delta via
/// the direct pairing and via the Bott covariant derivative.
FlatnessReport transversal_delta_flatness(const PoissonStructure& ps, const LeafPtr& leaf,
                                          const KVector& u_ext, int degree_bound,
                                          double tolerance);

}  // namespace poissonkit
