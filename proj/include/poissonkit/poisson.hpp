#pragma once

#include "poissonkit/multivector.hpp"

#include <optional>
#include <string>
#include <vector>

namespace poissonkit {

enum class JacobiStatus { Unknown, Verified, Failed };

/// A bivector field on a chart together with the operators it induces.
///
/// Sign conventions (pinned by the test suite and echoed in every report):
///   {f,g}   = i_P(df (\) dg) = P(df, dg)
///   X_f(g)  = {g,f},  i.e. X_f = sum_i {x_i, f} d/dx_i
///   sigma   = [P, .] on grade >= 1, X_f on functions
///   delta   = i_P d - d i_P
class PoissonStructure {
public:
    PoissonStructure(ChartPtr chart, KVector bivector);

    const ChartPtr& chart() const { return chart_; }
    int dim() const { return chart_->dim(); }
    const KVector& bivector() const { return p_; }

    JacobiStatus jacobi_status() const { return jacobi_; }
    bool jacobi_ok() const { return jacobi_ == JacobiStatus::Verified; }
    /// [P,P]; the zero 3-vector exactly when the Jacobi identity holds.
    const KVector& schouten_pp() const { return pp_; }

    Expr bracket(const Expr& f, const Expr& g) const;
    KVector hamiltonian_field(const Expr& f) const;

    /// Lichnerowicz coboundary.
    KVector sigma(const KVector& w) const;

    /// Canonical boundary via the operator formula i_P d - d i_P.
    KForm canonical_delta(const KForm& w) const;
    /// Canonical boundary of phi_0 dphi_1 (\) ... (\) dphi_k via the expanded
    /// bracket formula; an independent route used to cross-check the operator.
    KForm canonical_delta_expanded(const Expr& phi0, const std::vector<Expr>& phis) const;

    bool is_nondegenerate() const;
    /// Symplectic 2-form (matrix inverse of the bivector, normalized so that
    /// w(X_f, X_g) = {f,g}). Throws std::domain_error when degenerate.
    KForm symplectic_form() const;
    /// Symplectic volume w^n / n!.
    KForm liouville_volume() const;
    /// Symplectic star; throws std::domain_error when degenerate.
    KForm star(const KForm& w) const;

    /// Modular vector field of a volume form: mu_W(f) W = L_{X_f} W,
    /// assembled from mu_W(x_i).
    KVector modular_field(const VolumeForm& w) const;
    /// Checks mu_{phi W}(f) = mu_W(f) + {phi,f}/phi on coordinate monomials
    /// up to degree_bound (the rational form of the change-of-volume rule).
    bool modular_change_of_volume_check(const VolumeForm& w, const Expr& phi,
                                        int degree_bound) const;
    /// Same check against an externally supplied candidate for mu_{phi W};
    /// exists so tests can feed a corrupted field.
    bool modular_change_of_volume_check_against(const VolumeForm& w, const Expr& phi,
                                                const KVector& mu_phiw, int degree_bound) const;

    /// Searches for a polynomial psi with sigma(psi) = mu_W by equating
    /// coefficients up to degree_bound. nullopt = no polynomial witness up to
    /// the bound (which proves nothing about nontriviality).
    std::optional<Expr> modular_triviality_witness(const VolumeForm& w, int degree_bound) const;

    /// Basis of polynomial Casimirs up to degree_bound (always contains 1).
    std::vector<Expr> casimir_scan(int degree_bound) const;

private:
    ChartPtr chart_;
    KVector p_;
    KVector pp_;
    JacobiStatus jacobi_ = JacobiStatus::Unknown;
};

/// All monomials of total degree <= bound as expressions (including 1),
/// ordered deterministically (graded-lex ascending).
std::vector<Expr> monomials_up_to(const ChartPtr& chart, int bound);

}  // namespace poissonkit
