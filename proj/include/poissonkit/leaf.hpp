#pragma once

#include "poissonkit/poisson.hpp"
#include "poissonkit/quadrature.hpp"

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace poissonkit {

/// One parameterization patch of a leaf: a box in parameter space and the
/// ambient coordinate map, given as rational expressions in the parameters.
struct LeafChart {
    ChartPtr params;
    std::vector<std::pair<double, double>> box;
    std::vector<Expr> map;  ///< one component per ambient coordinate
};

/// A symplectic leaf: either a single point where the bivector vanishes, or
/// a parameterized compact leaf carrying its quadrature rule. Parameterized
/// leaves are validated at every quadrature node (full-rank chart Jacobian,
/// tangent space equal to the image of P-sharp, declared Casimirs constant);
/// floating point enters only there, point leaves stay exact.
class Leaf {
public:
    struct NodeData {
        std::vector<double> param;
        double weight = 0.0;
        std::vector<double> x;
        Eigen::MatrixXd jacobian;  // n x 2k
        Eigen::MatrixXd pmat;      // n x n, entries P(dx_a, dx_b)
        Eigen::MatrixXd omega;     // 2k x 2k pulled-back leaf symplectic form
        double density = 0.0;      // evaluation of omega^k on the chart frame
    };

    static Leaf point(const PoissonStructure& ps, Point x0);
    static Leaf parameterized(const PoissonStructure& ps, std::vector<LeafChart> charts,
                              std::vector<Expr> ambient_casimirs, int quadrature_order,
                              double tolerance);

    bool is_point() const { return is_point_; }
    const Point& point_coords() const;
    int ambient_dim() const { return ps_.dim(); }
    int leaf_dim() const { return leaf_dim_; }
    int quadrature_order() const { return order_; }
    double tolerance() const { return tol_; }
    const PoissonStructure& structure() const { return ps_; }
    const std::vector<LeafChart>& charts() const { return charts_; }
    const std::vector<std::vector<NodeData>>& nodes() const { return nodes_; }
    /// Orientation factor per chart making the omega^k density positive, so
    /// integrals use the canonical symplectic orientation of the leaf.
    const std::vector<int>& orientations() const { return orientations_; }

    /// Node data recomputed at an arbitrary parameter point of a chart.
    NodeData node_at(size_t chart_idx, const std::vector<double>& param) const;

    /// Integral of f over the leaf against omega^k (point leaf: f(x0) as a
    /// double; exact pairing for point leaves lives in the distribution
    /// module).
    double integrate(const Expr& f) const;
    /// Same integral at a different quadrature order (refinement estimate).
    double integrate(const Expr& f, int order) const;
    /// Quadrature of |f * density|; the scale used for relative residuals.
    double integrate_abs(const Expr& f) const;

    const std::vector<Expr>& ambient_casimirs() const { return casimirs_; }

    /// Whether an ambient m-vector (coefficients on increasing multi-indices)
    /// lies in the ideal T(N) ^ Lambda^{m-1} at the given node, within the
    /// rank tolerance. For grade 0 this is plain vanishing.
    bool class_is_zero(const std::map<Indices, double>& coeffs, int grade,
                       const NodeData& node) const;

private:
    Leaf() = default;
    Eigen::MatrixXd leaf_symplectic_form_impl(const NodeData& nd) const;

    PoissonStructure ps_{nullptr, KVector()};
    bool is_point_ = true;
    Point x0_;
    int leaf_dim_ = 0;
    int order_ = 0;
    double tol_ = 1e-9;
    std::vector<LeafChart> charts_;
    std::vector<Expr> casimirs_;
    std::vector<std::vector<NodeData>> nodes_;
    std::vector<int> orientations_;
};

using LeafPtr = std::shared_ptr<const Leaf>;

// --- Bott connection at point leaves (exact) -------------------------------

/// Covariant derivative nabla_alpha(V) = [X^1_f, Vbar]|_{x0} for a point
/// leaf, with Vbar the constant extension of V. Checks df(x0) = alpha.
std::vector<mpq_class> bott_derivative_point(const PoissonStructure& ps, const Point& x0,
                                             const std::vector<mpq_class>& alpha,
                                             const std::vector<mpq_class>& v, const Expr& f_ext);

/// Basis of { V : nabla_alpha(V) = 0 for all covectors alpha } at a point
/// leaf, solved exactly.
std::vector<std::vector<mpq_class>> bott_flat_sections_point(const PoissonStructure& ps,
                                                             const Point& x0);

/// Extension of the Bott derivative to transversal multivectors at a point
/// leaf: evaluates [X^1_{f}, U_ext] at x0. The caller supplies the ambient
/// extension U_ext; its value at x0 is the class being derived.
std::map<Indices, mpq_class> bott_derivative_multi_point(const PoissonStructure& ps,
                                                         const Point& x0, const Expr& f_ext,
                                                         const KVector& u_ext);

/// Pulled-back symplectic form at a node: omega_N(u_i, u_j) = <beta_i, u_j>
/// where P-sharp beta_i = u_i (least squares within the image of P-sharp).
/// Also verifies omega_N(X_f, X_g) = {f,g} for coordinate functions.
Eigen::MatrixXd leaf_symplectic_form(const Leaf& leaf, const Leaf::NodeData& node,
                                     double* worst_consistency_residual = nullptr);

struct FlatSectionReport {
    bool condition1 = false;      ///< X{f,g} = {Xf, g}|_N + {f, Xg}|_N on tested pairs
    bool flat = false;            ///< nabla_{dx_i}(rho(X)) = 0 at tested points
    double worst_residual = 0.0;  ///< largest violation seen across both checks
    std::string violating_pair;
};

/// Tests the two equivalent conditions of the flat-section correspondence on
/// coordinate monomials up to degree_bound (exact at point leaves, node-wise
/// within tolerance at parameterized leaves).
FlatSectionReport flat_section_correspondence_check(const PoissonStructure& ps, const Leaf& leaf,
                                                    const KVector& x, int degree_bound);

}  // namespace poissonkit
