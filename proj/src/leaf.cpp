#include "poissonkit/leaf.hpp"

#include "poissonkit/linalg.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace poissonkit {

namespace {

double pfaffian(Eigen::MatrixXd a) {
    const long n = a.rows();
    if (n % 2 != 0) return 0.0;
    if (n == 0) return 1.0;
    if (n == 2) return a(0, 1);
    // expansion along the first row
    double acc = 0.0;
    for (long j = 1; j < n; ++j) {
        if (a(0, j) == 0.0) continue;
        Eigen::MatrixXd minor(n - 2, n - 2);
        long ri = 0;
        for (long r = 1; r < n; ++r) {
            if (r == j) continue;
            long ci = 0;
            for (long c = 1; c < n; ++c) {
                if (c == j) continue;
                minor(ri, ci++) = a(r, c);
            }
            ++ri;
        }
        double sign = (j % 2 == 1) ? 1.0 : -1.0;  // (-1)^{j+1} with 1-based j
        acc += sign * a(0, j) * pfaffian(minor);
    }
    return acc;
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

Eigen::MatrixXd bivector_matrix_at(const PoissonStructure& ps, const std::vector<double>& x) {
    const int n = ps.dim();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [idx, c] : ps.bivector().coeffs()) {
        double v = c.eval_double(x);
        m(idx[0], idx[1]) = v;
        m(idx[1], idx[0]) = -v;
    }
    return m;
}

int svd_rank(const Eigen::MatrixXd& m, double tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    if (svd.singularValues().size() == 0) return 0;
    double top = svd.singularValues()(0);
    if (top == 0.0) return 0;
    int r = 0;
    for (long i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > tol * top) ++r;
    }
    return r;
}

double lstsq_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd sol = a.completeOrthogonalDecomposition().solve(b);
    return (a * sol - b).norm();
}

}  // namespace

const Point& Leaf::point_coords() const {
    if (!is_point_) throw std::logic_error("not a point leaf");
    return x0_;
}

Leaf Leaf::point(const PoissonStructure& ps, Point x0) {
    if (x0.dim() != ps.dim()) throw std::invalid_argument("point dimension mismatch");
    for (const auto& [idx, c] : ps.bivector().coeffs()) {
        (void)idx;
        if (c.eval(x0) != 0) {
            throw std::invalid_argument("bivector does not vanish at the point: not a rank-0 leaf");
        }
    }
    Leaf leaf;
    leaf.ps_ = ps;
    leaf.is_point_ = true;
    leaf.x0_ = std::move(x0);
    leaf.leaf_dim_ = 0;
    return leaf;
}

Leaf::NodeData Leaf::node_at(size_t chart_idx, const std::vector<double>& param) const {
    const LeafChart& lc = charts_.at(chart_idx);
    const int n = ambient_dim();
    const int m = leaf_dim_;
    NodeData nd;
    nd.param = param;
    nd.x.resize(static_cast<size_t>(n));
    nd.jacobian = Eigen::MatrixXd(n, m);
    for (int j = 0; j < n; ++j) {
        nd.x[static_cast<size_t>(j)] = lc.map[static_cast<size_t>(j)].eval_double(param);
        for (int a = 0; a < m; ++a) {
            nd.jacobian(j, a) = lc.map[static_cast<size_t>(j)].diff(a).eval_double(param);
        }
    }
    nd.pmat = bivector_matrix_at(ps_, nd.x);
    nd.omega = leaf_symplectic_form_impl(nd);
    nd.density = factorial(m / 2) * pfaffian(nd.omega);
    return nd;
}

Eigen::MatrixXd Leaf::leaf_symplectic_form_impl(const NodeData& nd) const {
    const int m = leaf_dim_;
    Eigen::MatrixXd w(m, m);
    auto cod = nd.pmat.completeOrthogonalDecomposition();
    std::vector<Eigen::VectorXd> betas(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd u = nd.jacobian.col(i);
        Eigen::VectorXd beta = cod.solve(u);
        double res = (nd.pmat * beta - u).norm();
        if (res > tol_ * std::max(1.0, u.norm())) {
            std::ostringstream os;
            os << "node off-leaf: tangent vector not in the image of P-sharp (residual " << res
               << ")";
            throw std::runtime_error(os.str());
        }
        betas[static_cast<size_t>(i)] = beta;
    }
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) w(i, j) = betas[static_cast<size_t>(i)].dot(nd.jacobian.col(j));
    }
    return 0.5 * (w - w.transpose());
}

Leaf Leaf::parameterized(const PoissonStructure& ps, std::vector<LeafChart> charts,
                         std::vector<Expr> ambient_casimirs, int quadrature_order,
                         double tolerance) {
    if (charts.empty()) throw std::invalid_argument("parameterized leaf needs at least one chart");
    Leaf leaf;
    leaf.ps_ = ps;
    leaf.is_point_ = false;
    leaf.tol_ = tolerance;
    leaf.order_ = quadrature_order;
    leaf.leaf_dim_ = charts.front().params->dim();
    if (leaf.leaf_dim_ <= 0 || leaf.leaf_dim_ % 2 != 0 || leaf.leaf_dim_ > ps.dim()) {
        throw std::invalid_argument("leaf dimension must be even and at most the ambient dimension");
    }
    for (const auto& lc : charts) {
        if (lc.params->dim() != leaf.leaf_dim_) {
            throw std::invalid_argument("all charts must share the parameter count");
        }
        if (static_cast<int>(lc.map.size()) != ps.dim()) {
            throw std::invalid_argument("chart map must have one component per ambient coordinate");
        }
        if (static_cast<int>(lc.box.size()) != leaf.leaf_dim_) {
            throw std::invalid_argument("chart box dimension mismatch");
        }
    }
    leaf.charts_ = std::move(charts);
    leaf.casimirs_ = ambient_casimirs;

    const int m = leaf.leaf_dim_;
    std::optional<std::vector<double>> casimir_ref;
    for (size_t ci = 0; ci < leaf.charts_.size(); ++ci) {
        ProductRule rule = product_rule(leaf.charts_[ci].box, quadrature_order);
        std::vector<NodeData> nodes;
        nodes.reserve(rule.nodes.size());
        int orientation = 0;
        for (size_t k = 0; k < rule.nodes.size(); ++k) {
            NodeData nd = leaf.node_at(ci, rule.nodes[k]);
            nd.weight = rule.weights[k];
            if (svd_rank(nd.jacobian, 1e-10) != m) {
                throw std::runtime_error("chart Jacobian rank-deficient at quadrature node");
            }
            // image of P-sharp must coincide with the chart tangent space
            if (svd_rank(nd.pmat, 1e-10) != m) {
                throw std::runtime_error("bivector rank differs from leaf dimension at node");
            }
            for (int col = 0; col < nd.pmat.cols(); ++col) {
                Eigen::VectorXd pc = nd.pmat.col(col);
                if (pc.norm() == 0.0) continue;
                double res = lstsq_residual(nd.jacobian, pc);
                if (res > leaf.tol_ * std::max(1.0, pc.norm())) {
                    throw std::runtime_error("image of P-sharp leaves the chart tangent space");
                }
            }
            if (nd.density == 0.0) throw std::runtime_error("degenerate leaf density at node");
            int s = nd.density > 0 ? 1 : -1;
            if (orientation == 0) {
                orientation = s;
            } else if (orientation != s) {
                throw std::runtime_error("chart orientation flips across nodes");
            }
            // declared Casimir constraints must be constant across the leaf
            std::vector<double> cas(ambient_casimirs.size());
            for (size_t q = 0; q < ambient_casimirs.size(); ++q) {
                cas[q] = ambient_casimirs[q].eval_double(nd.x);
            }
            if (!casimir_ref) {
                casimir_ref = cas;
            } else {
                for (size_t q = 0; q < cas.size(); ++q) {
                    double scale = std::max(1.0, std::abs((*casimir_ref)[q]));
                    if (std::abs(cas[q] - (*casimir_ref)[q]) > leaf.tol_ * scale) {
                        throw std::runtime_error("declared Casimir is not constant on the leaf");
                    }
                }
            }
            nodes.push_back(std::move(nd));
        }
        leaf.nodes_.push_back(std::move(nodes));
        leaf.orientations_.push_back(orientation);
    }
    return leaf;
}

double Leaf::integrate(const Expr& f) const {
    if (is_point_) {
        Point p = x0_;
        mpq_class v = f.eval(p);
        return v.get_d();
    }
    double acc = 0.0;
    for (size_t ci = 0; ci < nodes_.size(); ++ci) {
        double chart_acc = 0.0;
        for (const NodeData& nd : nodes_[ci]) {
            chart_acc += nd.weight * f.eval_double(nd.x) * nd.density;
        }
        acc += orientations_[ci] * chart_acc;
    }
    return acc;
}

double Leaf::integrate_abs(const Expr& f) const {
    if (is_point_) {
        Point p = x0_;
        return std::abs(f.eval(p).get_d());
    }
    double acc = 0.0;
    for (const auto& chart_nodes : nodes_) {
        for (const NodeData& nd : chart_nodes) {
            acc += std::abs(nd.weight * f.eval_double(nd.x) * nd.density);
        }
    }
    return acc;
}

double Leaf::integrate(const Expr& f, int order) const {
    if (is_point_) return integrate(f);
    double acc = 0.0;
    for (size_t ci = 0; ci < charts_.size(); ++ci) {
        ProductRule rule = product_rule(charts_[ci].box, order);
        double chart_acc = 0.0;
        int orientation = orientations_[ci];
        for (size_t k = 0; k < rule.nodes.size(); ++k) {
            NodeData nd = node_at(ci, rule.nodes[k]);
            chart_acc += rule.weights[k] * f.eval_double(nd.x) * nd.density;
        }
        acc += orientation * chart_acc;
    }
    return acc;
}

bool Leaf::class_is_zero(const std::map<Indices, double>& coeffs, int grade,
                         const NodeData& node) const {
    const int n = ambient_dim();
    // flatten coefficients over increasing multi-indices of length `grade`
    std::vector<Indices> basis;
    {
        std::function<void(int, Indices&)> rec = [&](int start, Indices& cur) {
            if (static_cast<int>(cur.size()) == grade) {
                basis.push_back(cur);
                return;
            }
            for (int v = start; v < n; ++v) {
                cur.push_back(v);
                rec(v + 1, cur);
                cur.pop_back();
            }
        };
        Indices cur;
        rec(0, cur);
    }
    Eigen::VectorXd vec = Eigen::VectorXd::Zero(static_cast<long>(basis.size()));
    std::map<Indices, long> pos;
    for (size_t i = 0; i < basis.size(); ++i) pos[basis[i]] = static_cast<long>(i);
    for (const auto& [idx, v] : coeffs) vec(pos.at(idx)) = v;

    if (is_point_ || grade == 0) {
        return vec.lpNorm<Eigen::Infinity>() <= tol_;
    }
    // generators of T(N) ^ Lambda^{grade-1} in the coefficient space
    std::vector<Eigen::VectorXd> gens;
    std::vector<Indices> sub;
    {
        std::function<void(int, Indices&)> rec = [&](int start, Indices& cur) {
            if (static_cast<int>(cur.size()) == grade - 1) {
                sub.push_back(cur);
                return;
            }
            for (int v = start; v < n; ++v) {
                cur.push_back(v);
                rec(v + 1, cur);
                cur.pop_back();
            }
        };
        Indices cur;
        rec(0, cur);
    }
    for (int a = 0; a < leaf_dim_; ++a) {
        Eigen::VectorXd t = node.jacobian.col(a);
        for (const Indices& w : sub) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<long>(basis.size()));
            for (int v = 0; v < n; ++v) {
                if (t(v) == 0.0) continue;
                Indices merged;
                int sign;
                if (!detail::merge_indices({v}, w, merged, sign)) continue;
                g(pos.at(merged)) += sign * t(v);
            }
            if (g.norm() > 0) gens.push_back(std::move(g));
        }
    }
    if (gens.empty()) return vec.lpNorm<Eigen::Infinity>() <= tol_;
    Eigen::MatrixXd gmat(static_cast<long>(basis.size()), static_cast<long>(gens.size()));
    for (size_t c = 0; c < gens.size(); ++c) gmat.col(static_cast<long>(c)) = gens[c];
    double res = lstsq_residual(gmat, vec);
    return res <= tol_ * std::max(1.0, vec.norm());
}

// --- Bott connection at point leaves ---------------------------------------

namespace {

void require_point_leaf(const PoissonStructure& ps, const Point& x0) {
    for (const auto& [idx, c] : ps.bivector().coeffs()) {
        (void)idx;
        if (c.eval(x0) != 0) throw std::invalid_argument("not a point leaf: P(x0) != 0");
    }
}

void require_extension_matches(const Expr& f, const Point& x0,
                               const std::vector<mpq_class>& alpha) {
    const ChartPtr& ch = f.chart();
    for (int j = 0; j < ch->dim(); ++j) {
        if (f.diff(j).eval(x0) != alpha[static_cast<size_t>(j)]) {
            throw std::invalid_argument("df(x0) does not equal the requested covector");
        }
    }
}

KVector constant_field(const ChartPtr& ch, const std::vector<mpq_class>& v) {
    KVector k(ch, 1);
    for (int j = 0; j < ch->dim(); ++j) {
        const mpq_class& c = v[static_cast<size_t>(j)];
        if (c != 0) k.add_term({j}, Expr::constant(ch, c));
    }
    return k;
}

std::vector<mpq_class> eval_vector(const KVector& v, const Point& x0, int n) {
    std::vector<mpq_class> out(static_cast<size_t>(n), mpq_class(0));
    for (const auto& [idx, c] : v.coeffs()) out[static_cast<size_t>(idx[0])] = c.eval(x0);
    return out;
}

}  // namespace

std::vector<mpq_class> bott_derivative_point(const PoissonStructure& ps, const Point& x0,
                                             const std::vector<mpq_class>& alpha,
                                             const std::vector<mpq_class>& v, const Expr& f_ext) {
    require_point_leaf(ps, x0);
    require_extension_matches(f_ext, x0, alpha);
    KVector xf = ps.hamiltonian_field(f_ext);
    KVector vbar = constant_field(ps.chart(), v);
    KVector br = schouten(xf, vbar);
    return eval_vector(br, x0, ps.dim());
}

std::vector<std::vector<mpq_class>> bott_flat_sections_point(const PoissonStructure& ps,
                                                             const Point& x0) {
    require_point_leaf(ps, x0);
    const int n = ps.dim();
    // rows: (covector i, output component j); columns: input basis vector b
    Matrix<mpq_class> rows;
    for (int i = 0; i < n; ++i) {
        KVector xi = ps.hamiltonian_field(Expr::variable(ps.chart(), i));
        std::vector<std::vector<mpq_class>> cols;
        for (int b = 0; b < n; ++b) {
            std::vector<mpq_class> e(static_cast<size_t>(n), mpq_class(0));
            e[static_cast<size_t>(b)] = 1;
            cols.push_back(eval_vector(schouten(xi, constant_field(ps.chart(), e)), x0, n));
        }
        for (int j = 0; j < n; ++j) {
            std::vector<mpq_class> row(static_cast<size_t>(n));
            for (int b = 0; b < n; ++b) row[static_cast<size_t>(b)] = cols[static_cast<size_t>(b)][static_cast<size_t>(j)];
            rows.push_back(std::move(row));
        }
    }
    return nullspace(rows, mpq_class(0), mpq_class(1));
}

std::map<Indices, mpq_class> bott_derivative_multi_point(const PoissonStructure& ps,
                                                         const Point& x0, const Expr& f_ext,
                                                         const KVector& u_ext) {
    require_point_leaf(ps, x0);
    KVector xf = ps.hamiltonian_field(f_ext);
    KVector br = schouten(xf, u_ext);
    std::map<Indices, mpq_class> out;
    for (const auto& [idx, c] : br.coeffs()) {
        mpq_class v = c.eval(x0);
        if (v != 0) out.emplace(idx, std::move(v));
    }
    return out;
}

Eigen::MatrixXd leaf_symplectic_form(const Leaf& leaf, const Leaf::NodeData& node,
                                     double* worst_consistency_residual) {
    Eigen::MatrixXd w = node.omega;
    if (worst_consistency_residual) {
        // omega_N(X_f, X_g) = {f,g} for coordinate functions at the node
        const int n = leaf.ambient_dim();
        double worst = 0.0;
        auto cod = node.jacobian.completeOrthogonalDecomposition();
        std::vector<Eigen::VectorXd> xi(static_cast<size_t>(n));
        for (int a = 0; a < n; ++a) {
            Eigen::VectorXd xa = node.pmat.col(a);
            xi[static_cast<size_t>(a)] = cod.solve(xa);
        }
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                double lhs = xi[static_cast<size_t>(a)].dot(w * xi[static_cast<size_t>(b)]);
                worst = std::max(worst, std::abs(lhs - node.pmat(a, b)));
            }
        }
        *worst_consistency_residual = worst;
    }
    return w;
}

FlatSectionReport flat_section_correspondence_check(const PoissonStructure& ps, const Leaf& leaf,
                                                    const KVector& x, int degree_bound) {
    FlatSectionReport rep;
    rep.condition1 = true;
    rep.flat = true;
    const ChartPtr& ch = ps.chart();
    auto x_of = [&](const Expr& f) {
        KForm df = exterior_derivative(KForm::scalar(ch, f));
        return contract_or_zero(x, df).coeff({});
    };
    std::vector<Expr> mons = monomials_up_to(ch, degree_bound);
    for (const Expr& f : mons) {
        for (const Expr& g : mons) {
            Expr lhs = x_of(ps.bracket(f, g));
            Expr rhs = ps.bracket(x_of(f), g) + ps.bracket(f, x_of(g));
            Expr v = lhs - rhs;
            if (v.is_zero()) continue;
            if (leaf.is_point()) {
                mpq_class val = v.eval(leaf.point_coords());
                if (val != 0) {
                    rep.condition1 = false;
                    rep.worst_residual = std::max(rep.worst_residual, std::abs(val.get_d()));
                    if (rep.violating_pair.empty()) {
                        rep.violating_pair = f.to_string() + " , " + g.to_string();
                    }
                }
            } else {
                for (const auto& chart_nodes : leaf.nodes()) {
                    for (const auto& nd : chart_nodes) {
                        double val = v.eval_double(nd.x);
                        if (std::abs(val) > leaf.tolerance()) {
                            rep.condition1 = false;
                            rep.worst_residual = std::max(rep.worst_residual, std::abs(val));
                            if (rep.violating_pair.empty()) {
                                rep.violating_pair = f.to_string() + " , " + g.to_string();
                            }
                        }
                    }
                }
            }
        }
    }
    // flatness of the transversal class: nabla_{dx_i}(rho(X)) = 0
    for (int i = 0; i < ch->dim(); ++i) {
        KVector xi = ps.hamiltonian_field(Expr::variable(ch, i));
        KVector br = schouten(xi, x);
        if (leaf.is_point()) {
            for (const auto& [idx, c] : br.coeffs()) {
                (void)idx;
                mpq_class val = c.eval(leaf.point_coords());
                if (val != 0) {
                    rep.flat = false;
                    rep.worst_residual = std::max(rep.worst_residual, std::abs(val.get_d()));
                }
            }
        } else {
            for (const auto& chart_nodes : leaf.nodes()) {
                for (const auto& nd : chart_nodes) {
                    if (!leaf.class_is_zero(br.eval_double(nd.x), 1, nd)) rep.flat = false;
                }
            }
        }
    }
    return rep;
}

}  // namespace poissonkit
