#include "poissonkit/expr.hpp"

#include <sstream>

namespace poissonkit {

Chart::Chart(std::vector<std::string> vars) : vars_(std::move(vars)) {
    for (size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].empty()) throw std::invalid_argument("empty variable name");
        for (size_t j = i + 1; j < vars_.size(); ++j) {
            if (vars_[i] == vars_[j]) throw std::invalid_argument("duplicate variable " + vars_[i]);
        }
    }
    // Basis symbols in the tensor grammar are "d<var>" and "@<var>"; a chart
    // where one variable equals "d" + another would make them ambiguous.
    for (const auto& a : vars_) {
        for (const auto& b : vars_) {
            if (a == "d" + b) {
                throw std::invalid_argument("variable '" + a + "' collides with basis symbol d" + b);
            }
        }
    }
}

int Chart::index_of(const std::string& name) const {
    for (size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name) return static_cast<int>(i);
    }
    return -1;
}

Expr::Expr(ChartPtr chart, Poly num, Poly den)
    : chart_(std::move(chart)), num_(std::move(num)), den_(std::move(den)) {
    normalize();
}

void Expr::normalize() {
    if (den_.is_zero()) throw std::domain_error("zero denominator");
    if (num_.is_zero()) {
        den_ = Poly::constant(chart_->dim(), 1);
        return;
    }
    if (!(den_.is_constant() && den_.leading_coeff() == 1)) {
        Poly g = poly_gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = divexact(num_, g);
            den_ = divexact(den_, g);
        }
        mpq_class lc = den_.leading_coeff();
        if (lc != 1) {
            mpq_class inv = mpq_class(1) / lc;
            num_ = num_.scaled(inv);
            den_ = den_.scaled(inv);
        }
    }
}

Expr Expr::zero(const ChartPtr& chart) {
    return Expr(chart, Poly::zero(chart->dim()), Poly::constant(chart->dim(), 1));
}

Expr Expr::one(const ChartPtr& chart) { return constant(chart, 1); }

Expr Expr::constant(const ChartPtr& chart, const mpq_class& c) {
    return Expr(chart, Poly::constant(chart->dim(), c), Poly::constant(chart->dim(), 1));
}

Expr Expr::variable(const ChartPtr& chart, int index) {
    return Expr(chart, Poly::variable(chart->dim(), index), Poly::constant(chart->dim(), 1));
}

Expr Expr::from_poly(const ChartPtr& chart, Poly p) {
    return Expr(chart, std::move(p), Poly::constant(chart->dim(), 1));
}

Expr Expr::fraction(const ChartPtr& chart, Poly num, Poly den) {
    return Expr(chart, std::move(num), std::move(den));
}

bool Expr::is_one() const { return num_.is_constant() && !num_.is_zero() && num_.leading_coeff() == 1 && den_.is_constant(); }

bool Expr::is_polynomial() const { return den_.is_constant(); }

std::optional<mpq_class> Expr::as_constant() const {
    if (num_.is_constant() && den_.is_constant()) return num_.constant_term();
    return std::nullopt;
}

Expr Expr::operator+(const Expr& o) const {
    require_same_chart(chart_, o.chart_);
    return Expr(chart_, num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Expr Expr::operator-(const Expr& o) const {
    require_same_chart(chart_, o.chart_);
    return Expr(chart_, num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

Expr Expr::operator*(const Expr& o) const {
    require_same_chart(chart_, o.chart_);
    return Expr(chart_, num_ * o.num_, den_ * o.den_);
}

Expr Expr::operator/(const Expr& o) const {
    require_same_chart(chart_, o.chart_);
    if (o.is_zero()) throw std::domain_error("division by zero expression");
    return Expr(chart_, num_ * o.den_, den_ * o.num_);
}

Expr Expr::operator-() const { return Expr(chart_, -num_, den_); }

Expr Expr::inverse() const {
    if (is_zero()) throw std::domain_error("inverse of zero expression");
    return Expr(chart_, den_, num_);
}

Expr Expr::pow(long e) const {
    if (e == 0) return one(chart_);
    bool inv = e < 0;
    unsigned long k = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    Expr r(chart_, num_.pow(static_cast<unsigned>(k)), den_.pow(static_cast<unsigned>(k)));
    return inv ? r.inverse() : r;
}

bool Expr::operator==(const Expr& o) const {
    require_same_chart(chart_, o.chart_);
    return num_ == o.num_ && den_ == o.den_;
}

Expr Expr::diff(int var) const {
    if (var < 0 || var >= chart_->dim()) throw std::invalid_argument("unknown variable index");
    Poly n = num_.derivative(var) * den_ - num_ * den_.derivative(var);
    return Expr(chart_, std::move(n), den_ * den_);
}

Expr Expr::diff(const std::string& var) const {
    int i = chart_->index_of(var);
    if (i < 0) throw std::invalid_argument("unknown variable " + var);
    return diff(i);
}

mpq_class Expr::eval(const Point& p) const {
    if (p.dim() != chart_->dim()) throw std::invalid_argument("point dimension mismatch");
    mpq_class d = den_.eval(p.coords);
    if (d == 0) throw PoleError("denominator vanishes at evaluation point");
    return num_.eval(p.coords) / d;
}

double Expr::eval_double(const std::vector<double>& p) const {
    if (static_cast<int>(p.size()) != chart_->dim()) {
        throw std::invalid_argument("point dimension mismatch");
    }
    double d = den_.eval_double(p);
    if (d == 0.0) throw PoleError("denominator vanishes at evaluation point");
    return num_.eval_double(p) / d;
}

std::string Expr::to_string() const {
    if (is_polynomial()) return num_.to_string(chart_->vars());
    std::ostringstream os;
    os << "(" << num_.to_string(chart_->vars()) << ")/(" << den_.to_string(chart_->vars()) << ")";
    return os.str();
}

Expr operator*(const mpq_class& c, const Expr& e) {
    return Expr::constant(e.chart(), c) * e;
}

}  // namespace poissonkit
