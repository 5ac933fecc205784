#include "poissonkit/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace poissonkit {

namespace {

GaussLegendre compute_rule(int n) {
    GaussLegendre rule;
    rule.nodes.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));
    // Newton iteration from the Chebyshev-based initial guess.
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p0 = 0.0, p1 = 0.0;
        auto eval_legendre = [&](double t) {
            p0 = 1.0;
            p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
        };
        for (int iter = 0; iter < 100; ++iter) {
            eval_legendre(x);
            double dp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        eval_legendre(x);
        double dp = n * (x * p0 - p1) / (x * x - 1.0);
        rule.nodes[static_cast<size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
    if (n < 1 || n > 200) throw std::invalid_argument("Gauss-Legendre order out of range");
    static std::map<int, GaussLegendre> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

ProductRule product_rule(const std::vector<std::pair<double, double>>& box, int order) {
    ProductRule out;
    const size_t d = box.size();
    const GaussLegendre& g = gauss_legendre(order);
    const size_t n = g.nodes.size();
    size_t total = 1;
    for (size_t k = 0; k < d; ++k) total *= n;
    out.nodes.reserve(total);
    out.weights.reserve(total);
    std::vector<size_t> idx(d, 0);
    while (true) {
        std::vector<double> pt(d);
        double w = 1.0;
        for (size_t k = 0; k < d; ++k) {
            double a = box[k].first, b = box[k].second;
            pt[k] = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[idx[k]];
            w *= 0.5 * (b - a) * g.weights[idx[k]];
        }
        out.nodes.push_back(std::move(pt));
        out.weights.push_back(w);
        size_t k = 0;
        while (k < d && ++idx[k] == n) {
            idx[k] = 0;
            ++k;
        }
        if (k == d) break;
    }
    return out;
}

}  // namespace poissonkit
