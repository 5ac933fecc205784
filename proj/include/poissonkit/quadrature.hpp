#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace poissonkit {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussLegendre& gauss_legendre(int n);

/// Tensor-product Gauss-Legendre rule over a box; node ordering is the
/// lexicographic sweep of the per-axis rules, so results are reproducible.
struct ProductRule {
    std::vector<std::vector<double>> nodes;  // each of size box.size()
    std::vector<double> weights;
};

ProductRule product_rule(const std::vector<std::pair<double, double>>& box, int order);

}  // namespace poissonkit
