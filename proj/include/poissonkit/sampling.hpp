#pragma once

#include "poissonkit/multivector.hpp"

#include <random>

namespace poissonkit {

/// Deterministic generator of random polynomials, multivectors and forms for
/// the randomized identity suites. Seeded explicitly so reports and tests are
/// reproducible.
class Sampler {
public:
    explicit Sampler(uint64_t seed) : rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    /// Sparse polynomial of total degree <= max_degree with small integer
    /// coefficients (possibly zero).
    Expr polynomial(const ChartPtr& chart, int max_degree = 2, int max_terms = 3);
    /// Nonzero variant.
    Expr nonzero_polynomial(const ChartPtr& chart, int max_degree = 2, int max_terms = 3);

    KVector kvector(const ChartPtr& chart, int grade, int max_degree = 2);
    KForm kform(const ChartPtr& chart, int grade, int max_degree = 2);

private:
    std::mt19937_64 rng_;
};

}  // namespace poissonkit
