#include "poissonkit/sampling.hpp"

#include <algorithm>

namespace poissonkit {

Expr Sampler::polynomial(const ChartPtr& chart, int max_degree, int max_terms) {
    Poly p(chart->dim());
    const int terms = uniform(1, std::max(1, max_terms));
    for (int t = 0; t < terms; ++t) {
        Exponents e(static_cast<size_t>(chart->dim()), 0u);
        int deg = uniform(0, max_degree);
        for (int d = 0; d < deg; ++d) {
            e[static_cast<size_t>(uniform(0, chart->dim() - 1))] += 1;
        }
        p.add_term(e, uniform(-3, 3));
    }
    return Expr::from_poly(chart, p);
}

Expr Sampler::nonzero_polynomial(const ChartPtr& chart, int max_degree, int max_terms) {
    for (int tries = 0; tries < 64; ++tries) {
        Expr e = polynomial(chart, max_degree, max_terms);
        if (!e.is_zero()) return e;
    }
    return Expr::one(chart);
}

KVector Sampler::kvector(const ChartPtr& chart, int grade, int max_degree) {
    grade = std::min(grade, chart->dim());
    if (grade == 0) return KVector::scalar(chart, polynomial(chart, max_degree));
    KVector v(chart, grade);
    const int terms = uniform(1, 2);
    for (int t = 0; t < terms; ++t) {
        std::vector<int> pool(static_cast<size_t>(chart->dim()));
        for (int i = 0; i < chart->dim(); ++i) pool[static_cast<size_t>(i)] = i;
        std::shuffle(pool.begin(), pool.end(), rng_);
        Indices idx(pool.begin(), pool.begin() + grade);
        v.add_term(idx, polynomial(chart, max_degree));
    }
    return v;
}

KForm Sampler::kform(const ChartPtr& chart, int grade, int max_degree) {
    grade = std::min(grade, chart->dim());
    if (grade == 0) return KForm::scalar(chart, polynomial(chart, max_degree));
    KForm v(chart, grade);
    const int terms = uniform(1, 2);
    for (int t = 0; t < terms; ++t) {
        std::vector<int> pool(static_cast<size_t>(chart->dim()));
        for (int i = 0; i < chart->dim(); ++i) pool[static_cast<size_t>(i)] = i;
        std::shuffle(pool.begin(), pool.end(), rng_);
        Indices idx(pool.begin(), pool.begin() + grade);
        v.add_term(idx, polynomial(chart, max_degree));
    }
    return v;
}

}  // namespace poissonkit
