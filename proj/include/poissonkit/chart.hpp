#pragma once

#include <gmpxx.h>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace poissonkit {

/// Ordered list of coordinate names for one chart. All expressions, tensors
/// and Poisson structures refer to a chart; two objects interoperate only if
/// their charts compare equal (same names, same order).
class Chart {
public:
    explicit Chart(std::vector<std::string> vars);

    int dim() const { return static_cast<int>(vars_.size()); }
    const std::vector<std::string>& vars() const { return vars_; }
    const std::string& var(int i) const { return vars_.at(static_cast<size_t>(i)); }

    /// Index of a variable name, or -1 if not declared.
    int index_of(const std::string& name) const;

    bool operator==(const Chart& other) const { return vars_ == other.vars_; }
    bool operator!=(const Chart& other) const { return !(*this == other); }

private:
    std::vector<std::string> vars_;
};

using ChartPtr = std::shared_ptr<const Chart>;

inline ChartPtr make_chart(std::vector<std::string> vars) {
    return std::make_shared<const Chart>(std::move(vars));
}

inline void require_same_chart(const ChartPtr& a, const ChartPtr& b) {
    if (a == b) return;
    if (!a || !b || *a != *b) throw std::invalid_argument("chart mismatch");
}

/// A point of a chart: exact rational coordinates.
struct Point {
    std::vector<mpq_class> coords;

    Point() = default;
    explicit Point(std::vector<mpq_class> c) : coords(std::move(c)) {}

    int dim() const { return static_cast<int>(coords.size()); }
    const mpq_class& operator[](size_t i) const { return coords[i]; }
};

}  // namespace poissonkit
