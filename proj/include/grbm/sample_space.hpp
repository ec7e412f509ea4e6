#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace grbm {

/// Finite alphabet of the discrete hidden units. Values must be finite and
/// strictly distinct; insertion order is preserved.
class SampleSpace {
public:
    explicit SampleSpace(std::vector<double> values) : values_(std::move(values))
    {
        if (values_.empty())
            throw std::invalid_argument("SampleSpace: empty value set");
        for (double v : values_) {
            if (!std::isfinite(v))
                throw std::invalid_argument("SampleSpace: non-finite value");
        }
        for (std::size_t a = 0; a < values_.size(); ++a)
            for (std::size_t b = a + 1; b < values_.size(); ++b)
                if (values_[a] == values_[b])
                    throw std::invalid_argument("SampleSpace: duplicate value " +
                                                std::to_string(values_[a]));
        min_ = max_ = values_[0];
        for (double v : values_) {
            min_ = std::min(min_, v);
            max_ = std::max(max_, v);
            max_abs_ = std::max(max_abs_, std::abs(v));
            max_sq_ = std::max(max_sq_, v * v);
        }
    }

    /// The two-state alphabet {-1, +1}.
    static SampleSpace binary() { return SampleSpace({-1.0, +1.0}); }

    /// The three-state alphabet {-1, 0, +1}.
    static SampleSpace ternary() { return SampleSpace({-1.0, 0.0, +1.0}); }

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    double min() const { return min_; }
    double max() const { return max_; }
    double max_abs() const { return max_abs_; }
    double max_sq() const { return max_sq_; }

    bool contains(double v) const
    {
        for (double x : values_)
            if (x == v)
                return true;
        return false;
    }

    bool operator==(const SampleSpace& other) const { return values_ == other.values_; }

private:
    std::vector<double> values_;
    double min_ = 0.0;
    double max_ = 0.0;
    double max_abs_ = 0.0;
    double max_sq_ = 0.0;
};

} // namespace grbm
