/*******************************************************************************
 * wrs/weights.hpp
 *
 * Validated weight vector plus the aggregates every sampler needs: total
 * weight (pairwise-summed), min, max, and the skew ratio.
 ******************************************************************************/
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wrs {

//! Pairwise (cascade) summation; error grows with log n instead of n.
inline double pairwise_sum(const double* v, size_t n) {
    if (n <= 32) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i)
            s += v[i];
        return s;
    }
    size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

class WeightTable {
public:
    explicit WeightTable(std::vector<double> w) : w_(std::move(w)) {
        if (w_.empty())
            throw std::invalid_argument("weights: need at least one item");
        min_ = max_ = w_[0];
        for (size_t i = 0; i < w_.size(); ++i) {
            double x = w_[i];
            if (!std::isfinite(x) || x <= 0.0)
                throw std::invalid_argument(
                    "weights: item " + std::to_string(i) +
                    " is not finite and positive");
            min_ = x < min_ ? x : min_;
            max_ = x > max_ ? x : max_;
        }
        total_ = pairwise_sum(w_.data(), w_.size());
    }

    size_t size() const { return w_.size(); }
    const double* data() const { return w_.data(); }
    const std::vector<double>& values() const { return w_; }
    double operator[](size_t i) const { return w_[i]; }

    double total() const { return total_; }
    double min_weight() const { return min_; }
    double max_weight() const { return max_; }
    //! Skew ratio U = w_max / w_min.
    double ratio() const { return max_ / min_; }

private:
    std::vector<double> w_;
    double total_;
    double min_;
    double max_;
};

} // namespace wrs
