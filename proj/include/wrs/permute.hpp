/*******************************************************************************
 * wrs/permute.hpp
 *
 * Weighted random permutation.  Every item draws an exponential key with
 * rate w_i; ascending keys give exactly the successive without-replacement
 * order.  Sorting the keys outright costs n log n comparisons, so keys are
 * first binned by b = floor(n * ln(key * n * w_max)): the transform is
 * monotone, bucket populations stay O(1) in expectation, and a counting sort
 * over the buckets followed by tiny exact sorts inside each bucket yields
 * the identical permutation in near-linear time.  Keys left of bucket 0 fall
 * into a front bucket, keys right of the last bucket into a back one; both
 * are rare (about one item each in expectation) and are exact-sorted anyway.
 * Degenerate weight ratios would make the bucket directory enormous, so
 * construction falls back to the plain sort when it outgrows 8 n ln n + 64.
 ******************************************************************************/

#pragma once

#include <wrs/parallel.hpp>
#include <wrs/rng.hpp>
#include <wrs/weights.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <vector>

namespace wrs {

struct permutation_stats {
    uint64_t buckets = 0;        // directory size (back bucket included)
    uint64_t clamped = 0;        // keys landing in the front/back buckets
    uint64_t max_bucket_load = 0;
    bool exact_fallback = false; // directory too large, used the plain sort
};

class Permuter {
public:
    explicit Permuter(const WeightTable& wt)
        : weights_(wt.data(), wt.data() + wt.size()), w_max_(wt.max_weight()) {
        const double n = static_cast<double>(weights_.size());
        const double u = wt.ratio();
        const double log_n = std::log(std::max(2.0, n));
        last_bucket_ = static_cast<int64_t>(
            std::ceil(n * std::log(std::max(2.0, n * u * log_n))));
        fallback_ = static_cast<double>(last_bucket_) > 8.0 * n * log_n + 64.0;
    }

    size_t size() const { return weights_.size(); }
    int64_t last_bucket() const { return last_bucket_; }
    bool uses_exact_sort() const { return fallback_; }

    // CDF of item i's bucket coordinate: P[f_i <= x] for the transformed key
    // f = n * ln(E * n * w_max), E ~ Exp(w_i).
    double bucket_cdf(size_t item, double x) const {
        const double n = static_cast<double>(weights_.size());
        return 1.0 -
               std::exp(-std::exp(x / n) * weights_[item] / (n * w_max_));
    }

    // Expected number of items landing in bucket b (front bucket: b == -1).
    double expected_occupancy(int64_t b) const {
        double occ = 0.0;
        for (size_t i = 0; i < weights_.size(); ++i) {
            const double hi = bucket_cdf(i, static_cast<double>(b + 1));
            const double lo =
                b == -1 ? 0.0 : bucket_cdf(i, static_cast<double>(b));
            occ += hi - lo;
        }
        return occ;
    }

    // Expected keys outside [0, last_bucket): the exact-sorted fringes.
    double expected_clamped() const {
        double c = 0.0;
        for (size_t i = 0; i < weights_.size(); ++i)
            c += bucket_cdf(i, 0.0) +
                 (1.0 - bucket_cdf(i, static_cast<double>(last_bucket_)));
        return c;
    }

    // The exponential keys the permutation ranks, drawn in fixed blocks so
    // the stream layout never depends on the worker count.
    std::vector<double> draw_keys(uint64_t seed, unsigned workers = 1) const {
        std::vector<double> key(weights_.size());
        RngStream base(seed, 0x7065726du);
        for_blocks(weights_.size(), kKeyBlock, std::max(1u, workers),
                   [&](size_t b, size_t lo, size_t hi) {
                       RngStream rng = base.derive(b);
                       for (size_t i = lo; i < hi; ++i)
                           key[i] = rng.exponential_key(weights_[i]);
                   });
        return key;
    }

    std::vector<uint32_t> permute(uint64_t seed, unsigned workers = 1,
                                  permutation_stats* stats = nullptr) const {
        workers = std::max(1u, workers);
        const size_t n = weights_.size();
        permutation_stats st;
        st.exact_fallback = fallback_;

        const std::vector<double> key = draw_keys(seed, workers);

        std::vector<uint32_t> order(n);
        const auto by_key = [&](uint32_t a, uint32_t b) {
            if (key[a] != key[b])
                return key[a] < key[b];
            return a < b;
        };

        if (fallback_) {
            for (size_t i = 0; i < n; ++i)
                order[i] = static_cast<uint32_t>(i);
            std::sort(order.begin(), order.end(), by_key);
            st.buckets = 0;
            if (stats)
                *stats = st;
            return order;
        }

        // Counting sort by bucket.  Cell c holds bucket c - 1, so the front
        // bucket is cell 0 and the back bucket the last cell.
        const double nd = static_cast<double>(n);
        const double shift = std::log(nd * w_max_);
        const size_t cells = static_cast<size_t>(last_bucket_) + 2;
        std::vector<uint32_t> bucket_of(n);
        for (size_t i = 0; i < n; ++i) {
            const double f = nd * (std::log(key[i]) + shift);
            int64_t b = f < 0.0 ? -1 : static_cast<int64_t>(f);
            if (b < 0 || b >= last_bucket_) {
                ++st.clamped;
                b = b < 0 ? -1 : last_bucket_;
            }
            bucket_of[i] = static_cast<uint32_t>(b + 1);
        }
        std::vector<uint32_t> start(cells + 1, 0);
        for (size_t i = 0; i < n; ++i)
            ++start[bucket_of[i] + 1];
        for (size_t c = 0; c < cells; ++c) {
            st.max_bucket_load = std::max<uint64_t>(st.max_bucket_load,
                                                    start[c + 1]);
            start[c + 1] += start[c];
        }
        {
            std::vector<uint32_t> cursor(start.begin(), start.end() - 1);
            for (size_t i = 0; i < n; ++i)
                order[cursor[bucket_of[i]]++] = static_cast<uint32_t>(i);
        }

        // Exact order inside each cell; cells are tiny on average.
        std::atomic<size_t> next{0};
        run_workers(workers, [&](unsigned) {
            for (size_t c = next.fetch_add(1); c < cells; c = next.fetch_add(1))
                std::sort(order.begin() + start[c], order.begin() + start[c + 1],
                          by_key);
        });

        st.buckets = cells;
        if (stats)
            *stats = st;
        return order;
    }

private:
    static constexpr size_t kKeyBlock = 4096;

    std::vector<double> weights_;
    double w_max_;
    int64_t last_bucket_ = 0;
    bool fallback_ = false;
};

} // namespace wrs
