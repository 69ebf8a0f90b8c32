/*******************************************************************************
 * wrs/subset.hpp
 *
 * Subset (Poisson) sampling: every item joins the sample independently with
 * probability w_i, so here the weights must be probabilities in (0, 1].
 * Scanning all n items wastes time when inclusion is rare; instead items are
 * binned by probability octave and each bin is walked with geometric skips
 * sized for the bin's largest probability, accepting landed items with
 * w / w_bin_max >= 1/2.  Expected work is proportional to the output plus
 * the bin count, not to n.  Bins scan in fixed-size segments, each with its
 * own derived stream; the Bernoulli process is independent across positions,
 * so restarting the skip chain at segment boundaries leaves the distribution
 * untouched and makes the output a pure function of the seed, regardless of
 * worker count.
 ******************************************************************************/

#pragma once

#include <wrs/parallel.hpp>
#include <wrs/rng.hpp>
#include <wrs/weights.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace wrs {

class SubsetSampler {
public:
    explicit SubsetSampler(const WeightTable& wt) : n_(wt.size()) {
        for (size_t i = 0; i < n_; ++i)
            if (wt[i] > 1.0)
                throw std::invalid_argument(
                    "subset sampling needs inclusion probabilities in (0, 1]");

        // Bucket by octave: b = clamp(-exponent, 0, L) puts (1/2, 1] into
        // bucket 0 and halves the range per bucket; everything at or below
        // 2^-L pools in the last bucket, whose total expected yield is <= 1.
        levels_ = n_ > 1 ? static_cast<size_t>(std::bit_width(n_ - 1)) : 0;
        std::vector<size_t> bucket_of(n_);
        std::vector<uint32_t> count(levels_ + 1, 0);
        for (size_t i = 0; i < n_; ++i) {
            int e = 0;
            (void)std::frexp(wt[i], &e);
            const size_t b = static_cast<size_t>(
                std::clamp<int>(-e, 0, static_cast<int>(levels_)));
            bucket_of[i] = b;
            ++count[b];
        }
        start_.assign(levels_ + 2, 0);
        for (size_t b = 0; b <= levels_; ++b)
            start_[b + 1] = start_[b] + count[b];
        items_.resize(n_);
        prob_.resize(n_);
        bucket_max_.assign(levels_ + 1, 0.0);
        {
            std::vector<uint32_t> cursor(start_.begin(), start_.end() - 1);
            for (size_t i = 0; i < n_; ++i) {
                const size_t b = bucket_of[i];
                const uint32_t pos = cursor[b]++;
                items_[pos] = static_cast<uint32_t>(i);
                prob_[pos] = wt[i];
                bucket_max_[b] = std::max(bucket_max_[b], wt[i]);
            }
        }
    }

    size_t size() const { return n_; }
    size_t bucket_count() const { return levels_ + 1; }
    double bucket_max(size_t b) const { return bucket_max_[b]; }
    std::pair<size_t, size_t> bucket_range(size_t b) const {
        return {start_[b], start_[b + 1]};
    }
    uint32_t sorted_item(size_t pos) const { return items_[pos]; }
    double sorted_prob(size_t pos) const { return prob_[pos]; }

    // One independent-inclusion sample, as ascending item ids.
    std::vector<uint32_t> sample(uint64_t seed, unsigned workers = 1) const {
        workers = std::max(1u, workers);
        RngStream base(seed, 0x73756273u);

        // Fixed work units: one per (bucket, segment).
        struct unit {
            size_t bucket;
            size_t lo, hi; // positions
        };
        std::vector<unit> units;
        for (size_t b = 0; b <= levels_; ++b)
            for (size_t lo = start_[b]; lo < start_[b + 1]; lo += kSegment)
                units.push_back(
                    {b, lo, std::min<size_t>(start_[b + 1], lo + kSegment)});

        std::vector<std::vector<uint32_t>> picked(units.size());
        std::atomic<size_t> next{0};
        run_workers(workers, [&](unsigned) {
            for (size_t u = next.fetch_add(1); u < units.size();
                 u = next.fetch_add(1)) {
                const auto [b, lo, hi] = units[u];
                RngStream rng =
                    base.derive(b).derive((lo - start_[b]) / kSegment);
                scan_segment(b, lo, hi, rng, picked[u]);
            }
        });

        std::vector<uint32_t> out;
        for (const auto& part : picked)
            out.insert(out.end(), part.begin(), part.end());
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    static constexpr size_t kSegment = 4096;

    void scan_segment(size_t bucket, size_t lo, size_t hi, RngStream& rng,
                      std::vector<uint32_t>& out) const {
        const double pmax = bucket_max_[bucket];
        if (pmax >= 1.0) {
            // Skips degenerate to zero; test every item directly.
            for (size_t pos = lo; pos < hi; ++pos)
                if (rng.uniform01() < prob_[pos])
                    out.push_back(items_[pos]);
            return;
        }
        const double log_miss = std::log1p(-pmax);
        size_t pos = lo;
        while (pos < hi) {
            double u = rng.uniform01();
            while (u == 0.0)
                u = rng.uniform01();
            // geometric number of misses before the next landing at rate pmax
            const double v = std::floor(std::log(u) / log_miss);
            if (v >= static_cast<double>(hi - pos))
                break;
            pos += static_cast<size_t>(v);
            if (rng.uniform01() * pmax < prob_[pos])
                out.push_back(items_[pos]);
            ++pos;
        }
    }

    size_t n_;
    size_t levels_ = 0;
    std::vector<uint32_t> items_;     // item ids bucket by bucket
    std::vector<double> prob_;        // matching probabilities
    std::vector<uint32_t> start_;     // bucket boundaries (positions)
    std::vector<double> bucket_max_;  // largest probability per bucket
};

} // namespace wrs
