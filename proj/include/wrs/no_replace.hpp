/*******************************************************************************
 * wrs/no_replace.hpp
 *
 * Sampling k items without replacement, built on the with-replacement
 * sampler.  The classic reduction: the distinct values of an i.i.d. weighted
 * stream, in order of first occurrence, are exactly a sequential
 * without-replacement sample.  We therefore oversample ell >= k draws with
 * replacement, then recover the first-occurrence order from the unordered
 * multiset: conditioned on the multiset, the first occurrence order of the
 * distinct items is a successive sample proportional to their
 * *multiplicities*, which an exponential key race reproduces exactly.  Too
 * few distinct items just means the stream continues: further independent
 * batches extend it, and only items not seen before compete for the
 * remaining slots.
 *
 * ell is picked from octave-group aggregates.  A group whose weight bound
 * stays below W/ell contributes its expected draw count, heavier groups
 * contribute at most one distinct item apiece; the estimate brackets the
 * item-level unique count within a factor two, so a small constant headroom
 * makes a second batch unlikely without distorting the distribution when it
 * does happen.
 ******************************************************************************/

#pragma once

#include <wrs/grouped.hpp>
#include <wrs/rng.hpp>
#include <wrs/weights.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace wrs {

struct without_replacement_stats {
    uint64_t ell = 0;              // first-round oversampling size
    uint64_t rounds = 0;           // batches drawn
    uint64_t total_draws = 0;      // with-replacement draws across batches
    uint64_t rejection_draws = 0;  // accepted rejection draws in the batches
    uint64_t rejection_attempts = 0;
};

class WithoutReplacementSampler {
public:
    static constexpr uint64_t kMaxEll = uint64_t{1} << 40;

    explicit WithoutReplacementSampler(const WeightTable& wt,
                                       unsigned workers = 1)
        : grouped_(wt, workers), n_(wt.size()), total_(wt.total()),
          weights_(wt.data(), wt.data() + wt.size()) {
        // Aggregate per nonempty octave group: weight mass and item count,
        // plus the group's exclusive upper weight bound.
        for (size_t g = 0; g < grouped_.group_count(); ++g) {
            const auto [lo, hi] = grouped_.group_item_range(g);
            const auto [wlo, whi] = grouped_.group_weight_range(g);
            group_agg agg;
            agg.upper = whi;
            agg.count = hi - lo;
            double mass = 0.0;
            for (size_t pos = lo; pos < hi; ++pos)
                mass += wt[grouped_.sorted_item(pos)];
            agg.mass = mass;
            (void)wlo;
            groups_.push_back(agg);
        }
    }

    size_t size() const { return n_; }

    // Group-level estimate of the distinct-item count among ell draws with
    // replacement: groups that cannot cross W/ell contribute their expected
    // number of draws, the rest at most one distinct item each.  Monotone
    // nondecreasing in ell.
    double estimate_unique(double ell) const {
        double t = 0.0;
        for (const group_agg& g : groups_) {
            if (g.upper * ell <= total_)
                t += ell * (g.mass / total_);
            else
                t += static_cast<double>(g.count);
        }
        return t;
    }

    // Smallest ell whose estimate clears the headroom target; doubling the
    // goal absorbs both the factor-two group coarseness and the constant-
    // factor loss between the estimate and the true expectation.
    uint64_t choose_ell(uint64_t k) const {
        const double target =
            std::min(2.0 * static_cast<double>(k), static_cast<double>(n_));
        uint64_t lo = std::max<uint64_t>(k, 1), hi = kMaxEll;
        if (estimate_unique(static_cast<double>(lo)) >= target)
            return lo;
        while (lo + 1 < hi) {
            const uint64_t mid = lo + (hi - lo) / 2;
            if (estimate_unique(static_cast<double>(mid)) >= target)
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    }

    // The k sampled items, in without-replacement draw order.
    std::vector<uint32_t> sample(uint64_t seed, uint64_t k,
                                 unsigned workers = 1,
                                 without_replacement_stats* stats
                                 = nullptr) const {
        if (k > n_)
            throw std::invalid_argument(
                "cannot sample more items than exist without replacement");
        without_replacement_stats st;
        std::vector<uint32_t> result;
        result.reserve(k);
        RngStream base(seed, 0x6e6f7270u);
        if (k == n_) {
            // Everything is taken; the draw order is exactly an exponential
            // key race on the weights, so skip the oversampling loop (it
            // would otherwise have to chase down every last item).
            return full_race(base, stats, st);
        }
        if (k == 0) {
            if (stats)
                *stats = st;
            return result;
        }
        std::vector<bool> seen(n_, false);
        uint64_t ell = choose_ell(k);
        st.ell = ell;
        struct racer {
            double key;
            uint32_t item;
        };
        std::vector<racer> racers;
        while (result.size() < k) {
            const uint64_t round = st.rounds++;
            const uint64_t batch_seed = base.derive(round).next();
            const auto batch = grouped_.sample(batch_seed, ell, true, workers);
            st.total_draws += ell;
            st.rejection_draws += batch.rejection_draws;
            st.rejection_attempts += batch.rejection_attempts;

            // Race the batch's new distinct items with multiplicity-weighted
            // exponential keys; ascending keys reproduce their first
            // occurrence order within the stream exactly.
            racers.clear();
            RngStream key_base = base.derive(0x6b657973u).derive(round);
            for (const sample_entry& e : batch.entries) {
                if (seen[e.item])
                    continue;
                RngStream kr = key_base.derive(e.item);
                racers.push_back(
                    {kr.exponential_key(static_cast<double>(e.count)), e.item});
            }
            const auto by_key = [](const racer& a, const racer& b) {
                if (a.key != b.key)
                    return a.key < b.key;
                return a.item < b.item;
            };
            const uint64_t need = k - result.size();
            if (racers.size() > need) {
                std::nth_element(racers.begin(),
                                 racers.begin() + static_cast<ptrdiff_t>(need - 1),
                                 racers.end(), by_key);
                racers.resize(need);
            }
            std::sort(racers.begin(), racers.end(), by_key);
            for (const racer& r : racers) {
                seen[r.item] = true;
                result.push_back(r.item);
            }
            ell = std::min(ell * 2, kMaxEll);
        }
        if (stats)
            *stats = st;
        return result;
    }

private:
    struct group_agg {
        double upper = 0.0; // exclusive weight bound of the octave
        double mass = 0.0;  // total weight in the group
        size_t count = 0;   // items in the group
    };

    std::vector<uint32_t> full_race(const RngStream& base,
                                    without_replacement_stats* stats,
                                    without_replacement_stats& st) const {
        struct racer {
            double key;
            uint32_t item;
        };
        std::vector<racer> racers(n_);
        RngStream key_base = base.derive(0x66756c6cu);
        for (size_t i = 0; i < n_; ++i) {
            RngStream kr = key_base.derive(i);
            racers[i] = {kr.exponential_key(weights_[i]),
                         static_cast<uint32_t>(i)};
        }
        std::sort(racers.begin(), racers.end(), [](const racer& a, const racer& b) {
            if (a.key != b.key)
                return a.key < b.key;
            return a.item < b.item;
        });
        std::vector<uint32_t> result(n_);
        for (size_t i = 0; i < n_; ++i)
            result[i] = racers[i].item;
        if (stats)
            *stats = st;
        return result;
    }

    GroupedSampler grouped_;
    size_t n_;
    double total_;
    std::vector<double> weights_;
    std::vector<group_agg> groups_;
};

// Item-level distinct-count functions for ell i.i.d. weighted draws; pure
// functions of the weights used to validate the group-level estimate.
//
//   expected_unique_items : E[#distinct] = sum_i 1 - (1 - w_i/W)^ell
//   unique_upper_profile  : t = ell * sum_{w_i < W/ell} w_i/W + #{w_i >= W/ell}
//
// The two straddle each other: (1 - 1/e) t <= E <= t.
inline double expected_unique_items(const WeightTable& wt, double ell) {
    double e = 0.0;
    for (size_t i = 0; i < wt.size(); ++i)
        e += 1.0 - std::pow(1.0 - wt[i] / wt.total(), ell);
    return e;
}

inline double unique_upper_profile(const WeightTable& wt, double ell) {
    const double threshold = wt.total() / ell;
    double light_mass = 0.0;
    double heavy = 0.0;
    for (size_t i = 0; i < wt.size(); ++i) {
        if (wt[i] < threshold)
            light_mass += wt[i];
        else
            heavy += 1.0;
    }
    return ell * light_mass / wt.total() + heavy;
}

} // namespace wrs
