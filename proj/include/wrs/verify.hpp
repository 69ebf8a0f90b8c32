/*******************************************************************************
 * wrs/verify.hpp
 *
 * Test-side oracles: masses a sampling structure actually encodes, computed
 * from the structure itself with compensated accumulation, plus small exact
 * reference distributions for cross-checking sampler output.
 ******************************************************************************/

#pragma once

#include <wrs/alias.hpp>
#include <wrs/compressed.hpp>
#include <wrs/two_level.hpp>
#include <wrs/weights.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace wrs {

// Compensated (Kahan) accumulator; the oracle side must not lose digits.
class kahan_sum {
public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0, c_ = 0.0;
};

// Probability mass each item receives from an alias table: `share` of every
// bucket goes to its item, the remaining bucket_mean - share to its alias.
// A correct table reproduces the input weights exactly up to rounding.
inline std::vector<double> implied_masses(std::span<const alias_bucket> buckets,
                                          double bucket_mean) {
    std::vector<kahan_sum> acc(buckets.size());
    for (const alias_bucket& b : buckets) {
        acc[b.item()].add(b.share);
        acc[b.alias()].add(bucket_mean - b.share);
    }
    std::vector<double> masses(buckets.size());
    for (size_t i = 0; i < buckets.size(); ++i)
        masses[i] = acc[i].value();
    return masses;
}

inline std::vector<double> implied_masses(const AliasTable& table) {
    return implied_masses(table.buckets(), table.bucket_mean());
}

// Two-level composition: an item's probability is the product of its group's
// top-level probability and its share within the group.  Each level's
// denominator is its bucket count times the bucket capacity, exactly as the
// query divides its random draws.
inline std::vector<double> implied_masses(const TwoLevelTable& table) {
    const auto top = implied_masses(table.top());
    std::vector<double> masses(table.size());
    for (size_t g = 0; g < table.groups(); ++g) {
        const AliasTable& local = table.local(g);
        const auto local_masses = implied_masses(local);
        const double local_capacity =
            static_cast<double>(local.size()) * local.bucket_mean();
        for (size_t i = 0; i < local.size(); ++i)
            masses[table.group_begin(g) + i] =
                top[g] * (local_masses[i] / local_capacity);
    }
    return masses;
}

// Compressed structure: item mass is (inner buckets + last-bucket acceptance)
// rescaled by the build's scaling unit W/n.  Bucket ownership is re-derived
// from the bit vector, not from the weights.
inline std::vector<double> implied_masses(const CompressedTable& table) {
    const auto counts = table.bucket_counts();
    std::vector<double> masses(table.size());
    for (size_t i = 0; i < table.size(); ++i)
        masses[i] = (static_cast<double>(counts[i] - 1) + table.accept_threshold(i)) *
                    table.scale();
    return masses;
}

// Largest per-item relative deviation between implied masses and the input.
inline double max_relative_mass_error(const std::vector<double>& masses,
                                      const WeightTable& wt) {
    double worst = 0.0;
    for (size_t i = 0; i < wt.size(); ++i)
        worst = std::max(worst, std::abs(masses[i] - wt[i]) / wt[i]);
    return worst;
}

// Empirical item frequencies from a sample vector, for chi-square checks.
inline std::vector<uint64_t> tally(std::span<const uint32_t> sample, size_t n) {
    std::vector<uint64_t> counts(n, 0);
    for (uint32_t s : sample)
        ++counts[s];
    return counts;
}

inline std::vector<double> normalized_weights(const WeightTable& wt) {
    std::vector<double> p(wt.size());
    for (size_t i = 0; i < wt.size(); ++i)
        p[i] = wt[i] / wt.total();
    return p;
}

// All possible outcomes of drawing k items with replacement, as count vectors
// (c_0..c_{n-1}) summing to k, each with its exact multinomial probability
//     P(c) = k! / prod(c_i!) * prod(p_i ^ c_i).
// Only meant for tiny n and k, where the full outcome space fits in memory
// and chi-square over outcomes is exact.
struct multinomial_outcome {
    std::vector<uint64_t> counts;
    double prob;
};

inline std::vector<multinomial_outcome>
enumerate_multinomial(const std::vector<double>& p, uint64_t k) {
    std::vector<multinomial_outcome> outcomes;
    std::vector<uint64_t> counts(p.size(), 0);
    // log-factorials up to k keep the products stable
    std::vector<double> lfact(k + 1, 0.0);
    for (uint64_t i = 2; i <= k; ++i)
        lfact[i] = lfact[i - 1] + std::log(static_cast<double>(i));
    auto rec = [&](auto&& self, size_t i, uint64_t left) -> void {
        if (i + 1 == p.size()) {
            counts[i] = left;
            double logp = lfact[k];
            for (size_t j = 0; j < p.size(); ++j) {
                logp -= lfact[counts[j]];
                if (counts[j] > 0)
                    logp += static_cast<double>(counts[j]) * std::log(p[j]);
            }
            outcomes.push_back({counts, std::exp(logp)});
            return;
        }
        for (uint64_t c = 0; c <= left; ++c) {
            counts[i] = c;
            self(self, i + 1, left - c);
        }
    };
    rec(rec, 0, k);
    return outcomes;
}

// Exact law of the *set* of k sequential without-replacement draws, as
// (bitmask, probability) pairs over all C(n,k) subsets, ascending by mask.
// Two independent derivations with very different failure modes; tests
// cross-check them before using either.  Both are exponential in n and only
// meant for tiny instances.
//
// Subset-DP path: dp[mask] is the probability that the first popcount(mask)
// draws produce exactly the items in mask, built by conditioning on the last
// item drawn.
inline std::vector<std::pair<uint64_t, double>>
enumerate_without_replacement(const std::vector<double>& w, size_t k) {
    const size_t n = w.size();
    if (n > 20)
        throw std::invalid_argument("oracle limited to tiny instances");
    if (k > n)
        throw std::invalid_argument("k exceeds item count");
    double total = 0.0;
    for (double x : w)
        total += x;

    const uint64_t full = (n == 64) ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
    std::vector<double> wsum(full + 1, 0.0), dp(full + 1, 0.0);
    for (uint64_t mask = 1; mask <= full; ++mask) {
        const uint64_t low = mask & (mask - 1);
        wsum[mask] = wsum[low] + w[static_cast<size_t>(std::countr_zero(mask))];
    }
    dp[0] = 1.0;
    std::vector<std::pair<uint64_t, double>> out;
    for (uint64_t mask = 1; mask <= full; ++mask) {
        const auto bits = static_cast<size_t>(std::popcount(mask));
        if (bits > k)
            continue;
        double p = 0.0;
        for (uint64_t rest = mask; rest != 0; rest &= rest - 1) {
            const uint64_t bit = rest & (~rest + 1);
            const uint64_t prev = mask ^ bit;
            p += dp[prev] *
                 (w[static_cast<size_t>(std::countr_zero(bit))] /
                  (total - wsum[prev]));
        }
        dp[mask] = p;
        if (bits == k)
            out.push_back({mask, p});
    }
    if (k == 0)
        out.push_back({0, 1.0});
    return out;
}

// Exact distribution of the subset size under independent inclusions: the
// Poisson-binomial law, by the textbook O(n^2) convolution.
inline std::vector<double> poisson_binomial_pmf(const std::vector<double>& p) {
    std::vector<double> dp(p.size() + 1, 0.0);
    dp[0] = 1.0;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t s = i + 1; s-- > 0;) {
            dp[s + 1] += dp[s] * p[i];
            dp[s] *= 1.0 - p[i];
        }
    return dp;
}

// Ordered-tuple path: walk every ordered k-tuple of distinct items and
// accumulate its probability onto the tuple's set.
inline std::vector<std::pair<uint64_t, double>>
enumerate_without_replacement_tuples(const std::vector<double>& w, size_t k) {
    const size_t n = w.size();
    if (n > 20)
        throw std::invalid_argument("oracle limited to tiny instances");
    if (k > n)
        throw std::invalid_argument("k exceeds item count");
    double total = 0.0;
    for (double x : w)
        total += x;

    std::map<uint64_t, double> acc;
    auto rec = [&](auto&& self, uint64_t mask, double remaining, double prob,
                   size_t depth) -> void {
        if (depth == k) {
            acc[mask] += prob;
            return;
        }
        for (size_t i = 0; i < n; ++i) {
            const uint64_t bit = uint64_t{1} << i;
            if (mask & bit)
                continue;
            self(self, mask | bit, remaining - w[i], prob * w[i] / remaining,
                 depth + 1);
        }
    };
    rec(rec, 0, total, 1.0, 0);
    return {acc.begin(), acc.end()};
}

} // namespace wrs
