/*******************************************************************************
 * wrs/alias.hpp
 *
 * Alias tables for weighted sampling with replacement: classic two-stack
 * construction, a sequential two-pointer sweep, and a parallel split-and-pack
 * builder that partitions bucket ranges across workers.
 ******************************************************************************/

#pragma once

#include <wrs/parallel.hpp>
#include <wrs/rng.hpp>
#include <wrs/weights.hpp>

#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace wrs {

// One bucket of mean weight W/n.  `share` of it belongs to ia[0], the rest to
// ia[1].  16 bytes so a query touches a single cache line.
struct alias_bucket {
    double share;
    uint32_t ia[2]; // ia[0] = item, ia[1] = alias

    uint32_t item() const { return ia[0]; }
    uint32_t alias() const { return ia[1]; }
};
static_assert(sizeof(alias_bucket) == 16, "bucket must stay 16 bytes");

namespace detail {

// Index partition into light (w <= W/n, ties light) and heavy (w > W/n)
// items, both in ascending index order, plus exclusive prefix sums over the
// partitioned weights.  Built with fixed-size blocks so the result is
// identical for every worker count.
struct light_heavy_partition {
    std::vector<uint32_t> light, heavy;
    std::vector<double> light_prefix; // light_prefix[i] = sum of first i light weights
    std::vector<double> heavy_prefix;
    double bucket_mean = 0.0;
};

inline light_heavy_partition partition_items(const WeightTable& wt, unsigned workers) {
    const size_t n = wt.size();
    const double wn = wt.total() / static_cast<double>(n);
    light_heavy_partition part;
    part.bucket_mean = wn;

    constexpr size_t block = 4096;
    const size_t blocks = (n + block - 1) / block;
    std::vector<size_t> light_in_block(blocks, 0);
    for_blocks(n, block, workers, [&](size_t b, size_t lo, size_t hi) {
        size_t c = 0;
        for (size_t i = lo; i < hi; ++i)
            c += (wt[i] <= wn);
        light_in_block[b] = c;
    });

    std::vector<size_t> light_base(blocks + 1, 0), heavy_base(blocks + 1, 0);
    for (size_t b = 0; b < blocks; ++b) {
        const size_t in_block = std::min(block, n - b * block);
        light_base[b + 1] = light_base[b] + light_in_block[b];
        heavy_base[b + 1] = heavy_base[b] + (in_block - light_in_block[b]);
    }
    part.light.resize(light_base[blocks]);
    part.heavy.resize(heavy_base[blocks]);
    for_blocks(n, block, workers, [&](size_t b, size_t lo, size_t hi) {
        size_t li = light_base[b], hi_pos = heavy_base[b];
        for (size_t i = lo; i < hi; ++i) {
            if (wt[i] <= wn)
                part.light[li++] = static_cast<uint32_t>(i);
            else
                part.heavy[hi_pos++] = static_cast<uint32_t>(i);
        }
    });

    auto exclusive_prefix = [&](const std::vector<uint32_t>& idx, std::vector<double>& out) {
        std::vector<double> w(idx.size());
        for_blocks(idx.size(), block, workers,
                   [&](size_t, size_t lo, size_t hi2) {
                       for (size_t i = lo; i < hi2; ++i)
                           w[i] = wt[idx[i]];
                   });
        out.assign(idx.size() + 1, 0.0);
        if (!idx.empty()) {
            prefix_sums(w.data(), out.data() + 1, idx.size(), workers);
        }
    };
    exclusive_prefix(part.light, part.light_prefix);
    exclusive_prefix(part.heavy, part.heavy_prefix);
    return part;
}

// One worker's packing job: light bucket indices [light_lo, light_hi), heavy
// bucket indices [heavy_lo, heavy_hi), and the weight of heavy item
// heavy[heavy_lo] still available to this worker (predecessors consumed the
// rest of it).
struct pack_job {
    size_t light_lo, light_hi;
    size_t heavy_lo, heavy_hi;
    double spill;
};

// Choose the boundary after the first n_prime buckets: i light items and
// j heavy items with i + j = n_prime such that the fully used weight
// sigma = light_prefix[i] + heavy_prefix[j] satisfies
//   sigma <= n_prime * wn < sigma + w(heavy[j]).
// f(j) = sigma(j) + w(heavy[j]) is strictly increasing in j (raising j swaps
// a light for a heavier item), so the smallest j with f(j) > target works.
// Returns (i, j, spill) where spill is the part of heavy[j] left for the
// right-hand side.
struct split_point {
    size_t light_count, heavy_count;
    double spill;
};

inline split_point psa_split(const light_heavy_partition& part, const WeightTable& wt,
                             size_t n_prime) {
    const size_t nl = part.light.size(), nh = part.heavy.size();
    const double target = static_cast<double>(n_prime) * part.bucket_mean;
    const auto sigma = [&](size_t j) {
        return part.light_prefix[n_prime - j] + part.heavy_prefix[j];
    };
    const auto f = [&](size_t j) {
        if (j >= nh)
            return std::numeric_limits<double>::infinity();
        return sigma(j) + wt[part.heavy[j]];
    };

    size_t lo = n_prime > nl ? n_prime - nl : 0;
    size_t hi = std::min(n_prime, nh); // inclusive; f(hi) > target is guaranteed
    while (lo < hi) {
        const size_t mid = lo + (hi - lo) / 2;
        if (f(mid) > target)
            hi = mid;
        else
            lo = mid + 1;
    }
    split_point s;
    s.heavy_count = lo;
    s.light_count = n_prime - lo;
    s.spill = lo < nh ? std::max(0.0, wt[part.heavy[lo]] + sigma(lo) - target) : 0.0;
    return s;
}

// Fill the job's buckets.  Invariant: rem is the still-unassigned weight of
// heavy item heavy[j].  A light bucket takes its own weight plus (wn - w_i)
// from the current heavy; a heavy bucket takes the item's residual plus the
// remainder from the next heavy.  The bucket of a heavy item shared between
// workers is written by the worker whose range contains it, i.e. the last one
// to use its weight.  The tail loops absorb exact-tie and rounding cases so
// every bucket in the range is written exactly once.  The remainder runs
// through a chain as long as the whole range, so it is kept compensated: a
// bare double would drift by ~n*eps, visible next to the per-item masses.
inline void psa_pack(const light_heavy_partition& part, const WeightTable& wt,
                     const pack_job& job, alias_bucket* buckets) {
    const size_t nh = part.heavy.size();
    const double wn = part.bucket_mean;
    const auto heavy_at = [&](size_t j) { return part.heavy[std::min(j, nh - 1)]; };

    size_t i = job.light_lo;
    size_t j = job.heavy_lo;
    comp_sum<double> rem{j < nh ? job.spill : std::numeric_limits<double>::infinity()};

    while (true) {
        if (rem.value() > wn) {
            if (i >= job.light_hi) {
                // Lights done; anything left of the current heavy spills to
                // the next worker.  Finish heavy buckets the ties left behind.
                while (j < job.heavy_hi) {
                    const uint32_t idx = part.heavy[j];
                    buckets[idx] = {std::min(rem.value(), wn), {idx, heavy_at(j + 1)}};
                    if (j + 1 < nh)
                        rem.add(wt[part.heavy[j + 1]] - wn);
                    else
                        rem = {wn};
                    ++j;
                }
                return;
            }
            const uint32_t idx = part.light[i];
            buckets[idx] = {wt[idx], {idx, heavy_at(j)}};
            rem.add(wt[idx] - wn);
            ++i;
        } else {
            if (j >= job.heavy_hi) {
                // Residual spills onward; any remaining lights are exact ties
                // (or rounding wobble) and fill their own buckets.
                for (; i < job.light_hi; ++i) {
                    const uint32_t idx = part.light[i];
                    buckets[idx] = {wt[idx], {idx, heavy_at(j)}};
                }
                return;
            }
            const uint32_t idx = part.heavy[j];
            buckets[idx] = {std::max(0.0, std::min(rem.value(), wn)), {idx, heavy_at(j + 1)}};
            if (j + 1 < nh)
                rem.add(wt[part.heavy[j + 1]] - wn);
            else
                rem = {std::numeric_limits<double>::infinity()};
            ++j;
        }
    }
}

// Boundaries for `workers` pack jobs over n buckets.  Job k packs buckets
// (n*k/workers, n*(k+1)/workers]; masses are identical for every worker count
// because the partition, prefix sums, and split points do not depend on it.
inline std::vector<pack_job> psa_plan(const light_heavy_partition& part, const WeightTable& wt,
                                      unsigned workers) {
    const size_t n = wt.size();
    std::vector<pack_job> jobs(workers);
    size_t prev_l = 0, prev_j = 0;
    double carry = part.heavy.empty() ? 0.0 : wt[part.heavy[0]];
    for (unsigned k = 0; k < workers; ++k) {
        split_point s;
        if (k + 1 == workers) {
            s.light_count = part.light.size();
            s.heavy_count = part.heavy.size();
            s.spill = 0.0;
        } else {
            const size_t n_prime = (n * (k + 1)) / workers + ((n * (k + 1)) % workers != 0);
            s = psa_split(part, wt, n_prime);
        }
        if (s.light_count < prev_l || s.heavy_count < prev_j)
            throw std::logic_error("alias split boundaries must be nondecreasing");
        jobs[k] = {prev_l, s.light_count, prev_j, s.heavy_count, carry};
        prev_l = s.light_count;
        prev_j = s.heavy_count;
        carry = s.spill;
    }
    return jobs;
}

} // namespace detail

class AliasTable {
public:
    enum class Build { vose, sweep, psa };

    AliasTable(const WeightTable& wt, Build method, unsigned workers = 1)
        : n_(wt.size()), total_(wt.total()),
          bucket_mean_(wt.total() / static_cast<double>(wt.size())) {
        if (n_ > std::numeric_limits<uint32_t>::max())
            throw std::invalid_argument("alias table limited to 2^32-1 items");
        buckets_.resize(n_);
        switch (method) {
        case Build::vose: build_vose(wt); break;
        case Build::sweep: build_sweep(wt); break;
        case Build::psa: build_psa(wt, std::max(1u, workers)); break;
        }
    }

    size_t size() const { return n_; }
    double total_weight() const { return total_; }
    double bucket_mean() const { return bucket_mean_; }
    std::span<const alias_bucket> buckets() const { return buckets_; }

    // Two random draws, no branches: a bucket and a position inside it.
    uint32_t sample(RngStream& rng) const {
        const alias_bucket& b = buckets_[rng.bounded(static_cast<uint64_t>(n_))];
        const double x = rng.uniform01() * bucket_mean_;
        return b.ia[x >= b.share];
    }

    // k independent samples, split over workers on contiguous output ranges.
    // `out` is reused (resize, not reallocate) so repeated calls measure
    // query throughput rather than allocation.
    void sample_many(uint64_t seed, size_t k, unsigned workers,
                     std::vector<uint32_t>& out) const {
        out.resize(k);
        run_workers(workers, [&](unsigned worker) {
            const auto [lo, hi] = worker_slice(k, workers, worker);
            RngStream rng(seed, 0x616c6961u);
            rng = rng.derive(worker);
            for (size_t q = lo; q < hi; ++q)
                out[q] = sample(rng);
        });
    }

private:
    // All items tie with the mean: every bucket keeps its own item.
    bool fill_uniform_if_no_heavy(const WeightTable& wt) {
        for (size_t i = 0; i < n_; ++i)
            if (wt[i] > bucket_mean_)
                return false;
        for (size_t i = 0; i < n_; ++i) {
            const uint32_t idx = static_cast<uint32_t>(i);
            buckets_[i] = {wt[i], {idx, idx}};
        }
        return true;
    }

    void build_vose(const WeightTable& wt) {
        if (fill_uniform_if_no_heavy(wt))
            return;
        const double wn = bucket_mean_;
        struct entry {
            uint32_t idx;
            double w; // residual weight for demoted heavy items
        };
        std::vector<entry> light, heavy;
        light.reserve(n_);
        heavy.reserve(n_);
        for (size_t i = 0; i < n_; ++i) {
            const uint32_t idx = static_cast<uint32_t>(i);
            if (wt[i] <= wn)
                light.push_back({idx, wt[i]});
            else
                heavy.push_back({idx, wt[i]});
        }

        // The current heavy's remainder crosses as many updates as there are
        // lights under it; compensated so the chain cannot drift.
        entry cur = heavy.back();
        heavy.pop_back();
        detail::comp_sum<double> rem{cur.w};
        while (true) {
            if (rem.value() > wn && !light.empty()) {
                const entry li = light.back();
                light.pop_back();
                buckets_[li.idx] = {li.w, {li.idx, cur.idx}};
                rem.add(li.w - wn);
            } else if (rem.value() > wn) {
                // Rounding starved the light stack; the surplus is noise.
                buckets_[cur.idx] = {wn, {cur.idx, cur.idx}};
                if (heavy.empty())
                    break;
                cur = heavy.back();
                heavy.pop_back();
                rem = {cur.w};
            } else {
                // Residual fits into its own bucket: item behaves light now.
                light.push_back({cur.idx, rem.value()});
                if (heavy.empty())
                    break;
                cur = heavy.back();
                heavy.pop_back();
                rem = {cur.w};
            }
        }
        for (const entry& e : light)
            buckets_[e.idx] = {std::min(e.w, wn), {e.idx, e.idx}};
    }

    void build_sweep(const WeightTable& wt) {
        if (fill_uniform_if_no_heavy(wt))
            return;
        const double wn = bucket_mean_;
        const auto next_light = [&](size_t from) {
            size_t i = from;
            while (i < n_ && wt[i] > wn)
                ++i;
            return i;
        };
        const auto next_heavy = [&](size_t from) {
            size_t j = from;
            while (j < n_ && wt[j] <= wn)
                ++j;
            return j;
        };

        // As in the parallel packer, the running remainder is compensated:
        // one sweep threads it through every position.
        size_t i = next_light(0);
        size_t j = next_heavy(0);
        size_t last_heavy = j;
        detail::comp_sum<double> rem{wt[j]};
        while (j < n_) {
            if (rem.value() > wn) {
                if (i >= n_) {
                    // Ties exhausted the lights early; close out the heavies.
                    const uint32_t idx = static_cast<uint32_t>(j);
                    const size_t jn = next_heavy(j + 1);
                    buckets_[j] = {std::min(rem.value(), wn),
                                   {idx, static_cast<uint32_t>(jn < n_ ? jn : j)}};
                    if (jn < n_)
                        rem.add(wt[jn] - wn);
                    j = jn;
                    continue;
                }
                const uint32_t idx = static_cast<uint32_t>(i);
                buckets_[i] = {wt[i], {idx, static_cast<uint32_t>(j)}};
                rem.add(wt[i] - wn);
                i = next_light(i + 1);
            } else {
                const size_t jn = next_heavy(j + 1);
                const uint32_t idx = static_cast<uint32_t>(j);
                buckets_[j] = {std::max(0.0, rem.value()),
                               {idx, static_cast<uint32_t>(jn < n_ ? jn : j)}};
                last_heavy = j;
                if (jn < n_)
                    rem.add(wt[jn] - wn);
                else
                    rem = {std::numeric_limits<double>::infinity()};
                j = jn;
            }
        }
        // Remaining lights are exact ties with the mean.
        for (; i < n_; i = next_light(i + 1)) {
            const uint32_t idx = static_cast<uint32_t>(i);
            buckets_[i] = {wt[i], {idx, static_cast<uint32_t>(last_heavy)}};
        }
    }

    void build_psa(const WeightTable& wt, unsigned workers) {
        if (fill_uniform_if_no_heavy(wt))
            return;
        const auto part = detail::partition_items(wt, workers);
        const auto jobs = detail::psa_plan(part, wt, workers);
        run_workers(workers, [&](unsigned worker) {
            detail::psa_pack(part, wt, jobs[worker], buckets_.data());
        });
    }

    size_t n_;
    double total_;
    double bucket_mean_;
    std::vector<alias_bucket> buckets_;
};

} // namespace wrs
