/*******************************************************************************
 * wrs/reservoir.hpp
 *
 * Mini-batch weighted reservoir sampling without replacement over a stream.
 * Every stream record conceptually draws an exponential key with rate w; the
 * reservoir keeps the k smallest keys seen so far.  Actually drawing a key
 * per record would waste the stream's length in RNG calls, so once the
 * reservoir is full the scan jumps along the batch's cumulative weight axis
 * in Exp(T) strides, where T is the current k-th smallest key: a record is
 * touched at all only with probability 1 - exp(-T w), exactly the chance
 * its key would beat the threshold, and the landed record draws its key
 * from the matching truncated distribution.  Jumps restart at batch and
 * slice boundaries, which is free by the independence of a Poisson process
 * on disjoint intervals.  Each of a fixed number of slots scans its own
 * slice of every batch; after each batch the slots' candidates and the old
 * reservoir are merged and cut back to the best k, tightening T.
 ******************************************************************************/

#pragma once

#include <wrs/parallel.hpp>
#include <wrs/rng.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace wrs {

struct reservoir_entry {
    double key;
    uint32_t slot; // slot that inserted it; part of the tie order
    uint32_t item;

    bool operator==(const reservoir_entry&) const = default;
};

class Reservoir {
public:
    Reservoir(size_t k, unsigned slots, uint64_t seed)
        : k_(k), slots_(std::max(1u, slots)), base_(seed, 0x72657376u) {
        if (k == 0)
            throw std::invalid_argument("reservoir capacity must be positive");
        buffers_.resize(slots_);
        insertions_.assign(slots_, 0);
    }

    size_t capacity() const { return k_; }
    unsigned slots() const { return slots_; }
    double threshold() const { return threshold_; }
    uint64_t batches() const { return batches_; }
    const std::vector<uint64_t>& insertions_per_slot() const {
        return insertions_;
    }
    uint64_t insertions() const {
        uint64_t total = 0;
        for (uint64_t c : insertions_)
            total += c;
        return total;
    }

    // Key with the law of Exp(w) conditioned below t, via the inverse CDF in
    // its catastrophe-free form; always strictly inside (0, t).
    static double truncated_exponential_key(RngStream& rng, double w,
                                            double t) {
        return -std::log1p(rng.uniform01() * std::expm1(-w * t)) / w;
    }

    // Feed one mini-batch of weighted records.  Record identity is the
    // caller's item id; ids may repeat (every record competes separately).
    void push(const uint32_t* items, const double* weights, size_t count) {
        if (count == 0) {
            ++batches_;
            return;
        }
        if (items == nullptr || weights == nullptr)
            throw std::invalid_argument("reservoir batch must not be null");
        for (size_t i = 0; i < count; ++i)
            if (!std::isfinite(weights[i]) || weights[i] <= 0.0)
                throw std::invalid_argument(
                    "reservoir weights must be positive and finite");

        const uint64_t batch = batches_++;
        const auto scan = [&](unsigned slot) {
            const auto [lo, hi] = worker_slice(count, slots_, slot);
            if (lo == hi)
                return;
            RngStream rng = base_.derive(batch).derive(slot);
            std::vector<reservoir_entry>& buf = buffers_[slot];
            if (threshold_ == std::numeric_limits<double>::infinity()) {
                // Filling up: every record draws its key outright.
                for (size_t i = lo; i < hi; ++i) {
                    buf.push_back(
                        {rng.exponential_key(weights[i]), slot, items[i]});
                    ++insertions_[slot];
                }
                return;
            }
            // Jump scan: stride Exp(T) along the slice's weight axis.
            double stride = rng.exponential_key(threshold_);
            for (size_t i = lo; i < hi; ++i) {
                if (stride >= weights[i]) {
                    stride -= weights[i];
                    continue;
                }
                buf.push_back(
                    {truncated_exponential_key(rng, weights[i], threshold_),
                     slot, items[i]});
                ++insertions_[slot];
                stride = rng.exponential_key(threshold_);
            }
        };
        // Slots are logical: each owns a slice and an RNG stream, so the
        // result is the same whether they run on threads or in sequence.
        // Spawning threads only pays off for batches of real size.
        if (count >= size_t{4096} * slots_) {
            run_workers(slots_, scan);
        } else {
            for (unsigned slot = 0; slot < slots_; ++slot)
                scan(slot);
        }
        select();
    }

    // The current sample, ascending by key; size() < capacity() only while
    // the stream has not yet delivered k records.
    const std::vector<reservoir_entry>& sample() const { return retained_; }

private:
    static bool order(const reservoir_entry& a, const reservoir_entry& b) {
        if (a.key != b.key)
            return a.key < b.key;
        if (a.slot != b.slot)
            return a.slot < b.slot;
        return a.item < b.item;
    }

    void select() {
        for (auto& buf : buffers_) {
            retained_.insert(retained_.end(), buf.begin(), buf.end());
            buf.clear();
        }
        if (retained_.size() > k_) {
            std::nth_element(retained_.begin(),
                             retained_.begin() + static_cast<ptrdiff_t>(k_ - 1),
                             retained_.end(), order);
            retained_.resize(k_);
        }
        std::sort(retained_.begin(), retained_.end(), order);
        if (retained_.size() == k_)
            threshold_ = retained_.back().key;
    }

    size_t k_;
    unsigned slots_;
    RngStream base_;
    double threshold_ = std::numeric_limits<double>::infinity();
    uint64_t batches_ = 0;
    std::vector<reservoir_entry> retained_;          // current sample, sorted
    std::vector<std::vector<reservoir_entry>> buffers_; // per-slot candidates
    std::vector<uint64_t> insertions_;
};

} // namespace wrs
