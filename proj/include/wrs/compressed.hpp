/*******************************************************************************
 * wrs/compressed.hpp
 *
 * Compressed one-sample structure: item i is scaled to v_i = n*w_i/W and owns
 * ceil(v_i) consecutive virtual buckets, marked by a start bit.  A query picks
 * a bucket uniformly, finds its owner by rank, and accepts — always for inner
 * buckets, with probability v_i - (ceil(v_i)-1) for the item's last bucket.
 * At most 2n buckets exist, so a query accepts with probability >= 1/2 and
 * needs two random draws per attempt; storage is one bit per bucket plus a
 * rank directory and one acceptance threshold per item.
 ******************************************************************************/

#pragma once

#include <wrs/parallel.hpp>
#include <wrs/rng.hpp>
#include <wrs/weights.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace wrs {

class CompressedTable {
public:
    explicit CompressedTable(const WeightTable& wt, unsigned workers = 1)
        : n_(wt.size()), scale_(wt.total() / static_cast<double>(wt.size())) {
        if (n_ > std::numeric_limits<uint32_t>::max())
            throw std::invalid_argument("compressed table limited to 2^32-1 items");
        (void)workers; // construction is one ordered pass; queries parallelize

        // Bucket counts and start offsets per item.
        accept_.resize(n_);
        std::vector<uint64_t> start(n_ + 1, 0);
        for (size_t i = 0; i < n_; ++i) {
            const double v = wt[i] / scale_;
            const double c = std::ceil(v);
            accept_[i] = v - (c - 1.0); // in (0, 1]
            start[i + 1] = start[i] + static_cast<uint64_t>(c);
        }
        m_ = start[n_];

        // Start bits: neighbouring items can share a word, so set them in one
        // sequential pass (a few ns per item).
        const uint64_t words = (m_ + 63) / 64;
        bits_.assign(words, 0);
        for (size_t i = 0; i < n_; ++i)
            bits_[start[i] / 64] |= uint64_t{1} << (start[i] % 64);

        // Rank directory: cumulative ones per 512-bit superblock, and a
        // 16-bit offset per 64-bit word within its superblock.
        const uint64_t supers = (words + 7) / 8;
        super_.assign(supers + 1, 0);
        block_.assign(words, 0);
        uint64_t total = 0;
        for (uint64_t w = 0; w < words; ++w) {
            if (w % 8 == 0)
                super_[w / 8] = total;
            block_[w] = static_cast<uint16_t>(total - super_[w / 8]);
            total += std::popcount(bits_[w]);
        }
        super_[supers] = total;
        if (total != n_)
            throw std::logic_error("compressed table lost items");
    }

    size_t size() const { return n_; }
    uint64_t virtual_buckets() const { return m_; }
    double scale() const { return scale_; }
    double accept_threshold(size_t i) const { return accept_[i]; }

    // Ones in positions [0, pos).
    uint64_t rank1(uint64_t pos) const {
        const uint64_t w = pos / 64;
        const uint64_t mask = (uint64_t{1} << (pos % 64)) - 1;
        const uint64_t in_word = pos % 64 ? std::popcount(bits_[w] & mask) : 0;
        return super_[w / 8] + block_[w] + in_word;
    }

    bool bucket_starts_item(uint64_t j) const {
        return (bits_[j / 64] >> (j % 64)) & 1;
    }

    uint32_t sample(RngStream& rng) const {
        while (true) {
            const uint64_t j = rng.bounded(m_);
            const uint32_t i = static_cast<uint32_t>(rank1(j + 1) - 1);
            const bool last = (j + 1 == m_) || bucket_starts_item(j + 1);
            if (!last || rng.uniform01() < accept_[i])
                return i;
        }
    }

    void sample_many(uint64_t seed, size_t k, unsigned workers,
                     std::vector<uint32_t>& out) const {
        out.resize(k);
        run_workers(workers, [&](unsigned worker) {
            const auto [lo, hi] = worker_slice(k, workers, worker);
            RngStream rng(seed, 0x636d7072u);
            rng = rng.derive(worker);
            for (size_t q = lo; q < hi; ++q)
                out[q] = sample(rng);
        });
    }

    // Buckets owned by each item, recovered from the bit vector (oracle use).
    std::vector<uint64_t> bucket_counts() const {
        std::vector<uint64_t> counts(n_, 0);
        size_t item = 0;
        for (uint64_t j = 0; j < m_; ++j) {
            if (j > 0 && bucket_starts_item(j))
                ++item;
            ++counts[item];
        }
        return counts;
    }

private:
    size_t n_;
    double scale_;
    uint64_t m_ = 0;
    std::vector<double> accept_;
    std::vector<uint64_t> bits_;
    std::vector<uint64_t> super_;
    std::vector<uint16_t> block_;
};

} // namespace wrs
