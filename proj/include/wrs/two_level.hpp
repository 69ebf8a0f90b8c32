/*******************************************************************************
 * wrs/two_level.hpp
 *
 * Two-level alias structure: items are cut into contiguous groups, each group
 * gets a local alias table, and a small top-level alias table picks the group
 * by its weight sum.  Groups build independently, so construction politely
 * parallelizes, and the top table is tiny.
 ******************************************************************************/

#pragma once

#include <wrs/alias.hpp>
#include <wrs/parallel.hpp>
#include <wrs/rng.hpp>
#include <wrs/weights.hpp>

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace wrs {

class TwoLevelTable {
public:
    // groups == 0 picks one group per worker.  Local tables use `local_build`
    // (the top table is small; it always uses the same method).
    TwoLevelTable(const WeightTable& wt, AliasTable::Build local_build,
                  unsigned workers = 1, size_t groups = 0)
        : n_(wt.size()) {
        workers = std::max(1u, workers);
        if (groups == 0)
            groups = workers;
        groups = std::min(groups, n_);
        const size_t block = (n_ + groups - 1) / groups;
        groups = (n_ + block - 1) / block; // drop empty trailing groups
        base_.resize(groups + 1);
        for (size_t g = 0; g <= groups; ++g)
            base_[g] = std::min(n_, g * block);

        // Build local tables in parallel over groups.
        locals_.resize(groups);
        std::vector<double> group_weight(groups);
        std::atomic<size_t> next{0};
        run_workers(workers, [&](unsigned) {
            for (size_t g = next.fetch_add(1); g < groups; g = next.fetch_add(1)) {
                WeightTable local(std::vector<double>(wt.data() + base_[g],
                                                      wt.data() + base_[g + 1]));
                group_weight[g] = local.total();
                locals_[g].emplace(local, local_build);
            }
        });

        WeightTable top(std::move(group_weight));
        meta_.emplace(top, local_build);
    }

    size_t size() const { return n_; }
    size_t groups() const { return locals_.size(); }
    size_t group_begin(size_t g) const { return base_[g]; }
    const AliasTable& top() const { return *meta_; }
    const AliasTable& local(size_t g) const { return *locals_[g]; }

    uint32_t sample(RngStream& rng) const {
        const uint32_t g = meta_->sample(rng);
        return static_cast<uint32_t>(base_[g]) + locals_[g]->sample(rng);
    }

    void sample_many(uint64_t seed, size_t k, unsigned workers,
                     std::vector<uint32_t>& out) const {
        out.resize(k);
        run_workers(workers, [&](unsigned worker) {
            const auto [lo, hi] = worker_slice(k, workers, worker);
            RngStream rng(seed, 0x326c766cu);
            rng = rng.derive(worker);
            for (size_t q = lo; q < hi; ++q)
                out[q] = sample(rng);
        });
    }

private:
    size_t n_;
    std::vector<size_t> base_;
    std::vector<std::optional<AliasTable>> locals_;
    std::optional<AliasTable> meta_;
};

} // namespace wrs
