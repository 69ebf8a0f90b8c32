/*******************************************************************************
 * wrs/grouped.hpp
 *
 * Output-sensitive sampling with replacement.  Items are grouped by weight
 * octave [a, 2a) so rejection inside a group accepts with probability >= 1/2.
 * A small divide-and-conquer tree over the nonempty groups splits the sample
 * count k binomially, and a per-group tree keeps splitting it down disjoint
 * item ranges until a range is small enough to finish by rejection.  Every
 * binomial uses an RNG stream derived from its tree node, so the result is
 * one fixed function of the seed no matter how many workers run the tasks or
 * in which order.
 ******************************************************************************/

#pragma once

#include <wrs/binomial.hpp>
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

struct sample_entry {
    uint32_t item;
    uint64_t count;

    bool operator==(const sample_entry&) const = default;
};

struct sample_result {
    std::vector<sample_entry> entries;  // counts sum to k
    uint64_t visited_nodes = 0;         // tree nodes touched (output sensitivity)
    uint64_t rejection_draws = 0;       // accepted rejection-sampling draws
    uint64_t rejection_attempts = 0;    // total attempts; acceptance >= 1/2

    uint64_t unique_items() const { return entries.size(); }
};

class GroupedSampler {
public:
    explicit GroupedSampler(const WeightTable& wt, unsigned workers = 1)
        : n_(wt.size()) {
        workers = std::max(1u, workers);
        const double w_min = wt.min_weight();

        // Octave of each item: group g holds weights in [a_g, 2*a_g) with
        // a_g = w_min * 2^g.  The exponent difference is a first guess and
        // the loops settle boundary rounding; a_g is an exact power-of-two
        // multiple of w_min, so membership is crisp.
        std::vector<int> group_of(n_);
        int max_group = 0;
        for (size_t i = 0; i < n_; ++i) {
            int g = std::ilogb(wt[i]) - std::ilogb(w_min);
            g = std::max(g, 0);
            while (g > 0 && wt[i] < std::ldexp(w_min, g))
                --g;
            while (wt[i] >= std::ldexp(w_min, g + 1))
                ++g;
            group_of[i] = g;
            max_group = std::max(max_group, g);
        }

        // Stable counting sort by group keeps items in index order inside
        // each group.
        std::vector<uint32_t> group_size(max_group + 1, 0);
        for (size_t i = 0; i < n_; ++i)
            ++group_size[group_of[i]];
        std::vector<uint32_t> group_start(max_group + 2, 0);
        for (int g = 0; g <= max_group; ++g)
            group_start[g + 1] = group_start[g] + group_size[g];
        items_.resize(n_);
        item_weight_.resize(n_);
        {
            std::vector<uint32_t> cursor(group_start.begin(),
                                         group_start.end() - 1);
            for (size_t i = 0; i < n_; ++i) {
                const uint32_t pos = cursor[group_of[i]]++;
                items_[pos] = static_cast<uint32_t>(i);
                item_weight_[pos] = wt[i];
            }
        }

        // One record per nonempty group, ascending.
        for (int g = 0; g <= max_group; ++g) {
            if (group_size[g] == 0)
                continue;
            group_rec rec;
            rec.begin = group_start[g];
            rec.end = group_start[g + 1];
            rec.upper = std::ldexp(w_min, g + 1); // exclusive weight bound 2*a_g
            groups_.push_back(rec);
        }

        // Per-group trees, built in parallel (groups are independent).
        std::atomic<size_t> next{0};
        run_workers(workers, [&](unsigned) {
            for (size_t g = next.fetch_add(1); g < groups_.size();
                 g = next.fetch_add(1))
                build_tree(groups_[g]);
        });

        // Top tree over group weight sums.
        std::vector<double> group_weights(groups_.size());
        for (size_t g = 0; g < groups_.size(); ++g)
            group_weights[g] = groups_[g].tree[1];
        top_cap_ = std::bit_ceil(std::max<size_t>(1, group_weights.size()));
        top_tree_.assign(2 * top_cap_, 0.0);
        std::copy(group_weights.begin(), group_weights.end(),
                  top_tree_.begin() + top_cap_);
        for (size_t x = top_cap_ - 1; x >= 1; --x)
            top_tree_[x] = top_tree_[2 * x] + top_tree_[2 * x + 1];
    }

    size_t size() const { return n_; }
    size_t group_count() const { return groups_.size(); }

    // Octave invariant, exposed for verification: item weights in group g lie
    // in [upper/2, upper).
    std::pair<double, double> group_weight_range(size_t g) const {
        return {groups_[g].upper / 2, groups_[g].upper};
    }
    std::pair<size_t, size_t> group_item_range(size_t g) const {
        return {groups_[g].begin, groups_[g].end};
    }
    uint32_t sorted_item(size_t pos) const { return items_[pos]; }

    // Sample k items with replacement.  dedup=true merges equal items inside
    // each rejection batch (the OS flavour); dedup=false reports raw draws
    // (OS-ND).  Entries arrive in deterministic tree order, counts sum to k.
    sample_result sample(uint64_t seed, uint64_t k, bool dedup,
                         unsigned workers = 1) const {
        workers = std::max(1u, workers);
        sample_result result;
        if (k == 0 || n_ == 0)
            return result;
        RngStream base(seed, 0x67727073u);

        // Split k over the nonempty groups with the top tree.
        std::vector<uint64_t> group_k(groups_.size(), 0);
        uint64_t top_visited = 0;
        descend_counts(top_tree_, top_cap_, groups_.size(), base.derive(0x746f70u),
                       k, group_k, top_visited);
        result.visited_nodes += top_visited;

        // One task per loaded group; split heavy tasks a few levels down so
        // workers have something to steal.  Every split is drawn from the
        // node's own stream, so the outcome is independent of the schedule.
        struct task {
            size_t group;
            size_t node;
            size_t range_lo, range_hi; // positions in items_
            uint64_t m;
        };
        std::vector<task> tasks;
        for (size_t g = 0; g < groups_.size(); ++g)
            if (group_k[g] > 0)
                tasks.push_back({g, 1, groups_[g].begin, groups_[g].end,
                                 group_k[g]});

        const auto splittable = [&](const task& t) {
            const size_t range = t.range_hi - t.range_lo;
            return range > 1 && t.m > 1 && !(t.m < 128 && range <= 2 * t.m);
        };
        while (tasks.size() < 4 * size_t{workers}) {
            size_t best = tasks.size();
            for (size_t i = 0; i < tasks.size(); ++i)
                if (splittable(tasks[i]) &&
                    (best == tasks.size() || tasks[i].m > tasks[best].m))
                    best = i;
            if (best == tasks.size())
                break;
            const task t = tasks[best];
            const group_rec& grec = groups_[t.group];
            RngStream node_rng = group_node_stream(base, t.group, t.node);
            const auto [left, right] = child_ranges(grec, t.node, t.range_lo,
                                                    t.range_hi);
            const uint64_t ml = binomial_split(node_rng, t.m,
                                               grec.tree[2 * t.node],
                                               grec.tree[2 * t.node + 1]);
            ++result.visited_nodes;
            tasks.erase(tasks.begin() + static_cast<ptrdiff_t>(best));
            if (ml > 0)
                tasks.push_back({t.group, 2 * t.node, left.first, left.second, ml});
            if (t.m - ml > 0)
                tasks.push_back({t.group, 2 * t.node + 1, right.first,
                                 right.second, t.m - ml});
        }
        // Deterministic output order: subtree ranges are disjoint, so sorting
        // tasks by their leftmost item position makes the concatenated output
        // the plain left-to-right traversal no matter how far tasks were
        // split apart.
        std::sort(tasks.begin(), tasks.end(), [](const task& a, const task& b) {
            if (a.group != b.group)
                return a.group < b.group;
            return a.range_lo < b.range_lo;
        });

        std::vector<sample_result> parts(tasks.size());
        std::atomic<size_t> next{0};
        run_workers(workers, [&](unsigned) {
            for (size_t t = next.fetch_add(1); t < tasks.size();
                 t = next.fetch_add(1)) {
                run_task(base, tasks[t].group, tasks[t].node, tasks[t].range_lo,
                         tasks[t].range_hi, tasks[t].m, dedup, parts[t]);
            }
        });
        for (const sample_result& part : parts) {
            result.entries.insert(result.entries.end(), part.entries.begin(),
                                  part.entries.end());
            result.visited_nodes += part.visited_nodes;
            result.rejection_draws += part.rejection_draws;
            result.rejection_attempts += part.rejection_attempts;
        }
        return result;
    }

private:
    struct group_rec {
        size_t begin = 0, end = 0; // positions in items_
        double upper = 0.0;        // 2 * a_g
        size_t cap = 0;            // leaf capacity (power of two)
        std::vector<double> tree;  // implicit heap; tree[1] = group weight
    };

    void build_tree(group_rec& g) const {
        const size_t count = g.end - g.begin;
        g.cap = std::bit_ceil(std::max<size_t>(1, count));
        g.tree.assign(2 * g.cap, 0.0);
        for (size_t i = 0; i < count; ++i)
            g.tree[g.cap + i] = item_weight_[g.begin + i];
        for (size_t x = g.cap - 1; x >= 1; --x)
            g.tree[x] = g.tree[2 * x] + g.tree[2 * x + 1];
    }

    // Item-position ranges covered by the children of node x whose own range
    // is [lo, hi).  Leaves of the subtree rooted at x form a contiguous slice.
    std::pair<std::pair<size_t, size_t>, std::pair<size_t, size_t>>
    child_ranges(const group_rec& g, size_t node, size_t lo, size_t hi) const {
        // leaves under node x: width = cap / 2^depth
        size_t width = g.cap;
        size_t x = node;
        while (x > 1) {
            x /= 2;
            width /= 2;
        }
        const size_t mid = std::min(hi, lo + width / 2);
        return {{lo, mid}, {mid, hi}};
    }

    static RngStream group_node_stream(const RngStream& base, size_t group,
                                       size_t node) {
        return base.derive(0x67726f75u + group * 2 + 1).derive(node);
    }

    // Generic count splitter for the top tree (groups play the item role).
    static void descend_counts(const std::vector<double>& tree, size_t cap,
                               size_t leaves, RngStream base, uint64_t k,
                               std::vector<uint64_t>& out, uint64_t& visited) {
        struct frame {
            size_t node;
            uint64_t m;
        };
        std::vector<frame> stack{{1, k}};
        while (!stack.empty()) {
            const auto [node, m] = stack.back();
            stack.pop_back();
            if (m == 0)
                continue;
            ++visited;
            if (node >= cap) {
                const size_t leaf = node - cap;
                if (leaf >= leaves)
                    throw std::logic_error("sample count fell on padding");
                out[leaf] += m;
                continue;
            }
            RngStream node_rng = base.derive(node);
            const uint64_t ml =
                binomial_split(node_rng, m, tree[2 * node], tree[2 * node + 1]);
            stack.push_back({2 * node + 1, m - ml});
            stack.push_back({2 * node, ml});
        }
    }

    // Draw one item from [lo, hi) of group g by rejection: weights are within
    // a factor two of the bound, so each attempt accepts w.p. >= 1/2.
    uint32_t rejection_draw(const group_rec& g, size_t lo, size_t hi,
                            RngStream& rng, uint64_t& attempts) const {
        while (true) {
            ++attempts;
            const size_t pos = lo + static_cast<size_t>(rng.bounded(hi - lo));
            if (rng.uniform01() * g.upper < item_weight_[pos])
                return items_[pos];
        }
    }

    void run_task(const RngStream& base, size_t group, size_t root,
                  size_t root_lo, size_t root_hi, uint64_t root_m, bool dedup,
                  sample_result& out) const {
        const group_rec& g = groups_[group];
        struct frame {
            size_t node;
            size_t lo, hi;
            uint64_t m;
        };
        std::vector<frame> stack{{root, root_lo, root_hi, root_m}};
        std::vector<uint32_t> scratch;
        while (!stack.empty()) {
            const auto [node, lo, hi, m] = stack.back();
            stack.pop_back();
            if (m == 0)
                continue;
            ++out.visited_nodes;
            RngStream node_rng = group_node_stream(base, group, node);
            const size_t range = hi - lo;
            if (range == 1) {
                out.entries.push_back({items_[lo], m});
                continue;
            }
            if (m == 1) {
                out.entries.push_back(
                    {rejection_draw(g, lo, hi, node_rng, out.rejection_attempts),
                     1});
                ++out.rejection_draws;
                continue;
            }
            if (m < 128 && range <= 2 * m) {
                scratch.clear();
                for (uint64_t d = 0; d < m; ++d)
                    scratch.push_back(rejection_draw(g, lo, hi, node_rng,
                                                     out.rejection_attempts));
                out.rejection_draws += m;
                if (dedup) {
                    std::sort(scratch.begin(), scratch.end());
                    for (size_t i = 0; i < scratch.size();) {
                        size_t j = i;
                        while (j < scratch.size() && scratch[j] == scratch[i])
                            ++j;
                        out.entries.push_back({scratch[i], j - i});
                        i = j;
                    }
                } else {
                    for (uint32_t item : scratch)
                        out.entries.push_back({item, 1});
                }
                continue;
            }
            const auto [left, right] = child_ranges(g, node, lo, hi);
            const uint64_t ml = binomial_split(node_rng, m, g.tree[2 * node],
                                               g.tree[2 * node + 1]);
            stack.push_back({2 * node + 1, right.first, right.second, m - ml});
            stack.push_back({2 * node, left.first, left.second, ml});
        }
    }

    size_t n_;
    std::vector<uint32_t> items_;      // item ids sorted by group
    std::vector<double> item_weight_;  // weights in the same order
    std::vector<group_rec> groups_;    // nonempty groups, ascending octave
    size_t top_cap_ = 1;
    std::vector<double> top_tree_;
};

} // namespace wrs
