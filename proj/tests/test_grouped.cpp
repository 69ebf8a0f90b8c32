/*******************************************************************************
 * tests/test_grouped.cpp
 *
 * Output-sensitive sampling: octave-group invariants, count conservation,
 * determinism across worker counts, agreement between the deduplicating and
 * raw flavours, and exact multinomial distribution checks on tiny instances.
 ******************************************************************************/

#include <doctest.h>

#include <wrs/grouped.hpp>
#include <wrs/stats.hpp>
#include <wrs/verify.hpp>
#include <wrs/weight_file.hpp>

#include <algorithm>
#include <map>
#include <vector>

using namespace wrs;

namespace {

std::map<uint32_t, uint64_t> merged(const sample_result& r) {
    std::map<uint32_t, uint64_t> m;
    for (const auto& e : r.entries)
        m[e.item] += e.count;
    return m;
}

uint64_t total_count(const sample_result& r) {
    uint64_t sum = 0;
    for (const auto& e : r.entries)
        sum += e.count;
    return sum;
}

} // namespace

TEST_CASE("groups hold exactly the items within their octave") {
    std::vector<std::vector<double>> fixtures = {
        {1.0, 2.0},                          // ratio exactly two: two groups
        {1.0, 1.0, 1.0, 1.0},                // uniform: one group
        {5.0, 0.5, 1.2, 3.0, 0.3, 0.9, 2.2}, // mixed
        {1e-6, 1.0, 1e6},                    // wide dynamic range
        {0.75, 1.5, 2.9999999, 3.0},         // boundary straddlers
    };
    for (const auto& w : fixtures) {
        CAPTURE(w);
        WeightTable wt{std::vector<double>(w)};
        GroupedSampler gs(wt, 2);

        std::vector<bool> seen(w.size(), false);
        size_t covered = 0;
        double prev_upper = 0.0;
        for (size_t g = 0; g < gs.group_count(); ++g) {
            const auto [lo, hi] = gs.group_item_range(g);
            const auto [wlo, whi] = gs.group_weight_range(g);
            CHECK(wlo * 2 == whi);
            CHECK(whi > prev_upper); // ascending octaves
            prev_upper = whi;
            CHECK(lo < hi);
            uint32_t prev_item = 0;
            for (size_t pos = lo; pos < hi; ++pos) {
                const uint32_t item = gs.sorted_item(pos);
                REQUIRE(item < w.size());
                CHECK(!seen[item]);
                seen[item] = true;
                ++covered;
                CHECK(w[item] >= wlo);
                CHECK(w[item] < whi);
                if (pos > lo)
                    CHECK(item > prev_item); // stable within group
                prev_item = item;
            }
        }
        CHECK(covered == w.size());
    }
}

TEST_CASE("counts always sum to k") {
    WeightTable wt{generate_powerlaw(137, 1.5, 99)};
    GroupedSampler gs(wt, 3);
    for (uint64_t k : {1, 2, 7, 137, 5000}) {
        for (bool dedup : {true, false}) {
            auto r = gs.sample(0xfeedbeef, k, dedup, 3);
            CHECK(total_count(r) == k);
            if (dedup)
                CHECK(r.unique_items() <= std::min<uint64_t>(k, wt.size()));
            else
                CHECK(r.entries.size() <= k);
            CHECK(r.visited_nodes > 0);
        }
    }
}

TEST_CASE("output is one fixed function of the seed, not of the schedule") {
    WeightTable wt{generate_powerlaw(501, 2.0, 7)};
    GroupedSampler gs1(wt, 1);
    GroupedSampler gs4(wt, 4);
    for (bool dedup : {true, false}) {
        const auto a = gs1.sample(42, 2000, dedup, 1);
        const auto b = gs4.sample(42, 2000, dedup, 4);
        const auto c = gs4.sample(42, 2000, dedup, 7);
        CHECK(a.entries == b.entries);
        CHECK(a.entries == c.entries);
        CHECK(a.visited_nodes == b.visited_nodes);
        CHECK(a.visited_nodes == c.visited_nodes);
        // different seed must change the outcome
        const auto d = gs4.sample(43, 2000, dedup, 4);
        CHECK(a.entries != d.entries);
    }
}

TEST_CASE("dedup flavour is the raw flavour with equal items merged") {
    WeightTable wt{generate_uniform(64, 31415)};
    for (uint64_t k : {1, 10, 100, 3000}) {
        const auto os = GroupedSampler(wt, 2).sample(9, k, true, 2);
        const auto raw = GroupedSampler(wt, 2).sample(9, k, false, 2);
        CHECK(merged(os) == merged(raw));
        // dedup output never repeats an item
        std::vector<uint32_t> items;
        for (const auto& e : os.entries)
            items.push_back(e.item);
        std::vector<uint32_t> sorted = items;
        std::sort(sorted.begin(), sorted.end());
        CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    }
}

TEST_CASE("single item gets everything") {
    WeightTable wt{std::vector<double>{3.25}};
    GroupedSampler gs(wt);
    const auto r = gs.sample(5, 1000000, true, 1);
    REQUIRE(r.entries.size() == 1);
    CHECK(r.entries[0].item == 0);
    CHECK(r.entries[0].count == 1000000);
    CHECK(r.visited_nodes <= 4);
}

TEST_CASE("tiny instances match the exact multinomial law") {
    // Full outcome-space chi-square: each trial's count vector is one cell.
    struct fixture {
        std::vector<double> w;
        uint64_t k;
    };
    const std::vector<fixture> fixtures = {
        {{2.0, 1.0}, 3},
        {{1.0, 1.0, 1.0}, 2},
        {{4.0, 2.0, 1.0, 1.0}, 3},
        {{0.1, 0.2, 0.3, 0.4}, 2},
        {{8.0, 1.0, 1.0}, 4},
    };
    const size_t trials = 40000;
    for (size_t f = 0; f < fixtures.size(); ++f) {
        CAPTURE(f);
        WeightTable wt{std::vector<double>(fixtures[f].w)};
        const uint64_t k = fixtures[f].k;
        GroupedSampler gs(wt, 2);

        const auto outcomes = enumerate_multinomial(normalized_weights(wt), k);
        std::map<std::vector<uint64_t>, size_t> index;
        std::vector<double> expected(outcomes.size());
        for (size_t o = 0; o < outcomes.size(); ++o) {
            index[outcomes[o].counts] = o;
            expected[o] = outcomes[o].prob;
        }

        for (bool dedup : {true, false}) {
            std::vector<uint64_t> observed(outcomes.size(), 0);
            for (size_t t = 0; t < trials; ++t) {
                const auto r = gs.sample(0x1000 + t, k, dedup, 1);
                std::vector<uint64_t> counts(wt.size(), 0);
                for (const auto& e : r.entries)
                    counts[e.item] += e.count;
                ++observed[index.at(counts)];
            }
            const auto res = chi_square(observed, expected, 1e-4);
            CAPTURE(res.statistic);
            CAPTURE(res.critical);
            CHECK(res.pass);
        }
    }
}

TEST_CASE("item marginals on a larger instance match the weights") {
    // Sum of independent k-draw trials is one big multinomial sample.
    WeightTable wt{generate_powerlaw(50, 1.0, 4242)};
    GroupedSampler gs(wt, 4);
    const uint64_t k = 20;
    const size_t trials = 20000;
    std::vector<uint64_t> counts(wt.size(), 0);
    for (size_t t = 0; t < trials; ++t)
        for (const auto& e : gs.sample(0x2000 + t, k, true, 4).entries)
            counts[e.item] += e.count;
    const auto res = chi_square(counts, normalized_weights(wt), 1e-4);
    CAPTURE(res.statistic);
    CHECK(res.pass);
}

TEST_CASE("output size is driven by unique items, not by k") {
    WeightTable wt{generate_powerlaw(100000, 2.0, 11)};
    GroupedSampler gs(wt, 4);
    double prev_ratio = 2.0;
    for (uint64_t k : {100, 10000, 1000000}) {
        const auto r = gs.sample(77, k, true, 4);
        CHECK(total_count(r) == k);
        const double ratio =
            static_cast<double>(r.unique_items()) / static_cast<double>(k);
        CHECK(ratio < prev_ratio);
        prev_ratio = ratio;
        // touched nodes scale with the output, not with k
        CHECK(r.visited_nodes <= 64 * (r.unique_items() + 64));
    }
}
