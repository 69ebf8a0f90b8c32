/*******************************************************************************
 * tests/test_subset.cpp
 *
 * Independent-inclusion sampling: octave bucket invariants, per-item
 * marginals, independence (covariance), the exact Poisson-binomial law of
 * the subset size, and schedule independence of the skip scanner.
 ******************************************************************************/

#include <doctest.h>

#include <wrs/rng.hpp>
#include <wrs/stats.hpp>
#include <wrs/subset.hpp>
#include <wrs/verify.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace wrs;

namespace {

std::vector<double> random_probs(size_t n, uint64_t seed, double scale = 1.0) {
    RngStream rng(seed, 0x70726f62u);
    std::vector<double> p(n);
    for (auto& x : p)
        do {
            x = rng.uniform01() * scale;
        } while (x == 0.0);
    return p;
}

} // namespace

TEST_CASE("probabilities above one are rejected") {
    CHECK_THROWS_AS(SubsetSampler(WeightTable{std::vector<double>{0.5, 1.25}}),
                    std::invalid_argument);
    CHECK_NOTHROW(SubsetSampler(WeightTable{std::vector<double>{0.5, 1.0}}));
}

TEST_CASE("buckets hold their octave and accept at one-half or better") {
    const std::vector<double> fixed = {1.0, 0.5, 0.3, 0.25, 0.51, 1e-7, 0.026};
    for (uint64_t seed : {0, 1, 2}) {
        std::vector<double> p =
            seed == 0 ? fixed : random_probs(300, seed);
        WeightTable wt{std::vector<double>(p)};
        SubsetSampler s(wt);

        size_t covered = 0;
        for (size_t b = 0; b < s.bucket_count(); ++b) {
            const auto [lo, hi] = s.bucket_range(b);
            const double upper = std::ldexp(1.0, -static_cast<int>(b));
            for (size_t pos = lo; pos < hi; ++pos) {
                ++covered;
                const double w = s.sorted_prob(pos);
                CHECK(w == p[s.sorted_item(pos)]);
                CHECK(w <= upper);
                if (b + 1 < s.bucket_count())
                    CHECK(w >= upper / 2);
                CHECK(w <= s.bucket_max(b));
                if (b + 1 < s.bucket_count())
                    CHECK(w >= s.bucket_max(b) / 2); // acceptance >= 1/2
            }
        }
        CHECK(covered == p.size());
    }

    // the worked octaves: 0.5 and 1.0 share the top bucket, 0.3 and 0.25
    // the next one down
    WeightTable wt{std::vector<double>{0.5, 0.3, 0.25, 1.0}};
    SubsetSampler s(wt);
    auto bucket_of = [&](uint32_t item) {
        for (size_t b = 0; b < s.bucket_count(); ++b) {
            const auto [lo, hi] = s.bucket_range(b);
            for (size_t pos = lo; pos < hi; ++pos)
                if (s.sorted_item(pos) == item)
                    return b;
        }
        return s.bucket_count();
    };
    CHECK(bucket_of(0) == 0);
    CHECK(bucket_of(3) == 0);
    CHECK(bucket_of(1) == 1);
    CHECK(bucket_of(2) == 1);
}

TEST_CASE("per-item inclusion frequencies match the probabilities") {
    const std::vector<double> p = random_probs(60, 42);
    WeightTable wt{std::vector<double>(p)};
    SubsetSampler s(wt);
    const size_t trials = 40000;
    std::vector<uint64_t> hits(p.size(), 0);
    for (size_t t = 0; t < trials; ++t)
        for (uint32_t item : s.sample(0xa000 + t, 2))
            ++hits[item];
    for (size_t i = 0; i < p.size(); ++i) {
        const double freq =
            static_cast<double>(hits[i]) / static_cast<double>(trials);
        const double sigma =
            std::sqrt(p[i] * (1 - p[i]) / static_cast<double>(trials));
        CAPTURE(i);
        CHECK(std::abs(freq - p[i]) <= 5 * sigma + 1e-12);
    }
}

TEST_CASE("mean subset size and pairwise covariances behave independently") {
    const std::vector<double> p = random_probs(40, 7);
    WeightTable wt{std::vector<double>(p)};
    SubsetSampler s(wt);
    const size_t trials = 30000;

    double esize = 0.0, var = 0.0;
    for (double w : p) {
        esize += w;
        var += w * (1 - w);
    }

    const std::vector<std::pair<size_t, size_t>> pairs = {
        {0, 1}, {5, 17}, {20, 39}};
    std::vector<double> cov(pairs.size(), 0.0);
    double mean = 0.0;
    std::vector<uint8_t> in(p.size());
    for (size_t t = 0; t < trials; ++t) {
        std::fill(in.begin(), in.end(), 0);
        const auto sample = s.sample(0xb000 + t, 1);
        mean += static_cast<double>(sample.size());
        for (uint32_t item : sample)
            in[item] = 1;
        for (size_t q = 0; q < pairs.size(); ++q)
            cov[q] += (in[pairs[q].first] - p[pairs[q].first]) *
                      (in[pairs[q].second] - p[pairs[q].second]);
    }
    mean /= static_cast<double>(trials);
    CHECK(std::abs(mean - esize) <=
          4 * std::sqrt(var / static_cast<double>(trials)));
    for (size_t q = 0; q < pairs.size(); ++q) {
        const auto [i, j] = pairs[q];
        const double sigma = std::sqrt(
            p[i] * (1 - p[i]) * p[j] * (1 - p[j]) / static_cast<double>(trials));
        CHECK(std::abs(cov[q] / static_cast<double>(trials)) <= 4 * sigma);
    }
}

TEST_CASE("subset size follows the exact Poisson-binomial law") {
    const std::vector<double> p = random_probs(25, 99);
    WeightTable wt{std::vector<double>(p)};
    SubsetSampler s(wt);
    const auto pmf = poisson_binomial_pmf(p);

    const size_t trials = 40000;
    std::vector<uint64_t> observed(pmf.size(), 0);
    for (size_t t = 0; t < trials; ++t)
        ++observed[s.sample(0xc000 + t, 2).size()];
    const auto res = chi_square(observed, pmf, 1e-4);
    CAPTURE(res.statistic);
    CAPTURE(res.critical);
    CHECK(res.pass);
}

TEST_CASE("output is sorted, duplicate-free, and schedule independent") {
    const std::vector<double> p = random_probs(5000, 3, 0.02);
    WeightTable wt{std::vector<double>(p)};
    SubsetSampler s(wt);
    const auto a = s.sample(77, 1);
    const auto b = s.sample(77, 4);
    const auto c = s.sample(77, 7);
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a != s.sample(78, 1));
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
    for (uint32_t item : a)
        CHECK(item < p.size());
}

TEST_CASE("certain and near-impossible inclusions") {
    // all-ones: every sample is the full set
    WeightTable ones{std::vector<double>(37, 1.0)};
    SubsetSampler s1(ones);
    for (uint64_t seed : {1, 2, 3}) {
        const auto r = s1.sample(seed);
        REQUIRE(r.size() == 37);
        for (size_t i = 0; i < r.size(); ++i)
            CHECK(r[i] == i);
    }

    // vanishing probabilities: the scan must stay cheap and usually empty
    WeightTable tiny{std::vector<double>(100000, 1e-9)};
    SubsetSampler s2(tiny);
    size_t total = 0;
    for (uint64_t seed = 0; seed < 50; ++seed)
        total += s2.sample(seed, 2).size();
    CHECK(total <= 3); // E[total] = 5e-3
}
