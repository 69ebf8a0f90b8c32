#include <doctest.h>

#include <wrs/binomial.hpp>
#include <wrs/rng.hpp>
#include <wrs/stats.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

namespace {

double log_choose(uint64_t n, uint64_t k) {
    return std::lgamma(static_cast<double>(n) + 1) -
           std::lgamma(static_cast<double>(k) + 1) -
           std::lgamma(static_cast<double>(n - k) + 1);
}

std::vector<double> binomial_pmf(uint64_t n, double p) {
    std::vector<double> pmf(n + 1);
    for (uint64_t k = 0; k <= n; ++k)
        pmf[k] = std::exp(log_choose(n, k) + k * std::log(p) +
                          (n - k) * std::log1p(-p));
    return pmf;
}

void check_distribution(uint64_t n, double p, uint64_t stream) {
    wrs::RngStream rng(0xC0FFEE, stream);
    const size_t trials = 200000;
    std::vector<uint64_t> counts(n + 1, 0);
    for (size_t t = 0; t < trials; ++t) {
        const uint64_t x = wrs::binomial(rng, n, p);
        REQUIRE(x <= n);
        ++counts[x];
    }
    const auto r = wrs::chi_square(counts, binomial_pmf(n, p), 1e-3);
    INFO("n=", n, " p=", p, " stat=", r.statistic, " crit=", r.critical);
    CHECK(r.pass);
}

} // namespace

TEST_CASE("binomial edge cases") {
    wrs::RngStream rng(1, 1);
    CHECK(wrs::binomial(rng, 0, 0.5) == 0);
    CHECK(wrs::binomial(rng, 100, 0.0) == 0);
    CHECK(wrs::binomial(rng, 100, 1.0) == 100);
    CHECK(wrs::binomial(rng, 1, 0.5) <= 1);
}

TEST_CASE("binomial matches the exact pmf across sampler regimes") {
    check_distribution(10, 0.3, 2);    // small n: inversion
    check_distribution(1000, 0.001, 3); // small mean: inversion
    check_distribution(100, 0.47, 4);  // BTRD
    check_distribution(40, 0.5, 5);    // symmetric BTRD edge
    check_distribution(35, 0.873, 6);  // p > 0.5 flip path
    check_distribution(2000, 0.25, 7); // larger BTRD
}

TEST_CASE("binomial mean and variance for a large case") {
    wrs::RngStream rng(2, 2);
    const uint64_t n = 100000;
    const double p = 0.2;
    const size_t trials = 20000;
    double sum = 0, sum2 = 0;
    for (size_t t = 0; t < trials; ++t) {
        const double x = static_cast<double>(wrs::binomial(rng, n, p));
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / trials;
    const double var = sum2 / trials - mean * mean;
    const double true_mean = n * p, true_var = n * p * (1 - p);
    CHECK(std::abs(mean - true_mean) <
          4 * std::sqrt(true_var / static_cast<double>(trials)));
    // sample variance of a binomial concentrates well at these sizes
    CHECK(std::abs(var - true_var) < 0.05 * true_var);
}

TEST_CASE("binomial_split edge behaviour and determinism") {
    wrs::RngStream a(3, 3), b(3, 3);
    CHECK(wrs::binomial_split(a, 100, 0.0, 5.0) == 0);
    CHECK(wrs::binomial_split(a, 100, 5.0, 0.0) == 100);
    CHECK(wrs::binomial_split(a, 0, 1.0, 1.0) == 0);
    // zero-weight sides consume no randomness
    CHECK(a.next() == b.next());

    wrs::RngStream c(4, 4), d(4, 4);
    for (int i = 0; i < 200; ++i) {
        const uint64_t k = 1 + (i % 50);
        const uint64_t left = wrs::binomial_split(c, k, 2.0, 3.0);
        CHECK(left <= k);
        CHECK(wrs::binomial_split(d, k, 2.0, 3.0) == left);
    }
}

TEST_CASE("binomial_split halves have the right marginal") {
    wrs::RngStream rng(5, 5);
    const uint64_t k = 60;
    const double wl = 1.0, wr = 2.0;
    const size_t trials = 200000;
    std::vector<uint64_t> counts(k + 1, 0);
    for (size_t t = 0; t < trials; ++t)
        ++counts[wrs::binomial_split(rng, k, wl, wr)];
    const auto r = wrs::chi_square(counts, binomial_pmf(k, wl / (wl + wr)), 1e-3);
    CHECK(r.pass);
}
