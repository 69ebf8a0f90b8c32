#include <doctest.h>

#include <wrs/parallel.hpp>
#include <wrs/rng.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <vector>

TEST_CASE("worker_slice partitions the range") {
    for (size_t n : {0ul, 1ul, 7ul, 64ul, 1000ul, 1001ul}) {
        for (unsigned workers : {1u, 2u, 3u, 8u, 16u}) {
            size_t covered = 0, prev_hi = 0;
            for (unsigned w = 0; w < workers; ++w) {
                const auto [lo, hi] = wrs::worker_slice(n, workers, w);
                REQUIRE(lo == prev_hi);
                REQUIRE(hi >= lo);
                covered += hi - lo;
                prev_hi = hi;
                // balanced within one element
                CHECK(hi - lo <= (n + workers - 1) / workers);
            }
            REQUIRE(prev_hi == n);
            REQUIRE(covered == n);
        }
    }
}

TEST_CASE("run_workers executes every worker exactly once") {
    for (unsigned workers : {1u, 2u, 5u, 12u}) {
        std::vector<std::atomic<int>> hits(workers);
        wrs::run_workers(workers, [&](unsigned w) { hits[w].fetch_add(1); });
        for (unsigned w = 0; w < workers; ++w)
            CHECK(hits[w].load() == 1);
    }
}

TEST_CASE("for_blocks covers all indices exactly once") {
    const size_t n = 100000;
    std::vector<std::atomic<uint8_t>> seen(n);
    wrs::for_blocks(n, 1024, 4, [&](size_t, size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i)
            seen[i].fetch_add(1);
    });
    for (size_t i = 0; i < n; ++i)
        REQUIRE(seen[i].load() == 1);
}

TEST_CASE("prefix sums match a careful sequential sum") {
    wrs::RngStream rng(7, 7);
    const size_t n = 50000;
    std::vector<double> in(n), out(n);
    for (auto& v : in)
        v = rng.uniform01() * std::pow(10.0, rng.uniform01() * 6 - 3);
    wrs::prefix_sums(in.data(), out.data(), n, 4);

    long double acc = 0.0L;
    for (size_t i = 0; i < n; ++i) {
        acc += in[i];
        REQUIRE(std::abs(out[i] - static_cast<double>(acc)) <=
                1e-12 * static_cast<double>(acc));
    }
}

TEST_CASE("prefix sums are identical for every worker count") {
    wrs::RngStream rng(8, 8);
    const size_t n = 30011; // not a multiple of the scan block
    std::vector<double> in(n);
    for (auto& v : in)
        v = rng.uniform01();
    std::vector<double> ref(n);
    wrs::prefix_sums(in.data(), ref.data(), n, 1);
    for (unsigned workers : {2u, 3u, 4u, 7u, 16u}) {
        std::vector<double> out(n);
        wrs::prefix_sums(in.data(), out.data(), n, workers);
        for (size_t i = 0; i < n; ++i)
            REQUIRE(out[i] == ref[i]); // bitwise equal
    }
}

TEST_CASE("prefix sums handle tiny inputs") {
    std::vector<double> one{2.5}, out(1);
    wrs::prefix_sums(one.data(), out.data(), 1, 8);
    CHECK(out[0] == 2.5);
    wrs::prefix_sums(one.data(), out.data(), 0, 3); // must not touch anything
}
