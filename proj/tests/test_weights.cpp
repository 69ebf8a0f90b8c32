#include <doctest.h>

#include <wrs/rng.hpp>
#include <wrs/verify.hpp>
#include <wrs/weight_file.hpp>
#include <wrs/weights.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

TEST_CASE("weight validation rejects bad inputs") {
    CHECK_THROWS_AS(wrs::WeightTable(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(wrs::WeightTable({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(wrs::WeightTable({1.0, -2.0}), std::invalid_argument);
    CHECK_THROWS_AS(wrs::WeightTable({1.0, std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(wrs::WeightTable({std::numeric_limits<double>::infinity()}),
                    std::invalid_argument);
}

TEST_CASE("summary statistics") {
    wrs::WeightTable wt({4.0, 1.0, 2.0, 8.0});
    CHECK(wt.total() == 15.0);
    CHECK(wt.min_weight() == 1.0);
    CHECK(wt.max_weight() == 8.0);
    CHECK(wt.ratio() == 8.0);
    CHECK(wt.size() == 4);
    CHECK(wt[3] == 8.0);
}

TEST_CASE("pairwise total keeps precision over mixed magnitudes") {
    wrs::RngStream rng(11, 0);
    std::vector<double> w(100000);
    for (auto& v : w)
        v = std::pow(10.0, rng.uniform01() * 12 - 6) * (1.0 - rng.uniform01());
    for (auto& v : w)
        if (v <= 0)
            v = 1e-6;
    wrs::WeightTable wt(w);
    wrs::kahan_sum exact;
    for (double v : w)
        exact.add(v);
    CHECK(std::abs(wt.total() - exact.value()) <= 1e-12 * exact.value());
}

TEST_CASE("weight files round-trip") {
    const std::string path = "test_weights_roundtrip.wrs";
    const auto w = wrs::generate_powerlaw(1000, 1.5, 99);
    wrs::write_weights(path, w);
    const auto r = wrs::read_weights(path);
    REQUIRE(r.size() == w.size());
    for (size_t i = 0; i < w.size(); ++i)
        REQUIRE(r[i] == w[i]);
    std::remove(path.c_str());
}

TEST_CASE("weight file rejects garbage") {
    const std::string path = "test_weights_garbage.bin";
    std::FILE* f = std::fopen(path.c_str(), "wb");
    REQUIRE(f);
    std::fputs("not a weight file at all", f);
    std::fclose(f);
    CHECK_THROWS_AS(wrs::read_weights(path), wrs::format_error);
    CHECK_THROWS_AS(wrs::read_weights("no_such_file_anywhere.wrs"), wrs::io_error);
    std::remove(path.c_str());
}

TEST_CASE("generators produce valid weight vectors") {
    const auto u = wrs::generate_uniform(5000, 1);
    for (double v : u) {
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
    }
    const auto p = wrs::generate_powerlaw(5000, 2.0, 1);
    double mx = 0, mn = 1e300;
    for (double v : p) {
        REQUIRE(v > 0.0);
        mx = std::max(mx, v);
        mn = std::min(mn, v);
    }
    CHECK(mx == 1.0); // weight 1^-2 is always present
    CHECK(mn == std::pow(5000.0, -2.0));

    // same seed, same vector; different seed, different order
    const auto p2 = wrs::generate_powerlaw(5000, 2.0, 1);
    CHECK(p == p2);
    const auto p3 = wrs::generate_powerlaw(5000, 2.0, 2);
    CHECK(p != p3);
}
