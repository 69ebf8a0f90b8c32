#include <doctest.h>

#include <wrs/compressed.hpp>
#include <wrs/rng.hpp>
#include <wrs/stats.hpp>
#include <wrs/verify.hpp>
#include <wrs/weight_file.hpp>

#include <cmath>
#include <vector>

using wrs::CompressedTable;

TEST_CASE("uniform weights accept every query on the first try") {
    wrs::WeightTable wt({1, 1, 1, 1});
    CompressedTable t(wt);
    CHECK(t.virtual_buckets() == 4);
    const auto counts = t.bucket_counts();
    for (size_t i = 0; i < 4; ++i) {
        CHECK(counts[i] == 1);
        CHECK(t.accept_threshold(i) == 1.0);
    }
    const auto masses = wrs::implied_masses(t);
    for (size_t i = 0; i < 4; ++i)
        CHECK(masses[i] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bucket total never exceeds 2n") {
    wrs::RngStream rng(31, 0);
    for (size_t n : {2ul, 17ul, 256ul, 1000ul}) {
        for (double s : {0.0, 1.0, 2.0}) {
            const auto w = s == 0.0 ? wrs::generate_uniform(n, rng.next())
                                    : wrs::generate_powerlaw(n, s, rng.next());
            CompressedTable t{wrs::WeightTable(w)};
            CHECK(t.virtual_buckets() <= 2 * n);
            CHECK(t.virtual_buckets() >= n);
        }
    }
    // adversarial: every weight just below its own mean share
    std::vector<double> tricky(100, 1.0);
    tricky[0] = 1.0000001;
    CompressedTable t{wrs::WeightTable(tricky)};
    CHECK(t.virtual_buckets() <= 200);
}

TEST_CASE("rank matches a bit-by-bit count") {
    const auto w = wrs::generate_powerlaw(257, 1.3, 77);
    CompressedTable t{wrs::WeightTable(w)};
    uint64_t ones = 0;
    for (uint64_t j = 0; j < t.virtual_buckets(); ++j) {
        REQUIRE(t.rank1(j) == ones);
        ones += t.bucket_starts_item(j);
    }
    REQUIRE(t.rank1(t.virtual_buckets()) == ones);
    REQUIRE(ones == 257); // one start bit per item
}

TEST_CASE("implied masses reproduce the weights") {
    wrs::RngStream rng(32, 0);
    for (size_t n : {2ul, 64ul, 1000ul}) {
        for (double s : {0.5, 2.0}) {
            wrs::WeightTable wt(wrs::generate_powerlaw(n, s, rng.next()));
            CompressedTable t(wt);
            const double err =
                wrs::max_relative_mass_error(wrs::implied_masses(t), wt);
            INFO("n ", n, " s ", s, " err ", err);
            CHECK(err <= 1e-9);
        }
    }
}

TEST_CASE("integer scaled weights keep threshold one") {
    // weights 2,1,1 scale to 1.5,0.75,0.75 -> ceils 2,1,1, m=4
    wrs::WeightTable wt({2, 1, 1});
    CompressedTable t(wt);
    CHECK(t.virtual_buckets() == 4);
    const auto counts = t.bucket_counts();
    CHECK(counts[0] == 2);
    CHECK(counts[1] == 1);
    CHECK(counts[2] == 1);
    CHECK(wrs::max_relative_mass_error(wrs::implied_masses(t), wt) <= 1e-12);
}

TEST_CASE("compressed samples follow the weights") {
    wrs::WeightTable wt({3, 1, 1, 1});
    CompressedTable t(wt);
    wrs::RngStream rng(0xC0FFEE, 29);
    std::vector<uint64_t> counts(4, 0);
    for (int i = 0; i < 400000; ++i)
        ++counts[t.sample(rng)];
    const auto r = wrs::chi_square(counts, wrs::normalized_weights(wt), 1e-3);
    INFO("stat ", r.statistic);
    CHECK(r.pass);
}

TEST_CASE("bulk compressed sampling reproduces") {
    const auto w = wrs::generate_powerlaw(500, 1.0, 13);
    wrs::WeightTable wt(w);
    CompressedTable t(wt);
    std::vector<uint32_t> a, b;
    t.sample_many(3, 60000, 4, a);
    t.sample_many(3, 60000, 4, b);
    CHECK(a == b);
    const auto counts = wrs::tally(a, wt.size());
    CHECK(wrs::chi_square(counts, wrs::normalized_weights(wt), 1e-3).pass);
}
