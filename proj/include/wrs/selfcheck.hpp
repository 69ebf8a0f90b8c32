/*******************************************************************************
 * wrs/selfcheck.hpp
 *
 * Built-in verification suites, sized to run in seconds: reconstruct the
 * masses every table structure implies and compare them with the inputs,
 * chi-square the query distributions, replay the samplers against exact
 * tiny-instance oracles, and check the analytic bounds the algorithms are
 * designed around.  The CLI and the C API's verify entry point both run
 * these; the heavyweight acceptance runs live in the test suite.
 ******************************************************************************/

#pragma once

#include <wrs/alias.hpp>
#include <wrs/compressed.hpp>
#include <wrs/grouped.hpp>
#include <wrs/no_replace.hpp>
#include <wrs/permute.hpp>
#include <wrs/reservoir.hpp>
#include <wrs/stats.hpp>
#include <wrs/subset.hpp>
#include <wrs/two_level.hpp>
#include <wrs/verify.hpp>
#include <wrs/weight_file.hpp>
#include <wrs/weights.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace wrs {

struct check_result {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

inline void add(std::vector<check_result>& out, std::string name, bool pass,
                std::string detail) {
    out.push_back({std::move(name), pass, std::move(detail)});
}

} // namespace detail

// Every structure must imply the input weights to within 1e-9 relative.
inline std::vector<check_result> selfcheck_masses(uint64_t seed) {
    std::vector<check_result> out;
    std::vector<WeightTable> fixtures;
    fixtures.emplace_back(generate_powerlaw(1000, 2.0, seed));
    fixtures.emplace_back(generate_uniform(257, seed + 1));
    fixtures.emplace_back(std::vector<double>{3.0, 1.0, 1.0, 1.0});

    const auto run = [&](const std::string& name, auto&& masses_of) {
        double worst = 0.0;
        for (const WeightTable& wt : fixtures)
            worst = std::max(worst,
                             max_relative_mass_error(masses_of(wt), wt));
        detail::add(out, "masses/" + name, worst <= 1e-9,
                    "max rel err " + detail::fmt(worst));
    };
    run("vose", [](const WeightTable& wt) {
        return implied_masses(AliasTable(wt, AliasTable::Build::vose));
    });
    run("sweep", [](const WeightTable& wt) {
        return implied_masses(AliasTable(wt, AliasTable::Build::sweep));
    });
    run("psa-p1", [](const WeightTable& wt) {
        return implied_masses(AliasTable(wt, AliasTable::Build::psa, 1));
    });
    run("psa-p4", [](const WeightTable& wt) {
        return implied_masses(AliasTable(wt, AliasTable::Build::psa, 4));
    });
    run("two-level", [](const WeightTable& wt) {
        return implied_masses(TwoLevelTable(wt, AliasTable::Build::vose, 2, 4));
    });
    run("compressed", [](const WeightTable& wt) {
        return implied_masses(CompressedTable(wt));
    });
    return out;
}

// Query frequencies against the weights for each structure family.
inline std::vector<check_result> selfcheck_chisq(uint64_t seed) {
    std::vector<check_result> out;
    WeightTable wt{std::vector<double>{3.0, 1.0, 1.0, 1.0, 2.0, 0.5}};
    const auto expected = normalized_weights(wt);
    const uint64_t draws = 200000;

    const auto run = [&](const std::string& name, const auto& table) {
        std::vector<uint32_t> sample;
        table.sample_many(seed, draws, 2, sample);
        const auto res = chi_square(tally(sample, wt.size()), expected, 1e-3);
        detail::add(out, "chisq/" + name, res.pass,
                    "stat " + detail::fmt(res.statistic) + " crit " +
                        detail::fmt(res.critical));
    };
    run("alias", AliasTable(wt, AliasTable::Build::psa, 4));
    run("two-level", TwoLevelTable(wt, AliasTable::Build::sweep, 2, 3));
    run("compressed", CompressedTable(wt));
    return out;
}

// Tiny-instance laws, each against an exact enumeration.
inline std::vector<check_result> selfcheck_oracle(uint64_t seed) {
    std::vector<check_result> out;
    const size_t trials = 20000;

    { // with replacement: full outcome space of (counts per item)
        const std::vector<double> w = {2.0, 1.0, 1.0};
        const uint64_t k = 3;
        WeightTable wt{std::vector<double>(w)};
        GroupedSampler gs(wt, 2);
        const auto outcomes = enumerate_multinomial(normalized_weights(wt), k);
        std::map<std::vector<uint64_t>, size_t> index;
        std::vector<double> expected(outcomes.size());
        for (size_t o = 0; o < outcomes.size(); ++o) {
            index[outcomes[o].counts] = o;
            expected[o] = outcomes[o].prob;
        }
        std::vector<uint64_t> observed(outcomes.size(), 0);
        for (size_t t = 0; t < trials; ++t) {
            std::vector<uint64_t> counts(w.size(), 0);
            for (const auto& e : gs.sample(seed + t, k, true, 2).entries)
                counts[e.item] += e.count;
            ++observed[index.at(counts)];
        }
        const auto res = chi_square(observed, expected, 1e-4);
        detail::add(out, "oracle/with-replacement", res.pass,
                    "stat " + detail::fmt(res.statistic));
    }

    { // without replacement: subset law, extensions included
        const std::vector<double> w = {2.0, 1.0, 1.0};
        const uint64_t k = 2;
        WeightTable wt{std::vector<double>(w)};
        WithoutReplacementSampler s(wt, 2);
        const auto oracle = enumerate_without_replacement(w, k);
        std::map<uint64_t, size_t> index;
        std::vector<double> expected(oracle.size());
        for (size_t o = 0; o < oracle.size(); ++o) {
            index[oracle[o].first] = o;
            expected[o] = oracle[o].second;
        }
        std::vector<uint64_t> observed(oracle.size(), 0);
        for (size_t t = 0; t < trials; ++t) {
            uint64_t mask = 0;
            for (uint32_t item : s.sample(seed + t, k, 2))
                mask |= uint64_t{1} << item;
            ++observed[index.at(mask)];
        }
        const auto res = chi_square(observed, expected, 1e-4);
        detail::add(out, "oracle/without-replacement", res.pass,
                    "stat " + detail::fmt(res.statistic));
    }

    { // permutation: all orders of three items
        const std::vector<double> w = {2.0, 1.0, 1.0};
        WeightTable wt{std::vector<double>(w)};
        Permuter p(wt);
        std::map<std::vector<uint32_t>, size_t> index;
        std::vector<double> expected;
        std::vector<uint32_t> perm = {0, 1, 2};
        do {
            index[perm] = expected.size();
            expected.push_back(w[perm[0]] / 4.0 * w[perm[1]] /
                               (4.0 - w[perm[0]]));
        } while (std::next_permutation(perm.begin(), perm.end()));
        std::vector<uint64_t> observed(expected.size(), 0);
        for (size_t t = 0; t < trials; ++t)
            ++observed[index.at(p.permute(seed + t))];
        const auto res = chi_square(observed, expected, 1e-4);
        detail::add(out, "oracle/permutation", res.pass,
                    "stat " + detail::fmt(res.statistic));
    }

    { // subset: exact Poisson-binomial size law
        RngStream rng(seed, 0x73636b70u);
        std::vector<double> p(12);
        for (auto& x : p)
            do {
                x = rng.uniform01();
            } while (x == 0.0);
        WeightTable wt{std::vector<double>(p)};
        SubsetSampler s(wt);
        const auto pmf = poisson_binomial_pmf(p);
        std::vector<uint64_t> observed(pmf.size(), 0);
        for (size_t t = 0; t < trials; ++t)
            ++observed[s.sample(seed + t, 2).size()];
        const auto res = chi_square(observed, pmf, 1e-4);
        detail::add(out, "oracle/subset", res.pass,
                    "stat " + detail::fmt(res.statistic));
    }

    { // reservoir: same subset law through the mini-batch pipeline
        const std::vector<double> w = {4.0, 2.0, 1.0, 1.0, 0.5};
        const size_t k = 2;
        const auto oracle = enumerate_without_replacement(w, k);
        std::map<uint64_t, size_t> index;
        std::vector<double> expected(oracle.size());
        for (size_t o = 0; o < oracle.size(); ++o) {
            index[oracle[o].first] = o;
            expected[o] = oracle[o].second;
        }
        std::vector<uint32_t> ids = {0, 1, 2, 3, 4};
        std::vector<uint64_t> observed(oracle.size(), 0);
        for (size_t t = 0; t < trials; ++t) {
            Reservoir r(k, 2, seed + t);
            r.push(ids.data(), w.data(), 3);
            r.push(ids.data() + 3, w.data() + 3, 2);
            uint64_t mask = 0;
            for (const reservoir_entry& e : r.sample())
                mask |= uint64_t{1} << e.item;
            ++observed[index.at(mask)];
        }
        const auto res = chi_square(observed, expected, 1e-4);
        detail::add(out, "oracle/reservoir", res.pass,
                    "stat " + detail::fmt(res.statistic));
    }
    return out;
}

// Analytic guarantees: distinct-count sandwich, estimate bracketing,
// permutation load claims, rejection acceptance, reservoir insertions.
inline std::vector<check_result> selfcheck_bounds(uint64_t seed) {
    std::vector<check_result> out;

    { // (1 - 1/e) t <= E[distinct] <= t, and group estimate within [t, 2t]
        WeightTable wt{generate_powerlaw(200, 1.5, seed)};
        WithoutReplacementSampler s(wt);
        bool sandwich = true, bracket = true;
        const double floor_factor = 1.0 - 1.0 / std::numbers::e;
        for (double ell : {1.0, 4.0, 32.0, 512.0, 1e5}) {
            const double t = unique_upper_profile(wt, ell);
            const double e = expected_unique_items(wt, ell);
            const double g = s.estimate_unique(ell);
            sandwich &= e <= t * (1 + 1e-12) &&
                        e >= floor_factor * t * (1 - 1e-12);
            bracket &= g >= t * (1 - 1e-9) && g <= 2 * t * (1 + 1e-9);
        }
        detail::add(out, "bounds/distinct-sandwich", sandwich, "analytic");
        detail::add(out, "bounds/estimate-bracket", bracket, "analytic");
    }

    { // permutation: occupancy peak <= 1/e, expected off-directory <= 2
        WeightTable wt{generate_powerlaw(64, 1.0, seed + 1)};
        Permuter p(wt);
        double peak = 0.0;
        for (int64_t b = -1; b <= p.last_bucket(); ++b)
            peak = std::max(peak, p.expected_occupancy(b));
        detail::add(out, "bounds/bucket-occupancy", peak <= 1.0 / std::numbers::e + 1e-9,
                    "peak " + detail::fmt(peak));
        const double clamped = p.expected_clamped();
        detail::add(out, "bounds/off-directory", clamped <= 2.0,
                    "expected " + detail::fmt(clamped));
    }

    { // rejection acceptance stays at one-half or better
        WeightTable wt{generate_powerlaw(500, 1.0, seed + 2)};
        GroupedSampler gs(wt, 2);
        uint64_t draws = 0, attempts = 0;
        for (size_t t = 0; t < 50; ++t) {
            const auto r = gs.sample(seed + 100 + t, 400, true, 2);
            draws += r.rejection_draws;
            attempts += r.rejection_attempts;
        }
        const double a = static_cast<double>(attempts);
        const double rate =
            attempts ? 1.0 - static_cast<double>(draws) / a : 0.0;
        const bool pass = rate <= 0.5 + 4.0 * 0.5 / std::sqrt(std::max(1.0, a));
        detail::add(out, "bounds/rejection-rate", pass,
                    "rate " + detail::fmt(rate));
    }

    { // reservoir inserts logarithmically once full
        const size_t n = 20000, k = 200;
        WeightTable wt{generate_uniform(n, seed + 3)};
        Reservoir r(k, 4, seed + 4);
        std::vector<uint32_t> ids(n);
        for (size_t i = 0; i < n; ++i)
            ids[i] = static_cast<uint32_t>(i);
        for (size_t lo = 0; lo < n; lo += k)
            r.push(ids.data() + lo, wt.data() + lo, std::min(k, n - lo));
        const double kd = static_cast<double>(k);
        const double bound =
            kd * (1.0 + std::log(static_cast<double>(n) / kd)) + kd;
        const double got = static_cast<double>(r.insertions());
        detail::add(out, "bounds/reservoir-insertions",
                    got <= bound + 4.0 * std::sqrt(bound),
                    detail::fmt(got) + " vs " + detail::fmt(bound));
    }
    return out;
}

inline std::vector<check_result> run_selfcheck(const std::string& suite,
                                               uint64_t seed) {
    std::vector<check_result> out;
    const auto append = [&](std::vector<check_result> part) {
        out.insert(out.end(), part.begin(), part.end());
    };
    if (suite == "masses" || suite == "all")
        append(selfcheck_masses(seed));
    if (suite == "chisq" || suite == "all")
        append(selfcheck_chisq(seed));
    if (suite == "oracle" || suite == "all")
        append(selfcheck_oracle(seed));
    if (suite == "bounds" || suite == "all")
        append(selfcheck_bounds(seed));
    if (out.empty() && suite != "all")
        throw std::invalid_argument("unknown verification suite: " + suite);
    return out;
}

} // namespace wrs
