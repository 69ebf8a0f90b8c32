/*******************************************************************************
 * wrs/stats.hpp
 *
 * Statistical acceptance machinery: Pearson chi-square with tail merging and
 * a Kolmogorov-Smirnov distance. Quantiles come from Boost.Math; the testing
 * policy (merging, Bonferroni) lives here.
 ******************************************************************************/
#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace wrs {

struct ChiSquareResult {
    double statistic = 0.0;
    double critical = 0.0; //!< reject when statistic >= critical
    size_t df = 0;         //!< degrees of freedom after merging
    size_t cells = 0;      //!< cells entering the statistic
    bool pass = true;
};

/*!
 * Pearson goodness-of-fit test of observed counts against cell probabilities.
 * Cells whose expected count falls below `min_expect` are pooled into one
 * tail cell first (the usual validity fix for sparse tails). `p` is the
 * significance level; divide it by the number of tests when running a
 * Bonferroni-corrected suite.
 */
inline ChiSquareResult chi_square(const std::vector<uint64_t>& observed,
                                  const std::vector<double>& expected_prob,
                                  double p = 1e-3, double min_expect = 5.0) {
    if (observed.size() != expected_prob.size())
        throw std::invalid_argument("chi_square: size mismatch");
    double trials = 0.0;
    for (uint64_t c : observed)
        trials += static_cast<double>(c);

    double stat = 0.0;
    size_t cells = 0;
    double pool_obs = 0.0, pool_exp = 0.0;
    for (size_t i = 0; i < observed.size(); ++i) {
        double e = expected_prob[i] * trials;
        if (e < min_expect) {
            pool_obs += static_cast<double>(observed[i]);
            pool_exp += e;
        } else {
            double d = static_cast<double>(observed[i]) - e;
            stat += d * d / e;
            ++cells;
        }
    }
    if (pool_exp > 0.0) {
        double d = pool_obs - pool_exp;
        stat += d * d / pool_exp;
        ++cells;
    }

    ChiSquareResult r;
    r.statistic = stat;
    r.cells = cells;
    if (cells < 2) {
        // Everything collapsed into one cell; nothing left to test.
        r.df = 0;
        r.critical = 0.0;
        r.pass = true;
        return r;
    }
    r.df = cells - 1;
    boost::math::chi_squared dist(static_cast<double>(r.df));
    r.critical = boost::math::quantile(dist, 1.0 - p);
    r.pass = stat < r.critical;
    return r;
}

//! Two-sided KS distance between a sample and a reference CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

//! Asymptotic KS critical value at significance p for n draws.
inline double ks_critical(size_t n, double p) {
    return std::sqrt(-0.5 * std::log(p / 2.0)) /
           std::sqrt(static_cast<double>(n));
}

} // namespace wrs
