/*******************************************************************************
 * wrs/binomial.hpp
 *
 * Binomial variates for the recursive sample splitters. Small regime uses
 * CDF inversion; large regime uses Hoermann's BTRD transformed rejection,
 * which needs floor((n+1)p) >= 11 to be valid.
 ******************************************************************************/
#pragma once

#include <wrs/rng.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>

namespace wrs {

namespace detail {

//! Stirling series correction to log k! used by BTRD's tail test.
inline double binom_fc(int64_t k) {
    static const double table[10] = {
        0.08106146679532726,  0.04134069595540929,  0.02767792568499834,
        0.02079067210376509,  0.01664469118982119,  0.01387612882307075,
        0.01189670994589177,  0.01041126526197209,  0.009255462182712733,
        0.008330563433362871};
    if (k < 10)
        return table[k];
    double r = 1.0 / static_cast<double>(k + 1);
    return (1.0 / 12 - (1.0 / 360 - (1.0 / 1260) * r * r) * r * r) * r;
}

//! Sequential CDF walk; expected steps 1 + np. Requires p <= 0.5.
inline uint64_t binom_inversion(RngStream& rng, uint64_t n, double p) {
    double q = 1.0 - p;
    double s = p / q;
    double a = static_cast<double>(n + 1) * s;
    double r = std::pow(q, static_cast<double>(n));
    for (;;) {
        double u = rng.uniform01();
        uint64_t x = 0;
        double pm = r;
        bool ok = true;
        while (u > pm) {
            u -= pm;
            ++x;
            if (x > n) {
                // Rounded-off tail mass; the draw is invalid, try again.
                ok = false;
                break;
            }
            double next = (a / static_cast<double>(x) - s) * pm;
            if (next < std::numeric_limits<double>::min() && next < pm)
                return x > n ? n : x; // pmf numerically zero past here
            pm = next;
        }
        if (ok)
            return x;
    }
}

//! BTRD rejection sampler; requires p <= 0.5 and m = floor((n+1)p) >= 11.
inline uint64_t binom_btrd(RngStream& rng, uint64_t n, double p) {
    double nd = static_cast<double>(n);
    int64_t m = static_cast<int64_t>(std::floor((nd + 1) * p));
    double r = p / (1 - p);
    double nr = (nd + 1) * r;
    double npq = nd * p * (1 - p);
    double sq = std::sqrt(npq);
    double b = 1.15 + 2.53 * sq;
    double a = -0.0873 + 0.0248 * b + 0.01 * p;
    double c = nd * p + 0.5;
    double alpha = (2.83 + 5.1 / b) * sq;
    double v_r = 0.92 - 4.2 / b;
    double u_rv_r = 0.86 * v_r;

    for (;;) {
        double v = rng.uniform01();
        double u;
        if (v <= u_rv_r) {
            u = v / v_r - 0.43;
            double x = std::floor((2 * a / (0.5 - std::abs(u)) + b) * u + c);
            return static_cast<uint64_t>(x);
        }
        if (v >= v_r) {
            u = rng.uniform01() - 0.5;
        } else {
            u = v / v_r - 0.93;
            u = (u < 0 ? -0.5 : 0.5) - u;
            v = rng.uniform01() * v_r;
        }
        double us = 0.5 - std::abs(u);
        double kd = std::floor((2 * a / us + b) * u + c);
        if (kd < 0 || kd > nd)
            continue;
        int64_t k = static_cast<int64_t>(kd);
        v = v * alpha / (a / (us * us) + b);
        int64_t km = std::llabs(k - m);
        if (km <= 15) {
            // Evaluate the pmf ratio f(k)/f(m) by direct recursion.
            double f = 1.0;
            if (m < k) {
                for (int64_t i = m + 1; i <= k; ++i)
                    f *= nr / static_cast<double>(i) - r;
            } else if (m > k) {
                for (int64_t i = k + 1; i <= m; ++i)
                    v *= nr / static_cast<double>(i) - r;
            }
            if (v <= f)
                return static_cast<uint64_t>(k);
            continue;
        }
        // Squeeze, then the full Stirling-corrected acceptance test.
        double kmd = static_cast<double>(km);
        v = std::log(v);
        double rho =
            (kmd / npq) * (((kmd / 3 + 0.625) * kmd + 1.0 / 6) / npq + 0.5);
        double t = -kmd * kmd / (2 * npq);
        if (v < t - rho)
            return static_cast<uint64_t>(k);
        if (v > t + rho)
            continue;
        double md = static_cast<double>(m);
        double nm = nd - md + 1;
        double h = (md + 0.5) * std::log((md + 1) / (r * nm)) + binom_fc(m) +
                   binom_fc(static_cast<int64_t>(nd - md));
        double nk = nd - kd + 1;
        if (v <= h + (nd + 1) * std::log(nm / nk) +
                     (kd + 0.5) * std::log(nk * r / (kd + 1)) - binom_fc(k) -
                     binom_fc(static_cast<int64_t>(nd - kd)))
            return static_cast<uint64_t>(k);
    }
}

} // namespace detail

//! Draw from Binomial(n, p).
inline uint64_t binomial(RngStream& rng, uint64_t n, double p) {
    if (n == 0 || p <= 0.0)
        return 0;
    if (p >= 1.0)
        return n;
    bool flip = p > 0.5;
    double ps = flip ? 1.0 - p : p;
    uint64_t x;
    if (n < 32 || std::floor((static_cast<double>(n) + 1) * ps) < 11.0)
        x = detail::binom_inversion(rng, n, ps);
    else
        x = detail::binom_btrd(rng, n, ps);
    if (x > n)
        x = n; // floating-point tail guard
    return flip ? n - x : x;
}

/*!
 * Split k samples between a left part of weight wl and a right part of
 * weight wr; returns how many go left. Zero-weight sides short-circuit
 * without consuming randomness.
 */
inline uint64_t binomial_split(RngStream& rng, uint64_t k, double wl,
                               double wr) {
    if (k == 0)
        return 0;
    if (wl <= 0.0)
        return 0;
    if (wr <= 0.0)
        return k;
    return binomial(rng, k, wl / (wl + wr));
}

} // namespace wrs
