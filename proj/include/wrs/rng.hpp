/*******************************************************************************
 * wrs/rng.hpp
 *
 * Counter-based pseudorandom streams. Every (seed, stream id) pair names an
 * independent sequence that can be created anywhere without coordination,
 * which is what lets workers and recursion nodes draw reproducibly.
 ******************************************************************************/
#pragma once

#include <cmath>
#include <cstdint>

namespace wrs {

// SplitMix64 finalizer: a strong 64-bit mixing bijection.
inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * UINT64_C(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)) * UINT64_C(0x94d049bb133111eb);
    return z ^ (z >> 31);
}

// Golden-ratio increment of the SplitMix64 state walk.
inline constexpr uint64_t kGolden = UINT64_C(0x9e3779b97f4a7c15);

/*!
 * One random stream: output i is mix64(key + i * golden), i.e. SplitMix64
 * with a start state hashed from (seed, stream). The key never changes, so
 * derive() yields child streams that do not depend on how far the parent has
 * already advanced. That property makes recursive descents reproducible no
 * matter the execution order.
 */
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    RngStream(uint64_t seed, uint64_t stream)
        : key_(mix64(mix64(seed + kGolden) ^ mix64(stream) ^ stream)), ctr_(0) {}

    //! Child stream identified by (this stream, salt); position-independent.
    RngStream derive(uint64_t salt) const {
        RngStream child;
        child.key_ = mix64(key_ + mix64(salt + kGolden));
        child.ctr_ = 0;
        return child;
    }

    uint64_t next() {
        ctr_ += kGolden;
        return mix64(key_ + ctr_);
    }

    //! Uniform double in [0, 1) with 53 random bits; never returns 1.0.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    //! Uniform double in [a, b); requires a < b.
    double uniform(double a, double b) {
        return a + uniform01() * (b - a);
    }

    //! Unbiased-enough index in [0, n) via the multiply-shift reduction.
    uint64_t bounded(uint64_t n) {
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    /*!
     * Exponential key -ln(u)/w for weight w > 0. Zero draws are redrawn so
     * the key is always finite; u is never 1, so the key is never exactly 0.
     */
    double exponential_key(double w) {
        double u = uniform01();
        while (u == 0.0)
            u = uniform01();
        return -std::log(u) / w;
    }

private:
    uint64_t key_;
    uint64_t ctr_;
};

} // namespace wrs
