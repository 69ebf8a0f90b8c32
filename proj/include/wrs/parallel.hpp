/*******************************************************************************
 * wrs/parallel.hpp
 *
 * Fork-join helpers. All partitioning here is a function of the data size
 * only, never of the worker count, so floating-point groupings (and hence
 * results) do not change when the same job runs on a different machine.
 ******************************************************************************/
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

namespace wrs {

//! Run f(0), ..., f(workers-1) concurrently; f(0) runs on the caller.
template <typename F>
void run_workers(unsigned workers, F&& f) {
    if (workers <= 1) {
        f(0u);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w)
        pool.emplace_back([&f, w] { f(w); });
    f(0u);
    for (auto& t : pool)
        t.join();
}

//! Contiguous slice of [0, n) owned by worker w out of `workers`.
inline std::pair<size_t, size_t> worker_slice(size_t n, unsigned workers,
                                              unsigned w) {
    size_t per = n / workers, rem = n % workers;
    size_t lo = per * w + (w < rem ? w : rem);
    size_t hi = lo + per + (w < rem ? 1 : 0);
    return {lo, hi};
}

//! Process blocks [b*block, min(n,(b+1)*block)) across workers.
template <typename F>
void for_blocks(size_t n, size_t block, unsigned workers, F&& f) {
    size_t nblocks = (n + block - 1) / block;
    run_workers(workers, [&](unsigned w) {
        for (size_t b = w; b < nblocks; b += workers) {
            size_t lo = b * block;
            size_t hi = lo + block < n ? lo + block : n;
            f(b, lo, hi);
        }
    });
}

// Fixed block length for the scan below. Tied to the data layout, not to the
// worker count: the grouping of additions is always the same.
inline constexpr size_t kScanBlock = 2048;

namespace detail {

// Neumaier summation: the rounding error of every add is folded into a
// separate low word, so a running value stays within a few ulp of the true
// sum no matter how long the chain is.  A plain running sum drifts by about
// n*eps*max|term|, which downstream packing code can see against per-item
// tolerances.  Adding to an infinite sum would poison the low word with NaN,
// hence the finite check.
template <typename T>
struct comp_sum {
    T hi = T(0), lo = T(0);

    void add(T x) {
        const T t = hi + x;
        if (std::isfinite(t))
            lo += std::abs(hi) >= std::abs(x) ? (hi - t) + x : (x - t) + hi;
        hi = t;
    }
    T value() const { return hi + lo; }
};

// Integer sums are exact already; same interface, no extra word.
template <typename T>
struct plain_sum {
    T hi = T(0);

    void add(T x) { hi += x; }
    T value() const { return hi; }
};

template <typename T>
using scan_sum = std::conditional_t<std::is_floating_point_v<T>, comp_sum<T>, plain_sum<T>>;

} // namespace detail

/*!
 * Inclusive prefix sums of in[0..n) into out[0..n). Three passes: per-block
 * totals, a serial scan of the totals, then per-block local scans seeded with
 * the carry. Bit-identical output for every worker count; floating-point
 * accumulation is compensated in every pass, so each output is a few ulp from
 * the true prefix regardless of n.
 */
template <typename T>
void prefix_sums(const T* in, T* out, size_t n, unsigned workers = 1) {
    if (n == 0)
        return;
    const size_t nblocks = (n + kScanBlock - 1) / kScanBlock;
    std::vector<T> carry(nblocks);
    for_blocks(n, kScanBlock, workers, [&](size_t b, size_t lo, size_t hi) {
        detail::scan_sum<T> local;
        for (size_t i = lo; i < hi; ++i)
            local.add(in[i]);
        carry[b] = local.value();
    });
    detail::scan_sum<T> acc;
    for (size_t b = 0; b < nblocks; ++b) {
        const T total = carry[b];
        carry[b] = acc.value();
        acc.add(total);
    }
    for_blocks(n, kScanBlock, workers, [&](size_t b, size_t lo, size_t hi) {
        detail::scan_sum<T> run;
        run.add(carry[b]);
        for (size_t i = lo; i < hi; ++i) {
            run.add(in[i]);
            out[i] = run.value();
        }
    });
}

} // namespace wrs
