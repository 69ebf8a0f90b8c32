/*******************************************************************************
 * wrs.h
 *
 * C interface to the weighted random sampling library.  All functions return
 * a wrs_status; every handle is opaque and freed with its matching *_free.
 * Error details for the calling thread are available via wrs_last_error().
 ******************************************************************************/

#ifndef WRS_H
#define WRS_H

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__) || defined(__clang__)
#define WRS_API __attribute__((visibility("default")))
#else
#define WRS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wrs_status {
    WRS_OK = 0,
    WRS_EINVAL = 1,   /* bad argument (null pointer, bad name, bad weight) */
    WRS_EIO = 2,      /* file could not be read or written */
    WRS_EFORMAT = 3,  /* file exists but is not a valid weight file */
    WRS_EVERIFY = 4,  /* a verification suite found a violation */
    WRS_ENOMEM = 5,   /* allocation failure */
    WRS_EINTERNAL = 6 /* invariant violation inside the library */
} wrs_status;

/* Message for the most recent failure on this thread; never NULL. */
WRS_API const char* wrs_last_error(void);
WRS_API const char* wrs_status_name(wrs_status status);

/* ---------------------------------------------------------------- weights */

typedef struct wrs_weights wrs_weights;

/* Copy n finite positive weights. */
WRS_API wrs_status wrs_weights_from_array(const double* w, uint64_t n,
                                          wrs_weights** out);

/* dist: "uniform" (param ignored) draws from (0,1]; "powerlaw" uses item
 * weights i^-param in shuffled order. */
WRS_API wrs_status wrs_weights_generate(const char* dist, double param,
                                        uint64_t n, uint64_t seed,
                                        wrs_weights** out);

WRS_API wrs_status wrs_weights_read(const char* path, wrs_weights** out);
WRS_API wrs_status wrs_weights_write(const wrs_weights* w, const char* path);
WRS_API uint64_t wrs_weights_count(const wrs_weights* w);
WRS_API const double* wrs_weights_values(const wrs_weights* w);
WRS_API void wrs_weights_free(wrs_weights* w);

/* ------------------------------------------- single-draw sampler (WRS-1) */

typedef struct wrs_sampler wrs_sampler;

/* algo: "vose", "sweep", "psa", "2lvl-classic", "2lvl-sweep", "compressed".
 * workers parallelizes construction where the algorithm supports it.
 * groups configures the two-level structures (0 = one group per worker). */
WRS_API wrs_status wrs_sampler_build(const wrs_weights* w, const char* algo,
                                     unsigned workers, uint64_t groups,
                                     wrs_sampler** out);

/* Recompute the masses the structure assigns to every item and compare with
 * the input weights; fails with WRS_EVERIFY beyond rel_tol. */
WRS_API wrs_status wrs_sampler_verify_masses(const wrs_sampler* s,
                                             double rel_tol);

/* count independent draws into out[0..count). */
WRS_API wrs_status wrs_sampler_draw(const wrs_sampler* s, uint64_t seed,
                                    uint64_t count, unsigned workers,
                                    uint32_t* out);
WRS_API void wrs_sampler_free(wrs_sampler* s);

/* -------------------------------------------------------- bulk problems */

/* Sample k with replacement, output-sensitive: distinct items and their
 * multiplicities.  items/counts must hold min(k, n) entries; *n_unique
 * receives the number written.  Multiplicities sum to k. */
WRS_API wrs_status wrs_sample_with_replacement(const wrs_weights* w, uint64_t k,
                                               uint64_t seed, unsigned workers,
                                               uint32_t* items, uint64_t* counts,
                                               uint64_t* n_unique);

/* Sample k distinct items without replacement into out[0..k). */
WRS_API wrs_status wrs_sample_without_replacement(const wrs_weights* w,
                                                  uint64_t k, uint64_t seed,
                                                  unsigned workers,
                                                  uint32_t* out);

/* Weighted random permutation of all n items into out[0..n). */
WRS_API wrs_status wrs_permutation(const wrs_weights* w, uint64_t seed,
                                   unsigned workers, uint32_t* out);

/* Independent Bernoulli subset: weights are inclusion probabilities in
 * (0, 1].  out must hold n entries; *n_out receives the subset size. */
WRS_API wrs_status wrs_subset_sample(const wrs_weights* w, uint64_t seed,
                                     unsigned workers, uint32_t* out,
                                     uint64_t* n_out);

/* -------------------------------------------- mini-batch reservoir (WRS-B) */

typedef struct wrs_reservoir wrs_reservoir;

/* Maintains a weighted reservoir of k items over a stream of mini-batches
 * distributed round-robin across `pes` local processors. */
WRS_API wrs_status wrs_reservoir_create(uint64_t k, unsigned pes, uint64_t seed,
                                        wrs_reservoir** out);

/* Feed one mini-batch of count (item, weight) pairs. */
WRS_API wrs_status wrs_reservoir_push(wrs_reservoir* r, const uint32_t* items,
                                      const double* weights, uint64_t count);

/* Current reservoir contents; items/keys must hold k entries, *n_out
 * receives the number filled (= min(k, items seen)). */
WRS_API wrs_status wrs_reservoir_items(const wrs_reservoir* r, uint32_t* items,
                                       double* keys, uint64_t* n_out);

/* Current threshold; +inf until the reservoir has overflowed k items. */
WRS_API double wrs_reservoir_threshold(const wrs_reservoir* r);
WRS_API void wrs_reservoir_free(wrs_reservoir* r);

/* ---------------------------------------------------------- verification */

/* Run a named verification suite: "masses", "chisq", "oracle", "bounds",
 * or "all".  Returns WRS_OK, or WRS_EVERIFY with details on stderr when
 * verbose is nonzero. */
WRS_API wrs_status wrs_verify(const char* suite, uint64_t seed, int verbose);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* WRS_H */
