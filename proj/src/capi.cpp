/*******************************************************************************
 * src/capi.cpp
 *
 * The shared-library face of the sampler core.  Handles own their data, all
 * exceptions are converted to status codes, and the failure message is kept
 * per thread for wrs_last_error().
 ******************************************************************************/

#include <wrs.h>

#include <wrs/alias.hpp>
#include <wrs/compressed.hpp>
#include <wrs/grouped.hpp>
#include <wrs/no_replace.hpp>
#include <wrs/permute.hpp>
#include <wrs/reservoir.hpp>
#include <wrs/selfcheck.hpp>
#include <wrs/subset.hpp>
#include <wrs/two_level.hpp>
#include <wrs/verify.hpp>
#include <wrs/weight_file.hpp>
#include <wrs/weights.hpp>

#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <variant>
#include <vector>

struct wrs_weights {
    wrs::WeightTable table;
};

struct wrs_reservoir {
    wrs::Reservoir impl;
};

struct wrs_sampler {
    wrs::WeightTable weights; // retained for mass verification
    std::variant<wrs::AliasTable, wrs::TwoLevelTable, wrs::CompressedTable> impl;
    std::string algo;

    template <typename F> auto visit(F&& f) const {
        return std::visit(std::forward<F>(f), impl);
    }
};

namespace {

thread_local std::string t_last_error = "no error";

wrs_status fail(wrs_status code, std::string msg) {
    t_last_error = std::move(msg);
    return code;
}

// Run `f`, translating exceptions into status codes.
template <typename F> wrs_status guarded(F&& f) {
    try {
        return f();
    } catch (const std::bad_alloc&) {
        return fail(WRS_ENOMEM, "out of memory");
    } catch (const wrs::format_error& e) {
        return fail(WRS_EFORMAT, e.what());
    } catch (const wrs::io_error& e) {
        return fail(WRS_EIO, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(WRS_EINVAL, e.what());
    } catch (const std::exception& e) {
        return fail(WRS_EINTERNAL, e.what());
    }
}

wrs_status make_weights(std::vector<double> values, wrs_weights** out) {
    auto handle = std::make_unique<wrs_weights>(
        wrs_weights{wrs::WeightTable(std::move(values))});
    *out = handle.release();
    return WRS_OK;
}

} // namespace

extern "C" {

const char* wrs_last_error(void) { return t_last_error.c_str(); }

const char* wrs_status_name(wrs_status status) {
    switch (status) {
    case WRS_OK: return "WRS_OK";
    case WRS_EINVAL: return "WRS_EINVAL";
    case WRS_EIO: return "WRS_EIO";
    case WRS_EFORMAT: return "WRS_EFORMAT";
    case WRS_EVERIFY: return "WRS_EVERIFY";
    case WRS_ENOMEM: return "WRS_ENOMEM";
    case WRS_EINTERNAL: return "WRS_EINTERNAL";
    }
    return "WRS_UNKNOWN";
}

wrs_status wrs_weights_from_array(const double* w, uint64_t n, wrs_weights** out) {
    if (!w || !out)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&] { return make_weights(std::vector<double>(w, w + n), out); });
}

wrs_status wrs_weights_generate(const char* dist, double param, uint64_t n,
                                uint64_t seed, wrs_weights** out) {
    if (!dist || !out)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&]() -> wrs_status {
        std::vector<double> w;
        if (std::strcmp(dist, "uniform") == 0)
            w = wrs::generate_uniform(n, seed);
        else if (std::strcmp(dist, "powerlaw") == 0)
            w = wrs::generate_powerlaw(n, param, seed);
        else
            return fail(WRS_EINVAL, std::string("unknown distribution: ") + dist);
        return make_weights(std::move(w), out);
    });
}

wrs_status wrs_weights_read(const char* path, wrs_weights** out) {
    if (!path || !out)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&] { return make_weights(wrs::read_weights(path), out); });
}

wrs_status wrs_weights_write(const wrs_weights* w, const char* path) {
    if (!w || !path)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&] {
        wrs::write_weights(path, std::vector<double>(w->table.values().begin(),
                                                     w->table.values().end()));
        return WRS_OK;
    });
}

uint64_t wrs_weights_count(const wrs_weights* w) { return w ? w->table.size() : 0; }

const double* wrs_weights_values(const wrs_weights* w) {
    return w ? w->table.data() : nullptr;
}

void wrs_weights_free(wrs_weights* w) { delete w; }

wrs_status wrs_sampler_build(const wrs_weights* w, const char* algo,
                             unsigned workers, uint64_t groups, wrs_sampler** out) {
    if (!w || !algo || !out)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&]() -> wrs_status {
        std::unique_ptr<wrs_sampler> s;
        const std::string name = algo;
        if (name == "vose")
            s.reset(new wrs_sampler{
                w->table, wrs::AliasTable(w->table, wrs::AliasTable::Build::vose),
                name});
        else if (name == "sweep")
            s.reset(new wrs_sampler{
                w->table, wrs::AliasTable(w->table, wrs::AliasTable::Build::sweep),
                name});
        else if (name == "psa")
            s.reset(new wrs_sampler{
                w->table,
                wrs::AliasTable(w->table, wrs::AliasTable::Build::psa, workers),
                name});
        else if (name == "2lvl-classic")
            s.reset(new wrs_sampler{
                w->table,
                wrs::TwoLevelTable(w->table, wrs::AliasTable::Build::vose, workers,
                                   groups),
                name});
        else if (name == "2lvl-sweep")
            s.reset(new wrs_sampler{
                w->table,
                wrs::TwoLevelTable(w->table, wrs::AliasTable::Build::sweep, workers,
                                   groups),
                name});
        else if (name == "compressed")
            s.reset(new wrs_sampler{
                w->table, wrs::CompressedTable(w->table, workers), name});
        else
            return fail(WRS_EINVAL, "unknown sampler algorithm: " + name);
        *out = s.release();
        return WRS_OK;
    });
}

wrs_status wrs_sampler_verify_masses(const wrs_sampler* s, double rel_tol) {
    if (!s)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&]() -> wrs_status {
        return s->visit([&](const auto& table) -> wrs_status {
            const auto masses = wrs::implied_masses(table);
            const double worst = wrs::max_relative_mass_error(masses, s->weights);
            if (worst > rel_tol)
                return fail(WRS_EVERIFY, "mass deviation " + std::to_string(worst) +
                                             " exceeds tolerance in " + s->algo);
            return WRS_OK;
        });
    });
}

wrs_status wrs_sampler_draw(const wrs_sampler* s, uint64_t seed, uint64_t count,
                            unsigned workers, uint32_t* out) {
    if (!s || !out)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&]() -> wrs_status {
        s->visit([&](const auto& table) {
            std::vector<uint32_t> buf;
            table.sample_many(seed, count, workers ? workers : 1, buf);
            std::memcpy(out, buf.data(), count * sizeof(uint32_t));
        });
        return WRS_OK;
    });
}

void wrs_sampler_free(wrs_sampler* s) { delete s; }

wrs_status wrs_sample_with_replacement(const wrs_weights* w, uint64_t k,
                                       uint64_t seed, unsigned workers,
                                       uint32_t* items, uint64_t* counts,
                                       uint64_t* n_unique) {
    if (!w || !items || !counts || !n_unique)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&]() -> wrs_status {
        workers = workers ? workers : 1;
        wrs::GroupedSampler sampler(w->table, workers);
        const auto result = sampler.sample(seed, k, /* dedup */ true, workers);
        for (size_t i = 0; i < result.entries.size(); ++i) {
            items[i] = result.entries[i].item;
            counts[i] = result.entries[i].count;
        }
        *n_unique = result.entries.size();
        return WRS_OK;
    });
}

wrs_status wrs_sample_without_replacement(const wrs_weights* w, uint64_t k,
                                          uint64_t seed, unsigned workers,
                                          uint32_t* out) {
    if (!w || !out)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&]() -> wrs_status {
        workers = workers ? workers : 1;
        wrs::WithoutReplacementSampler sampler(w->table, workers);
        const auto sample = sampler.sample(seed, k, workers);
        std::memcpy(out, sample.data(), sample.size() * sizeof(uint32_t));
        return WRS_OK;
    });
}

wrs_status wrs_permutation(const wrs_weights* w, uint64_t seed,
                           unsigned workers, uint32_t* out) {
    if (!w || !out)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&]() -> wrs_status {
        const auto perm = wrs::Permuter(w->table).permute(
            seed, workers ? workers : 1);
        std::memcpy(out, perm.data(), perm.size() * sizeof(uint32_t));
        return WRS_OK;
    });
}

wrs_status wrs_subset_sample(const wrs_weights* w, uint64_t seed,
                             unsigned workers, uint32_t* out,
                             uint64_t* n_out) {
    if (!w || !out || !n_out)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&]() -> wrs_status {
        const auto subset =
            wrs::SubsetSampler(w->table).sample(seed, workers ? workers : 1);
        std::memcpy(out, subset.data(), subset.size() * sizeof(uint32_t));
        *n_out = subset.size();
        return WRS_OK;
    });
}

wrs_status wrs_reservoir_create(uint64_t k, unsigned pes, uint64_t seed,
                                wrs_reservoir** out) {
    if (!out)
        return fail(WRS_EINVAL, "null argument");
    *out = nullptr;
    return guarded([&]() -> wrs_status {
        *out = new wrs_reservoir{
            wrs::Reservoir(k, pes ? pes : 1, seed)};
        return WRS_OK;
    });
}

wrs_status wrs_reservoir_push(wrs_reservoir* r, const uint32_t* items,
                              const double* weights, uint64_t count) {
    if (!r)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&]() -> wrs_status {
        r->impl.push(items, weights, count);
        return WRS_OK;
    });
}

wrs_status wrs_reservoir_items(const wrs_reservoir* r, uint32_t* items,
                               double* keys, uint64_t* n_out) {
    if (!r || !items || !keys || !n_out)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&]() -> wrs_status {
        const auto& sample = r->impl.sample();
        for (size_t i = 0; i < sample.size(); ++i) {
            items[i] = sample[i].item;
            keys[i] = sample[i].key;
        }
        *n_out = sample.size();
        return WRS_OK;
    });
}

double wrs_reservoir_threshold(const wrs_reservoir* r) {
    return r ? r->impl.threshold()
             : std::numeric_limits<double>::quiet_NaN();
}

void wrs_reservoir_free(wrs_reservoir* r) { delete r; }

wrs_status wrs_verify(const char* suite, uint64_t seed, int verbose) {
    if (!suite)
        return fail(WRS_EINVAL, "null argument");
    return guarded([&]() -> wrs_status {
        const auto results = wrs::run_selfcheck(suite, seed);
        std::string failed;
        for (const wrs::check_result& r : results) {
            if (verbose || !r.pass)
                std::fprintf(stderr, "[%s] %-28s %s\n",
                             r.pass ? " ok " : "FAIL", r.name.c_str(),
                             r.detail.c_str());
            if (!r.pass) {
                if (!failed.empty())
                    failed += ", ";
                failed += r.name;
            }
        }
        if (!failed.empty())
            return fail(WRS_EVERIFY, "verification failed: " + failed);
        return WRS_OK;
    });
}

} // extern "C"
