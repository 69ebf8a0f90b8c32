/*******************************************************************************
 * tools/wrs_cli.cpp
 *
 * Command-line front end over the shared-library API: generate weight files,
 * benchmark structure construction and sampling, and run verification suites.
 *
 * Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O or
 * internal error.
 ******************************************************************************/

#include <wrs.h>

#include <CLI11.hpp>

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

namespace {

constexpr uint64_t kDefaultSeed = 0xC0FFEE;

uint64_t env_or_default_seed() {
    if (const char* env = std::getenv("WRS_SEED")) {
        char* end = nullptr;
        const uint64_t v = std::strtoull(env, &end, 0);
        if (end && *end == '\0')
            return v;
        std::fprintf(stderr, "warning: ignoring unparsable WRS_SEED=%s\n", env);
    }
    return kDefaultSeed;
}

int exit_code_for(wrs_status st) {
    switch (st) {
    case WRS_OK: return 0;
    case WRS_EVERIFY: return 1;
    case WRS_EINVAL: return 2;
    default: return 3;
    }
}

int fail_with(wrs_status st, const char* what) {
    std::fprintf(stderr, "error: %s: %s (%s)\n", what, wrs_last_error(),
                 wrs_status_name(st));
    return exit_code_for(st);
}

struct weights_deleter {
    void operator()(wrs_weights* w) const { wrs_weights_free(w); }
};
struct sampler_deleter {
    void operator()(wrs_sampler* s) const { wrs_sampler_free(s); }
};
struct reservoir_deleter {
    void operator()(wrs_reservoir* r) const { wrs_reservoir_free(r); }
};
using weights_ptr = std::unique_ptr<wrs_weights, weights_deleter>;
using sampler_ptr = std::unique_ptr<wrs_sampler, sampler_deleter>;
using reservoir_ptr = std::unique_ptr<wrs_reservoir, reservoir_deleter>;

uint64_t now_ns() {
    return static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

// One CSV sink for every benchmark row; "-" writes to stdout.
class csv_writer {
public:
    explicit csv_writer(const std::string& path) {
        if (path.empty())
            return;
        if (path == "-") {
            out_ = stdout;
        } else {
            owned_ = std::fopen(path.c_str(), "w");
            out_ = owned_;
            if (!out_)
                throw std::runtime_error("cannot open CSV output: " + path);
        }
        std::fprintf(out_, "algo,n,k,dist,skew,threads,rep,phase,time_ns,"
                           "items_per_s,unique,verified\n");
    }
    ~csv_writer() {
        if (owned_)
            std::fclose(owned_);
    }

    void row(const std::string& algo, uint64_t n, uint64_t k,
             const std::string& dist, double skew, unsigned threads,
             unsigned rep, const std::string& phase, uint64_t time_ns,
             uint64_t items, uint64_t unique, int verified) {
        if (!out_)
            return;
        const double rate =
            time_ns ? static_cast<double>(items) * 1e9 / static_cast<double>(time_ns)
                    : 0.0;
        std::fprintf(out_, "%s,%" PRIu64 ",%" PRIu64 ",%s,%g,%u,%u,%s,%" PRIu64
                           ",%.0f,%" PRIu64 ",%d\n",
                     algo.c_str(), n, k, dist.c_str(), skew, threads, rep,
                     phase.c_str(), time_ns, rate, unique, verified);
    }

private:
    std::FILE* out_ = nullptr;
    std::FILE* owned_ = nullptr;
};

struct common_opts {
    std::string in;
    std::string dist = "powerlaw";
    double s = 1.0;
    uint64_t n = 1000000;
    uint64_t seed = env_or_default_seed();
};

// Load weights from --in, or generate them from --dist/--s/--n.
int acquire_weights(const common_opts& o, weights_ptr& out) {
    wrs_weights* raw = nullptr;
    wrs_status st;
    if (!o.in.empty())
        st = wrs_weights_read(o.in.c_str(), &raw);
    else
        st = wrs_weights_generate(o.dist.c_str(), o.s, o.n, o.seed, &raw);
    if (st != WRS_OK)
        return fail_with(st, "loading weights");
    out.reset(raw);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted random sampling toolkit"};
    app.require_subcommand(1);

    common_opts opt;
    std::string algo = "psa";
    std::string problem = "one";
    std::string csv_path;
    std::string out_path;
    std::string suite = "all";
    uint64_t k = 1000;
    uint64_t groups = 0;
    unsigned threads = 1;
    unsigned reps = 1;
    unsigned trials = 1;
    bool verbose = false;

    const auto add_weight_opts = [&](CLI::App* cmd) {
        cmd->add_option("--in", opt.in, "weight file to load (overrides --dist/--n)");
        cmd->add_option("--dist", opt.dist, "weight distribution: uniform|powerlaw")
            ->check(CLI::IsMember({"uniform", "powerlaw"}));
        cmd->add_option("--s", opt.s, "power law exponent");
        cmd->add_option("--n", opt.n, "number of items");
        cmd->add_option("--seed", opt.seed, "RNG seed (default: WRS_SEED env or 0xC0FFEE)");
    };

    CLI::App* gen = app.add_subcommand("gen", "generate a weight file");
    add_weight_opts(gen);
    gen->add_option("--out", out_path, "output weight file")->required();

    CLI::App* build = app.add_subcommand("build", "benchmark structure construction");
    add_weight_opts(build);
    build->add_option("--algo", algo, "sampler structure")
        ->check(CLI::IsMember({"vose", "sweep", "psa", "2lvl-classic", "2lvl-sweep",
                               "compressed"}));
    build->add_option("--groups", groups, "two-level group count (0 = threads)");
    build->add_option("--threads", threads, "worker threads");
    build->add_option("--reps", reps, "repetitions");
    build->add_option("--csv", csv_path, "CSV output path or - for stdout");

    CLI::App* sample = app.add_subcommand("sample", "benchmark sampling");
    add_weight_opts(sample);
    sample->add_option("--algo", algo, "structure for --problem one|with")
        ->check(CLI::IsMember({"vose", "sweep", "psa", "2lvl-classic", "2lvl-sweep",
                               "compressed", "grouped", "subset"}));
    sample->add_option("--problem", problem,
                       "one|with|without|permute|subset|reservoir")
        ->check(CLI::IsMember({"one", "with", "without", "permute", "subset",
                               "reservoir"}));
    sample->add_option("--k", k, "sample size (ignored for permute/subset)");
    sample->add_option("--groups", groups, "two-level group count (0 = threads)");
    sample->add_option("--threads", threads, "worker threads");
    sample->add_option("--reps", reps, "repetitions");
    sample->add_option("--trials", trials, "reservoir mini-batches per rep");
    sample->add_option("--csv", csv_path, "CSV output path or - for stdout");

    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", suite, "masses|chisq|oracle|bounds|all")
        ->check(CLI::IsMember({"masses", "chisq", "oracle", "bounds", "all"}));
    verify->add_option("--seed", opt.seed, "RNG seed");
    verify->add_flag("--verbose", verbose, "print per-check detail");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            weights_ptr w;
            if (int rc = acquire_weights(opt, w))
                return rc;
            if (wrs_status st = wrs_weights_write(w.get(), out_path.c_str());
                st != WRS_OK)
                return fail_with(st, "writing weight file");
            std::printf("wrote %" PRIu64 " weights to %s\n",
                        wrs_weights_count(w.get()), out_path.c_str());
            return 0;
        }

        if (verify->parsed()) {
            const wrs_status st = wrs_verify(suite.c_str(), opt.seed, verbose ? 1 : 0);
            if (st == WRS_OK) {
                std::printf("verify %s: PASS\n", suite.c_str());
                return 0;
            }
            return fail_with(st, "verification");
        }

        weights_ptr w;
        if (int rc = acquire_weights(opt, w))
            return rc;
        const uint64_t n = wrs_weights_count(w.get());
        const std::string dist_label = opt.in.empty() ? opt.dist : "file";
        csv_writer csv(csv_path);

        if (build->parsed()) {
            for (unsigned rep = 0; rep < reps; ++rep) {
                wrs_sampler* raw = nullptr;
                const uint64_t t0 = now_ns();
                const wrs_status st =
                    wrs_sampler_build(w.get(), algo.c_str(), threads, groups, &raw);
                const uint64_t dt = now_ns() - t0;
                if (st != WRS_OK)
                    return fail_with(st, "building sampler");
                sampler_ptr s(raw);
                const int ok = wrs_sampler_verify_masses(s.get(), 1e-9) == WRS_OK;
                csv.row(algo, n, 0, dist_label, opt.s, threads, rep, "build", dt, n,
                        n, ok);
                std::printf("build %s n=%" PRIu64 " threads=%u rep=%u: %.3f ms "
                            "(masses %s)\n",
                            algo.c_str(), n, threads, rep, dt / 1e6,
                            ok ? "ok" : "DEVIATE");
            }
            return 0;
        }

        // sample subcommand
        if (problem == "one") {
            wrs_sampler* raw = nullptr;
            if (wrs_status st =
                    wrs_sampler_build(w.get(), algo.c_str(), threads, groups, &raw);
                st != WRS_OK)
                return fail_with(st, "building sampler");
            sampler_ptr s(raw);
            std::vector<uint32_t> out(k);
            for (unsigned rep = 0; rep < reps; ++rep) {
                const uint64_t t0 = now_ns();
                const wrs_status st =
                    wrs_sampler_draw(s.get(), opt.seed + rep, k, threads, out.data());
                const uint64_t dt = now_ns() - t0;
                if (st != WRS_OK)
                    return fail_with(st, "sampling");
                csv.row(algo, n, k, dist_label, opt.s, threads, rep, "query", dt, k,
                        k, 1);
                std::printf("sample one %s k=%" PRIu64 " threads=%u rep=%u: %.3f ms"
                            " (%.1f M/s)\n",
                            algo.c_str(), k, threads, rep, dt / 1e6,
                            dt ? k * 1e3 / dt : 0.0);
            }
            return 0;
        }

        if (problem == "with") {
            const uint64_t cap = std::min(k, n);
            std::vector<uint32_t> items(cap);
            std::vector<uint64_t> counts(cap);
            for (unsigned rep = 0; rep < reps; ++rep) {
                uint64_t unique = 0;
                const uint64_t t0 = now_ns();
                const wrs_status st = wrs_sample_with_replacement(
                    w.get(), k, opt.seed + rep, threads, items.data(), counts.data(),
                    &unique);
                const uint64_t dt = now_ns() - t0;
                if (st != WRS_OK)
                    return fail_with(st, "sampling with replacement");
                csv.row("grouped", n, k, dist_label, opt.s, threads, rep, "query",
                        dt, k, unique, 1);
                std::printf("sample with k=%" PRIu64 " threads=%u rep=%u: %.3f ms, "
                            "%" PRIu64 " unique\n",
                            k, threads, rep, dt / 1e6, unique);
            }
            return 0;
        }

        if (problem == "without") {
            std::vector<uint32_t> out(k);
            for (unsigned rep = 0; rep < reps; ++rep) {
                const uint64_t t0 = now_ns();
                const wrs_status st = wrs_sample_without_replacement(
                    w.get(), k, opt.seed + rep, threads, out.data());
                const uint64_t dt = now_ns() - t0;
                if (st != WRS_OK)
                    return fail_with(st, "sampling without replacement");
                csv.row("without", n, k, dist_label, opt.s, threads, rep, "query",
                        dt, k, k, 1);
                std::printf("sample without k=%" PRIu64 " threads=%u rep=%u: "
                            "%.3f ms\n",
                            k, threads, rep, dt / 1e6);
            }
            return 0;
        }

        if (problem == "permute") {
            std::vector<uint32_t> out(n);
            for (unsigned rep = 0; rep < reps; ++rep) {
                const uint64_t t0 = now_ns();
                const wrs_status st =
                    wrs_permutation(w.get(), opt.seed + rep, threads, out.data());
                const uint64_t dt = now_ns() - t0;
                if (st != WRS_OK)
                    return fail_with(st, "permutation");
                csv.row("permute", n, n, dist_label, opt.s, threads, rep, "query",
                        dt, n, n, 1);
                std::printf("permute n=%" PRIu64 " threads=%u rep=%u: %.3f ms\n", n,
                            threads, rep, dt / 1e6);
            }
            return 0;
        }

        if (problem == "subset") {
            std::vector<uint32_t> out(n);
            for (unsigned rep = 0; rep < reps; ++rep) {
                uint64_t picked = 0;
                const uint64_t t0 = now_ns();
                const wrs_status st = wrs_subset_sample(w.get(), opt.seed + rep,
                                                        threads, out.data(), &picked);
                const uint64_t dt = now_ns() - t0;
                if (st != WRS_OK)
                    return fail_with(st, "subset sampling");
                csv.row("subset", n, picked, dist_label, opt.s, threads, rep,
                        "query", dt, n, picked, 1);
                std::printf("subset n=%" PRIu64 " threads=%u rep=%u: %.3f ms, "
                            "|S|=%" PRIu64 "\n",
                            n, threads, rep, dt / 1e6, picked);
            }
            return 0;
        }

        // problem == "reservoir": stream the weight vector in --trials batches.
        for (unsigned rep = 0; rep < reps; ++rep) {
            wrs_reservoir* raw = nullptr;
            if (wrs_status st =
                    wrs_reservoir_create(k, threads, opt.seed + rep, &raw);
                st != WRS_OK)
                return fail_with(st, "creating reservoir");
            reservoir_ptr r(raw);
            const double* values = wrs_weights_values(w.get());
            std::vector<uint32_t> ids(n);
            for (uint64_t i = 0; i < n; ++i)
                ids[i] = static_cast<uint32_t>(i);
            const uint64_t batches = std::max<uint64_t>(1, trials);
            const uint64_t t0 = now_ns();
            for (uint64_t b = 0; b < batches; ++b) {
                const uint64_t lo = n * b / batches, hi = n * (b + 1) / batches;
                if (wrs_status st = wrs_reservoir_push(r.get(), ids.data() + lo,
                                                       values + lo, hi - lo);
                    st != WRS_OK)
                    return fail_with(st, "feeding reservoir");
            }
            const uint64_t dt = now_ns() - t0;
            uint64_t filled = 0;
            std::vector<uint32_t> items(k);
            std::vector<double> keys(k);
            if (wrs_status st =
                    wrs_reservoir_items(r.get(), items.data(), keys.data(), &filled);
                st != WRS_OK)
                return fail_with(st, "reading reservoir");
            csv.row("reservoir", n, k, dist_label, opt.s, threads, rep, "query", dt,
                    n, filled, 1);
            std::printf("reservoir n=%" PRIu64 " k=%" PRIu64 " threads=%u rep=%u: "
                        "%.3f ms, threshold=%g\n",
                        n, k, threads, rep, dt / 1e6,
                        wrs_reservoir_threshold(r.get()));
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
