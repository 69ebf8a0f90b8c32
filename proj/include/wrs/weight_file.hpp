/*******************************************************************************
 * wrs/weight_file.hpp
 *
 * Weight vector generation and the on-disk weight format:
 * magic "WRS1", little-endian u64 count, then count little-endian doubles.
 ******************************************************************************/

#pragma once

#include <wrs/rng.hpp>
#include <wrs/weights.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wrs {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Independent draws from (0, 1]; zero weights are not representable.
inline std::vector<double> generate_uniform(size_t n, uint64_t seed) {
    RngStream rng(seed, 0x67656e75u);
    std::vector<double> w(n);
    for (size_t i = 0; i < n; ++i)
        w[i] = 1.0 - rng.uniform01();
    return w;
}

// Weights i^-s for i = 1..n, dealt to random positions so heavy items are
// spread over the index range.
inline std::vector<double> generate_powerlaw(size_t n, double s, uint64_t seed) {
    if (!(s >= 0.0) || !std::isfinite(s))
        throw std::invalid_argument("power law exponent must be finite and >= 0");
    RngStream rng(seed, 0x67656e70u);
    std::vector<double> w(n);
    for (size_t i = 0; i < n; ++i)
        w[i] = std::pow(static_cast<double>(i + 1), -s);
    for (size_t i = n; i > 1; --i) {
        const size_t j = static_cast<size_t>(rng.bounded(i));
        std::swap(w[i - 1], w[j]);
    }
    return w;
}

namespace detail {
constexpr char kWeightMagic[4] = {'W', 'R', 'S', '1'};

struct file_closer {
    void operator()(std::FILE* f) const {
        if (f)
            std::fclose(f);
    }
};
} // namespace detail

inline void write_weights(const std::string& path, const std::vector<double>& w) {
    std::unique_ptr<std::FILE, detail::file_closer> f(std::fopen(path.c_str(), "wb"));
    if (!f)
        throw io_error("cannot open for writing: " + path);
    const uint64_t count = w.size();
    if (std::fwrite(detail::kWeightMagic, 1, 4, f.get()) != 4 ||
        std::fwrite(&count, sizeof count, 1, f.get()) != 1 ||
        (count > 0 && std::fwrite(w.data(), sizeof(double), w.size(), f.get()) != w.size()))
        throw io_error("short write: " + path);
    if (std::fflush(f.get()) != 0)
        throw io_error("flush failed: " + path);
}

inline std::vector<double> read_weights(const std::string& path) {
    std::unique_ptr<std::FILE, detail::file_closer> f(std::fopen(path.c_str(), "rb"));
    if (!f)
        throw io_error("cannot open for reading: " + path);
    char magic[4];
    uint64_t count = 0;
    if (std::fread(magic, 1, 4, f.get()) != 4)
        throw format_error("truncated header: " + path);
    if (std::memcmp(magic, detail::kWeightMagic, 4) != 0)
        throw format_error("bad magic, not a weight file: " + path);
    if (std::fread(&count, sizeof count, 1, f.get()) != 1)
        throw format_error("truncated count: " + path);
    if (count > (uint64_t{1} << 40))
        throw format_error("implausible item count: " + path);
    std::vector<double> w(count);
    if (count > 0 && std::fread(w.data(), sizeof(double), count, f.get()) != count)
        throw format_error("truncated payload: " + path);
    for (size_t i = 0; i < w.size(); ++i)
        if (!std::isfinite(w[i]) || w[i] <= 0.0)
            throw format_error("weight " + std::to_string(i) + " not finite/positive: " + path);
    return w;
}

} // namespace wrs
