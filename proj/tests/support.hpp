#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "fwave/error.hpp"

namespace testing {

inline std::vector<double> tone(double hz, double amp, std::size_t n, double fs, double phase = 0.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs + phase);
    }
    return x;
}

inline std::vector<double> gaussian_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sd);
    std::vector<double> x(n);
    for (double& v : x) v = dist(rng);
    return x;
}

inline std::vector<double> add(std::vector<double> a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline std::vector<double> scale(std::vector<double> a, double k) {
    for (double& v : a) v *= k;
    return a;
}

inline double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double rms(const std::vector<double>& a, std::size_t from = 0, std::size_t to = 0) {
    if (to == 0) to = a.size();
    double s = 0.0;
    for (std::size_t i = from; i < to; ++i) s += a[i] * a[i];
    return std::sqrt(s / static_cast<double>(to - from));
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b, std::size_t from = 0,
                          std::size_t to = 0) {
    if (to == 0) to = a.size();
    const double n = static_cast<double>(to - from);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = from; i < to; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = from; i < to; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

/// Amplitude of the `hz` component over [from, to), by projection.
inline double tone_amplitude(const std::vector<double>& x, double hz, double fs, std::size_t from = 0,
                             std::size_t to = 0) {
    if (to == 0) to = x.size();
    double c = 0.0, s = 0.0;
    for (std::size_t i = from; i < to; ++i) {
        const double w = 2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs;
        c += x[i] * std::cos(w);
        s += x[i] * std::sin(w);
    }
    return 2.0 * std::hypot(c, s) / static_cast<double>(to - from);
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& name) {
        path_ = std::filesystem::temp_directory_path() /
                ("fwave_test_" + name + "_" + std::to_string(std::random_device{}()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    std::filesystem::path path_;
};

}  // namespace testing

#define CHECK_ERROR_CODE(expr, expected)                                  \
    do {                                                                  \
        bool thrown_ = false;                                             \
        try {                                                             \
            (void)(expr);                                                 \
        } catch (const fwave::Error& e_) {                                \
            thrown_ = true;                                               \
            CHECK_MESSAGE(e_.code() == (expected), e_.what());            \
        }                                                                 \
        CHECK_MESSAGE(thrown_, "expected " << fwave::error_name(expected)); \
    } while (0)
