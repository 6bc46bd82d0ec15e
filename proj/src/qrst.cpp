#include "fwave/qrst.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "fwave/error.hpp"

namespace fwave {

namespace {

constexpr double kMedianWindowSeconds = 0.2;
constexpr double kSlopeHalfSpanSeconds = 0.01;
constexpr double kSmoothSeconds = 0.04;
constexpr double kRollingMaxSeconds = 2.0;
constexpr double kRelativeThreshold = 0.4;
constexpr double kBackgroundFactor = 5.0;
constexpr double kRefineSeconds = 0.06;
constexpr std::size_t kMinBeats = 5;
constexpr double kMinDetectSeconds = 5.0;
constexpr double kWindowBefore = 0.30;
constexpr double kWindowAfter = 0.45;

std::size_t samples_for(double seconds, double fs) {
    return static_cast<std::size_t>(std::lround(seconds * fs));
}

std::vector<double> running_median(std::span<const double> x, std::size_t half) {
    const std::size_t n = x.size();
    std::vector<double> out(n);
    std::vector<double> buf;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n, i + half + 1);
        buf.assign(x.begin() + static_cast<std::ptrdiff_t>(lo), x.begin() + static_cast<std::ptrdiff_t>(hi));
        const auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
        std::nth_element(buf.begin(), mid, buf.end());
        out[i] = *mid;
    }
    return out;
}

// Centred sliding maximum over [i - half, i + half].
std::vector<double> rolling_max(const std::vector<double>& x, std::size_t half) {
    const std::size_t n = x.size();
    std::vector<double> out(n);
    std::deque<std::size_t> dq;
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t hi = std::min(n - 1, i + half);
        while (next <= hi) {
            while (!dq.empty() && x[dq.back()] <= x[next]) dq.pop_back();
            dq.push_back(next++);
        }
        const std::size_t lo = i >= half ? i - half : 0;
        while (dq.front() < lo) dq.pop_front();
        out[i] = x[dq.front()];
    }
    return out;
}

double quantile(std::vector<double> v, double q) {
    const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1)));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

// Greedy refractory enforcement: strongest candidates claim their
// neighbourhood first.
std::vector<std::size_t> enforce_refractory(std::vector<std::size_t> candidates,
                                            const std::vector<double>& strength, std::size_t gap) {
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        return strength[a] > strength[b];
    });
    std::vector<std::size_t> kept;
    for (std::size_t c : candidates) {
        const bool clash = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
            return (c > k ? c - k : k - c) < gap;
        });
        if (!clash) kept.push_back(c);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

PhasorDetector::PhasorDetector(double rv) : rv_(rv) {
    if (!(rv > 0.0) || !std::isfinite(rv)) throw Error(ErrorCode::InvalidConfig, "phasor rv must be positive");
}

RPeakList PhasorDetector::detect(std::span<const double> signal, double fs) const {
    if (!(fs > 0.0)) throw Error(ErrorCode::InvalidConfig, "fs must be positive");
    if (static_cast<double>(signal.size()) < kMinDetectSeconds * fs) {
        throw Error(ErrorCode::SignalTooShort, "R-peak detection needs at least 5 s");
    }
    const std::size_t n = signal.size();

    const std::vector<double> baseline = running_median(signal, samples_for(kMedianWindowSeconds / 2, fs));
    std::vector<double> centred(n);
    std::vector<double> magnitude(n);
    for (std::size_t i = 0; i < n; ++i) {
        centred[i] = signal[i] - baseline[i];
        magnitude[i] = std::abs(centred[i]);
    }
    const double scale = quantile(magnitude, 0.99);
    if (!(scale > 0.0)) throw Error(ErrorCode::NoBeatsDetected, "signal is flat");

    std::vector<double> phase(n);
    for (std::size_t i = 0; i < n; ++i) phase[i] = std::atan(centred[i] / (scale * rv_));

    // phase variation over +-10 ms, smoothed over 40 ms
    const std::size_t span = std::max<std::size_t>(1, samples_for(kSlopeHalfSpanSeconds, fs));
    std::vector<double> variation(n, 0.0);
    for (std::size_t i = span; i + span < n; ++i) variation[i] = std::abs(phase[i + span] - phase[i - span]);
    const std::size_t smooth_half = std::max<std::size_t>(1, samples_for(kSmoothSeconds / 2, fs));
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + variation[i];
    std::vector<double> envelope(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= smooth_half ? i - smooth_half : 0;
        const std::size_t hi = std::min(n, i + smooth_half + 1);
        envelope[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }

    const double background = quantile(envelope, 0.5);
    const std::vector<double> local_max = rolling_max(envelope, samples_for(kRollingMaxSeconds / 2, fs));
    std::vector<std::size_t> candidates;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double e = envelope[i];
        if (e < envelope[i - 1] || e <= envelope[i + 1]) continue;
        if (e < kRelativeThreshold * local_max[i] || e <= kBackgroundFactor * background) continue;
        candidates.push_back(i);
    }

    const std::size_t refractory = samples_for(kRefractorySeconds, fs);
    const std::vector<std::size_t> coarse = enforce_refractory(candidates, envelope, refractory);

    const std::size_t reach = samples_for(kRefineSeconds, fs);
    std::vector<std::size_t> refined;
    for (std::size_t c : coarse) {
        const std::size_t lo = c >= reach ? c - reach : 0;
        const std::size_t hi = std::min(n, c + reach + 1);
        std::size_t best = lo;
        for (std::size_t i = lo; i < hi; ++i) {
            if (magnitude[i] > magnitude[best]) best = i;
        }
        refined.push_back(best);
    }
    std::vector<std::size_t> peaks = enforce_refractory(refined, magnitude, refractory);
    peaks.erase(std::unique(peaks.begin(), peaks.end()), peaks.end());
    return RPeakList{std::move(peaks), fs};
}

RPeakList detect_r_peaks(std::span<const double> signal, double fs, double rv) {
    RPeakList peaks = PhasorDetector(rv).detect(signal, fs);
    if (peaks.indices.size() < kMinBeats) {
        throw Error(ErrorCode::NoBeatsDetected,
                    "found " + std::to_string(peaks.indices.size()) + " beats, need " + std::to_string(kMinBeats));
    }
    return peaks;
}

std::vector<BeatWindow> make_beat_windows(const RPeakList& peaks, std::size_t signal_len, double fs) {
    const auto& r = peaks.indices;
    const std::size_t before = samples_for(kWindowBefore, fs);
    const std::size_t after = samples_for(kWindowAfter, fs);
    std::vector<BeatWindow> windows;
    windows.reserve(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        BeatWindow w;
        w.r_index = r[i];
        w.start = r[i] >= before ? r[i] - before : 0;
        w.end = std::min(signal_len, r[i] + after);
        if (i > 0) w.start = std::max(w.start, (r[i - 1] + r[i]) / 2);
        if (i + 1 < r.size()) w.end = std::min(w.end, (r[i] + r[i + 1]) / 2);
        windows.push_back(w);
    }
    return windows;
}

FWaveSignal cancel_qrst(std::span<const double> signal, double fs, const RPeakList& peaks,
                        std::size_t m_similar) {
    const std::size_t n_beats = peaks.indices.size();
    if (n_beats < 2) {
        throw Error(ErrorCode::TooFewBeats, "need at least 2 beats, got " + std::to_string(n_beats));
    }
    const std::size_t n = signal.size();
    for (std::size_t i = 0; i < n_beats; ++i) {
        if (peaks.indices[i] >= n || (i > 0 && peaks.indices[i] <= peaks.indices[i - 1])) {
            throw Error(ErrorCode::InvalidConfig, "R-peak indices must be increasing and in range");
        }
    }

    FWaveSignal out;
    out.samples.assign(signal.begin(), signal.end());
    out.fs = fs;
    out.beat_windows = make_beat_windows(peaks, n, fs);

    const auto segment = [&](std::size_t r, std::ptrdiff_t first, std::size_t len) {
        const auto begin = signal.begin() + static_cast<std::ptrdiff_t>(r) + first;
        return std::span<const double>(&*begin, len);
    };

    for (std::size_t b = 0; b < n_beats; ++b) {
        const BeatWindow& w = out.beat_windows[b];
        const std::size_t len = w.end - w.start;
        if (len < 2) continue;
        const std::ptrdiff_t first = static_cast<std::ptrdiff_t>(w.start) - static_cast<std::ptrdiff_t>(w.r_index);
        const auto own = segment(w.r_index, first, len);

        struct Match {
            std::size_t beat;
            double ncc;
        };
        std::vector<Match> matches;
        for (std::size_t k = 0; k < n_beats; ++k) {
            if (k == b) continue;
            const auto rk = static_cast<std::ptrdiff_t>(peaks.indices[k]);
            if (rk + first < 0 || static_cast<std::size_t>(rk + first) + len > n) continue;
            matches.push_back({k, pearson(own, segment(peaks.indices[k], first, len))});
        }
        // stable sort keeps the earlier beat first on equal correlation
        std::stable_sort(matches.begin(), matches.end(),
                         [](const Match& a, const Match& c) { return a.ncc > c.ncc; });
        const std::size_t take = std::min(m_similar, matches.size());

        Eigen::MatrixXd group(static_cast<Eigen::Index>(take + 1), static_cast<Eigen::Index>(len));
        const auto load_row = [&](Eigen::Index row, std::span<const double> seg) {
            const double mean = std::accumulate(seg.begin(), seg.end(), 0.0) / static_cast<double>(len);
            for (std::size_t i = 0; i < len; ++i) group(row, static_cast<Eigen::Index>(i)) = seg[i] - mean;
        };
        load_row(0, own);
        for (std::size_t t = 0; t < take; ++t) {
            load_row(static_cast<Eigen::Index>(t + 1), segment(peaks.indices[matches[t].beat], first, len));
        }

        const Eigen::VectorXd centred = group.row(0).transpose();
        std::vector<double> residual(len);
        const Eigen::MatrixXd gram = group * group.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        const Eigen::Index top = gram.rows() - 1;
        if (eig.info() == Eigen::Success && eig.eigenvalues()(top) > 0.0) {
            Eigen::VectorXd direction = group.transpose() * eig.eigenvectors().col(top);
            direction.normalize();
            const Eigen::VectorXd template_wave = direction.dot(centred) * direction;
            for (std::size_t i = 0; i < len; ++i) {
                residual[i] = centred(static_cast<Eigen::Index>(i)) - template_wave(static_cast<Eigen::Index>(i));
            }
        } else {
            for (std::size_t i = 0; i < len; ++i) residual[i] = centred(static_cast<Eigen::Index>(i));
        }
        std::copy(residual.begin(), residual.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(w.start));
    }
    return out;
}

}  // namespace fwave
