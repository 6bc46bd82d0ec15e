#include "fwave/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fwave/error.hpp"
#include "fwave/wavelet.hpp"

namespace fwave {

namespace {
constexpr double kMinSeconds = 5.0;
constexpr double kDafGrid = 1e6;  // steps per Hz

void require_five_seconds(const FWaveSignal& fw, const char* what) {
    if (!(fw.fs > 0.0)) throw Error(ErrorCode::InvalidConfig, "fs must be positive");
    if (fw.duration_seconds() < kMinSeconds) {
        throw Error(ErrorCode::SignalTooShort, std::string(what) + " needs at least 5 s, got " +
                                                   std::to_string(fw.duration_seconds()) + " s");
    }
}
}  // namespace

SegmentSeries segment_signal(const FWaveSignal& fw, double segment_len_s) {
    require_five_seconds(fw, "segmentation");
    if (!(segment_len_s > 0.0)) throw Error(ErrorCode::InvalidConfig, "segment length must be positive");
    const auto len = static_cast<std::size_t>(std::lround(segment_len_s * fw.fs));
    if (len < 2) throw Error(ErrorCode::InvalidConfig, "segment shorter than two samples");
    const std::size_t count = fw.samples.size() / len;
    if (count < 2) {
        throw Error(ErrorCode::SignalTooShort, "only " + std::to_string(count) + " segment(s) of " +
                                                   std::to_string(segment_len_s) + " s fit");
    }
    SegmentSeries out;
    out.fs = fw.fs;
    for (std::size_t s = 0; s < count; ++s) {
        const auto begin = fw.samples.begin() + static_cast<std::ptrdiff_t>(s * len);
        out.segments.emplace_back(begin, begin + static_cast<std::ptrdiff_t>(len));
    }
    return out;
}

std::vector<double> rwe7_series(const SegmentSeries& segs, const RweOptions& options) {
    SwtOptions swt;
    swt.levels = options.levels;
    swt.vanishing_moments = options.vanishing_moments;
    std::vector<double> out;
    out.reserve(segs.segments.size());
    for (std::size_t i = 0; i < segs.segments.size(); ++i) {
        const WaveletDecomposition d = swt_decompose(segs.segments[i], swt, segs.fs);
        try {
            out.push_back(relative_wavelet_energy(d, options.scale));
        } catch (const Error& e) {
            throw Error(e.code(), "segment " + std::to_string(i) + ": " + e.detail());
        }
    }
    return out;
}

double coefficient_of_variation(std::span<const double> series) {
    if (series.size() < 2) throw Error(ErrorCode::TooFewValues, "need at least two values");
    const double n = static_cast<double>(series.size());
    // Deviations are taken about the first value so a constant series gives
    // exactly zero spread.
    const double origin = series.front();
    double shift = 0.0;
    for (double v : series) shift += v - origin;
    shift /= n;
    const double mean = origin + shift;
    if (mean == 0.0) throw Error(ErrorCode::ZeroMean, "mean is zero");
    double ss = 0.0;
    for (double v : series) ss += (v - origin - shift) * (v - origin - shift);
    return std::sqrt(ss / (n - 1.0)) / mean;
}

double dominant_atrial_frequency(const FWaveSignal& fw, const DafOptions& options) {
    require_five_seconds(fw, "dominant frequency");
    if (!(options.band_low_hz > 0.0 && options.band_low_hz < options.band_high_hz &&
          options.band_high_hz < fw.fs / 2.0)) {
        throw Error(ErrorCode::InvalidConfig, "DAF band must lie inside (0, fs/2)");
    }
    const Spectrum psd = welch_psd(fw.samples, fw.fs, options.welch);
    std::size_t best = psd.freq_hz.size();
    for (std::size_t k = 0; k < psd.freq_hz.size(); ++k) {
        const double f = psd.freq_hz[k];
        if (f < options.band_low_hz || f > options.band_high_hz) continue;
        if (best == psd.freq_hz.size() || psd.power[k] > psd.power[best]) best = k;
    }
    if (best == psd.freq_hz.size()) throw Error(ErrorCode::InvalidConfig, "no PSD bin inside the DAF band");
    const double hz = std::clamp(interpolate_peak(psd, best), options.band_low_hz, options.band_high_hz);
    // Rounding to 1 uHz absorbs last-bit differences, e.g. between a record and
    // a rescaled copy of it.
    return std::round(hz * kDafGrid) / kDafGrid;
}

double fwave_amplitude(const FWaveSignal& fw) {
    if (fw.samples.empty()) throw Error(ErrorCode::EmptySignal, "no f-wave samples");
    double ss = 0.0;
    for (double v : fw.samples) ss += v * v;
    return std::sqrt(ss / static_cast<double>(fw.samples.size()));
}

}  // namespace fwave
