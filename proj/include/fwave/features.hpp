#pragma once

#include <span>
#include <string>
#include <vector>

#include "fwave/dsp.hpp"
#include "fwave/qrst.hpp"

namespace fwave {

/// Consecutive, non-overlapping, equal-length pieces anchored at sample 0.
struct SegmentSeries {
    std::vector<std::vector<double>> segments;
    double fs = 0.0;
};

struct FeatureSet {
    std::string record_id;
    double cv_rwe7 = 0.0;
    double daf_hz = 0.0;
    double fwa_uv = 0.0;
    std::size_t n_segments = 0;
    std::vector<double> rwe7_series;
};

struct RweOptions {
    int levels = 8;
    int scale = 7;
    int vanishing_moments = 6;
};

struct DafOptions {
    double band_low_hz = 3.0;
    double band_high_hz = 12.0;
    WelchOptions welch;
};

/// Whole segments only; the trailing partial segment is dropped. Throws
/// SignalTooShort below five seconds or when fewer than two segments fit.
SegmentSeries segment_signal(const FWaveSignal& fw, double segment_len_s = 1.0);

/// Relative wavelet energy of `options.scale` for each segment.
std::vector<double> rwe7_series(const SegmentSeries& segs, const RweOptions& options = {});

/// Sample standard deviation (n-1) over the arithmetic mean.
double coefficient_of_variation(std::span<const double> series);

/// Frequency of the largest Welch PSD value inside the band, refined by
/// log-parabolic interpolation, clamped to the band and rounded to 1 uHz.
double dominant_atrial_frequency(const FWaveSignal& fw, const DafOptions& options = {});

/// Root mean square over the whole signal.
double fwave_amplitude(const FWaveSignal& fw);

}  // namespace fwave
