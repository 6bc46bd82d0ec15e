#include "fwave/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fwave/dsp.hpp"
#include "fwave/error.hpp"
#include "fwave/wavelet.hpp"

namespace fwave {

namespace {

constexpr double kNotchQ = 30.0;
constexpr double kMinBaselineSeconds = 4.0;
constexpr double kMinPowerlineSeconds = 1.0;
constexpr double kMinRecordSeconds = 5.0;
constexpr double kLowpassTransitionHz = 20.0;

void require_duration(std::span<const double> signal, double fs, double seconds, const char* what) {
    if (static_cast<double>(signal.size()) < seconds * fs) {
        throw Error(ErrorCode::SignalTooShort,
                    std::string(what) + " needs at least " + std::to_string(seconds) + " s, got " +
                        std::to_string(static_cast<double>(signal.size()) / fs) + " s");
    }
}

double median_abs(std::span<const double> v) {
    std::vector<double> a(v.size());
    std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
    const auto mid = a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2);
    std::nth_element(a.begin(), mid, a.end());
    if (a.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(a.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace

void validate(const PreprocessConfig& cfg, double fs) {
    const double nyq = fs / 2.0;
    if (!(fs > 0.0)) throw Error(ErrorCode::InvalidConfig, "fs must be positive");
    if (!(cfg.hp_cutoff_hz > 0.0 && cfg.hp_cutoff_hz < cfg.lp_cutoff_hz && cfg.lp_cutoff_hz < nyq)) {
        throw Error(ErrorCode::InvalidConfig, "need 0 < hp < lp < fs/2");
    }
    if (!(cfg.powerline_hz > 0.0 && cfg.powerline_hz < nyq)) {
        throw Error(ErrorCode::InvalidConfig, "powerline frequency must lie in (0, fs/2)");
    }
    if (!(cfg.stopband_atten_db > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "stopband attenuation must be positive");
    }
}

std::vector<int> powerline_scales(double powerline_hz, double fs) {
    const int scale = std::max(1, static_cast<int>(std::floor(std::log2(fs / powerline_hz))));
    std::vector<int> scales{scale};
    const Band band = scale_band(scale, fs);
    const double position = (powerline_hz - band.low_hz) / (band.high_hz - band.low_hz);
    if (scale > 1 && position > 0.5) scales.insert(scales.begin(), scale - 1);
    return scales;
}

std::vector<double> remove_powerline(std::span<const double> signal, double fs,
                                     const PreprocessConfig& cfg) {
    require_duration(signal, fs, kMinPowerlineSeconds, "powerline removal");
    validate(cfg, fs);

    if (cfg.powerline_mode == PowerlineMode::Notch) {
        return sos_filtfilt(design_notch(cfg.powerline_hz, kNotchQ, fs), signal);
    }

    const std::vector<int> scales = powerline_scales(cfg.powerline_hz, fs);
    SwtOptions options;
    options.levels = scales.back();
    WaveletDecomposition decomp = swt_decompose(signal, options, fs);

    // Interference is the persistent low-amplitude part of the band: zero
    // every coefficient under the universal threshold, keep QRS transients.
    const double spread = std::sqrt(2.0 * std::log(static_cast<double>(signal.size())));
    for (int scale : scales) {
        auto& body = decomp.details[static_cast<std::size_t>(scale - 1)];
        auto& tail = decomp.detail_tails[static_cast<std::size_t>(scale - 1)];
        const double sigma = median_abs(body) / 0.6745;
        const double threshold = sigma * spread;
        const auto shrink = [threshold](double& c) {
            if (!(std::abs(c) > threshold)) c = 0.0;
        };
        std::for_each(body.begin(), body.end(), shrink);
        std::for_each(tail.begin(), tail.end(), shrink);
    }
    return swt_reconstruct(decomp);
}

std::vector<double> remove_baseline(std::span<const double> signal, double fs,
                                    const PreprocessConfig& cfg) {
    require_duration(signal, fs, kMinBaselineSeconds, "baseline removal");
    validate(cfg, fs);

    ChebyshevIISpec spec;
    spec.kind = FilterKind::HighPass;
    spec.passband_edge_hz = cfg.hp_cutoff_hz;
    spec.stopband_edge_hz = cfg.hp_cutoff_hz / 2.0;
    spec.stopband_atten_db = cfg.stopband_atten_db;
    spec.fs = fs;
    std::vector<double> out = sos_filtfilt(design_chebyshev2(spec), signal);

    double mean = 0.0;
    for (double v : out) mean += v;
    mean /= static_cast<double>(out.size());
    for (double& v : out) v -= mean;
    return out;
}

std::vector<double> lowpass_smooth(std::span<const double> signal, double fs,
                                   const PreprocessConfig& cfg) {
    require_duration(signal, fs, kMinBaselineSeconds, "low-pass smoothing");
    validate(cfg, fs);

    const double nyq = fs / 2.0;
    ChebyshevIISpec spec;
    spec.kind = FilterKind::LowPass;
    spec.passband_edge_hz = cfg.lp_cutoff_hz;
    spec.stopband_edge_hz = std::min(cfg.lp_cutoff_hz + kLowpassTransitionHz,
                                     0.5 * (cfg.lp_cutoff_hz + nyq));
    spec.stopband_atten_db = cfg.stopband_atten_db;
    spec.fs = fs;
    return sos_filtfilt(design_chebyshev2(spec), signal);
}

std::vector<double> preprocess(const EcgRecord& record, const PreprocessConfig& cfg) {
    validate_record(record);
    const double fs = static_cast<double>(record.fs);
    require_duration(record.samples, fs, kMinRecordSeconds, "preprocessing");
    std::vector<double> x = remove_powerline(record.samples, fs, cfg);
    x = remove_baseline(x, fs, cfg);
    return lowpass_smooth(x, fs, cfg);
}

}  // namespace fwave
