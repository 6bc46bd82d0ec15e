#include "fwave/pipeline.hpp"

#include <string>

#include "fwave/error.hpp"

namespace fwave {

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw e.in_stage(name);
    }
}

}  // namespace

void validate(const PipelineConfig& cfg, double fs) {
    validate(cfg.preprocess, fs);
    if (!(cfg.rv > 0.0)) throw Error(ErrorCode::InvalidConfig, "rv must be positive");
    if (cfg.m_similar < 1) throw Error(ErrorCode::InvalidConfig, "m_similar must be at least 1");
    if (!(cfg.segment_len_s > 0.0)) throw Error(ErrorCode::InvalidConfig, "segment length must be positive");
    if (cfg.wavelet_levels < 1 || cfg.rwe_scale < 1 || cfg.rwe_scale > cfg.wavelet_levels) {
        throw Error(ErrorCode::InvalidConfig, "need 1 <= rwe_scale <= wavelet_levels");
    }
    if (!(cfg.daf_band_low_hz > 0.0 && cfg.daf_band_low_hz < cfg.daf_band_high_hz &&
          cfg.daf_band_high_hz < fs / 2.0)) {
        throw Error(ErrorCode::InvalidConfig, "DAF band must lie inside (0, fs/2)");
    }
    if (!(cfg.psd.window_s > 0.0) || cfg.psd.overlap < 0.0 || cfg.psd.overlap >= 1.0 || cfg.psd.nfft < 2) {
        throw Error(ErrorCode::InvalidConfig, "invalid PSD settings");
    }
}

FWaveSignal extract_fwaves(const EcgRecord& record, const PipelineConfig& cfg, RPeakList& peaks) {
    const double fs = static_cast<double>(record.fs);
    stage("config", [&] {
        validate(cfg, fs);
        return 0;
    });
    const std::vector<double> clean = stage("preprocess", [&] { return preprocess(record, cfg.preprocess); });
    peaks = stage("detect_r_peaks", [&] { return detect_r_peaks(clean, fs, cfg.rv); });
    FWaveSignal fw = stage("cancel_qrst", [&] { return cancel_qrst(clean, fs, peaks, cfg.m_similar); });
    fw.source_id = record.record_id;
    return fw;
}

FWaveSignal extract_fwaves(const EcgRecord& record, const PipelineConfig& cfg) {
    RPeakList peaks;
    return extract_fwaves(record, cfg, peaks);
}

FeatureSet compute_features(const FWaveSignal& fw, const PipelineConfig& cfg) {
    return stage("features", [&] {
        FeatureSet fs;
        fs.record_id = fw.source_id;
        const SegmentSeries segs = segment_signal(fw, cfg.segment_len_s);
        RweOptions rwe;
        rwe.levels = cfg.wavelet_levels;
        rwe.scale = cfg.rwe_scale;
        fs.rwe7_series = rwe7_series(segs, rwe);
        fs.n_segments = segs.segments.size();
        fs.cv_rwe7 = coefficient_of_variation(fs.rwe7_series);

        DafOptions daf;
        daf.band_low_hz = cfg.daf_band_low_hz;
        daf.band_high_hz = cfg.daf_band_high_hz;
        daf.welch = cfg.psd;
        fs.daf_hz = dominant_atrial_frequency(fw, daf);
        fs.fwa_uv = fwave_amplitude(fw);
        return fs;
    });
}

FeatureSet compute_feature_set(const EcgRecord& record, const PipelineConfig& cfg) {
    FeatureSet out = compute_features(extract_fwaves(record, cfg), cfg);
    out.record_id = record.record_id;
    return out;
}

}  // namespace fwave
