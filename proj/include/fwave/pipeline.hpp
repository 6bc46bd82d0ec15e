#pragma once

#include <cstddef>

#include "fwave/features.hpp"
#include "fwave/ingest.hpp"
#include "fwave/preprocess.hpp"
#include "fwave/qrst.hpp"

namespace fwave {

/// Every tunable of the record-level pipeline.
struct PipelineConfig {
    PreprocessConfig preprocess;
    double rv = kDefaultPhasorRv;
    std::size_t m_similar = 10;
    double segment_len_s = 1.0;
    int wavelet_levels = 8;
    int rwe_scale = 7;
    double daf_band_low_hz = 3.0;
    double daf_band_high_hz = 12.0;
    WelchOptions psd;
};

/// Throws InvalidConfig for inconsistent settings (e.g. rwe_scale above
/// wavelet_levels, DAF band outside (0, fs/2)).
void validate(const PipelineConfig& cfg, double fs);

/// preprocess -> detect_r_peaks -> cancel_qrst. Errors carry the stage name.
FWaveSignal extract_fwaves(const EcgRecord& record, const PipelineConfig& cfg);

/// Same as above but also hands back the detected beats.
FWaveSignal extract_fwaves(const EcgRecord& record, const PipelineConfig& cfg, RPeakList& peaks);

/// Per-record predictors from an already extracted f-wave signal.
FeatureSet compute_features(const FWaveSignal& fw, const PipelineConfig& cfg);

/// Full record-level pipeline.
FeatureSet compute_feature_set(const EcgRecord& record, const PipelineConfig& cfg);

}  // namespace fwave
