#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fwave/ingest.hpp"

namespace fwave {

/// Parameters of one synthetic AF recording. Amplitudes in microvolts.
struct SynthSpec {
    double duration_s = 20.0;
    int fs = 1000;
    double daf_hz = 6.0;
    double fwave_amp_uv = 50.0;
    double fwave_am_depth = 0.3;
    double fwave_am_period_s = 4.0;
    double mean_rr_s = 0.8;
    double rr_jitter_frac = 0.15;
    double qrs_amp_uv = 1000.0;
    double noise_rms_uv = 10.0;
    double powerline_amp_uv = 20.0;
    double baseline_amp_uv = 100.0;
    std::uint64_t seed = 1;
};

/// Throws InvalidConfig when the spec breaks its invariants.
void validate(const SynthSpec& spec);

/// Portable generator used for every random draw: std::mt19937_64 (its
/// output sequence is fixed by the C++ standard) seeded with a SplitMix64
/// mix of (seed, stream). Uniforms take the top 53 bits; normals use
/// Box-Muller on two uniforms.
class SynthRng {
public:
    SynthRng(std::uint64_t seed, std::uint64_t stream);
    double uniform();                    // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    double normal();

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finaliser over seed + stream * golden ratio constant.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct FWaveTruth {
    std::vector<double> samples;
    std::vector<double> envelope;
};

struct VentricularTruth {
    std::vector<double> samples;
    std::vector<std::size_t> r_peaks;
};

/// env(t) * sum_{h=1..3} (a/h) sin(2 pi h daf t + phi_h), with a chosen so the
/// RMS equals fwave_amp_uv when env is constant 1.
FWaveTruth gen_fwaves(const SynthSpec& spec);

/// Difference-of-Gaussians QRS plus a half-sine T wave per beat.
VentricularTruth gen_ventricular(const SynthSpec& spec);

struct SynthRecord {
    EcgRecord record;
    FWaveTruth fwaves;
    VentricularTruth ventricular;
    std::vector<double> noise;
    std::vector<double> powerline;
    std::vector<double> baseline;
    double daf_hz = 0.0;
    double am_depth = 0.0;
};

/// record = fwaves + ventricular + noise + powerline + baseline, summed in
/// that order.
SynthRecord gen_record(const SynthSpec& spec, const std::string& record_id = "synth");

struct CohortDesign {
    std::size_t n_sr = 15;
    std::size_t n_af = 15;
    double separation = 0.4;
    /// When set both groups draw the AM depth from the same range.
    bool identical_ranges = false;
    std::uint64_t seed = 1;
};

struct SynthCohort {
    std::vector<SynthRecord> records;
    CohortLabels labels;
};

/// SR records take AM depth from [0, 0.2], AF records from
/// [0.2 + separation, 0.8]; with identical_ranges both use [0, 0.8]. DAF and
/// f-wave amplitude are taken from the base spec. Throws
/// InvalidCounts if either group is empty.
SynthCohort gen_cohort(const CohortDesign& design, const SynthSpec& base = {});

}  // namespace fwave
