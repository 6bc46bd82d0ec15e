#include "fwave/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "fwave/error.hpp"

namespace fwave {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Independent streams per component keep each one stable when another
// component's parameters change.
enum Stream : std::uint64_t {
    kFwaveStream = 1,
    kRhythmStream = 2,
    kNoiseStream = 3,
    kInterferenceStream = 4,
    kCohortStream = 5,
};

constexpr double kQrsSigmaNarrow = 0.010;
constexpr double kQrsSigmaWide = 0.020;
constexpr double kQrsWideWeight = 0.25;
constexpr double kQrsSupport = 0.10;
constexpr double kTOnset = 0.12;
constexpr double kTDuration = 0.16;
constexpr double kTRelativeAmp = 0.25;
constexpr double kBaselineHz = 0.2;
constexpr double kPowerlineHz = 50.0;

constexpr double kSrDepthLow = 0.0;
constexpr double kSrDepthHigh = 0.2;
constexpr double kAfDepthHigh = 0.8;

std::size_t sample_count(const SynthSpec& spec) {
    return static_cast<std::size_t>(std::llround(spec.duration_s * spec.fs));
}

double qrs_shape(double t) {
    const double narrow = std::exp(-t * t / (2.0 * kQrsSigmaNarrow * kQrsSigmaNarrow));
    const double wide = std::exp(-t * t / (2.0 * kQrsSigmaWide * kQrsSigmaWide));
    return (narrow - kQrsWideWeight * wide) / (1.0 - kQrsWideWeight);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + stream * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SynthRng::SynthRng(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}

double SynthRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SynthRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double SynthRng::normal() {
    // 1 - u keeps the log argument in (0, 1]
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

void validate(const SynthSpec& spec) {
    const auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
    if (!(spec.duration_s > 0.0)) bad("duration must be positive");
    if (spec.fs <= 0) bad("fs must be positive");
    if (!(spec.daf_hz >= 3.0 && spec.daf_hz <= 12.0)) bad("daf_hz must lie in [3, 12]");
    if (!(spec.fwave_amp_uv >= 0.0 && spec.qrs_amp_uv >= 0.0 && spec.noise_rms_uv >= 0.0 &&
          spec.powerline_amp_uv >= 0.0 && spec.baseline_amp_uv >= 0.0)) {
        bad("amplitudes must be non-negative");
    }
    if (!(spec.fwave_am_depth >= 0.0 && spec.fwave_am_depth <= 1.0)) bad("AM depth must lie in [0, 1]");
    if (!(spec.fwave_am_period_s > 0.0)) bad("AM period must be positive");
    if (!(spec.mean_rr_s > 0.25)) bad("mean RR must exceed 0.25 s");
    if (!(spec.rr_jitter_frac >= 0.0 && spec.rr_jitter_frac < 1.0)) bad("RR jitter must lie in [0, 1)");
    if (sample_count(spec) < 2) bad("record too short");
}

FWaveTruth gen_fwaves(const SynthSpec& spec) {
    validate(spec);
    SynthRng rng(spec.seed, kFwaveStream);
    std::array<double, 3> phase{};
    for (double& p : phase) p = rng.uniform(0.0, kTwoPi);

    // RMS of sum (a/h) sin(.) over h=1..3 is a * sqrt((1 + 1/4 + 1/9) / 2)
    const double a = spec.fwave_amp_uv / std::sqrt((1.0 + 1.0 / 4.0 + 1.0 / 9.0) / 2.0);
    const std::size_t n = sample_count(spec);
    FWaveTruth out;
    out.samples.resize(n);
    out.envelope.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / spec.fs;
        const double env = 1.0 + spec.fwave_am_depth * std::sin(kTwoPi * t / spec.fwave_am_period_s);
        double wave = 0.0;
        for (int h = 1; h <= 3; ++h) {
            wave += (a / h) * std::sin(kTwoPi * h * spec.daf_hz * t + phase[static_cast<std::size_t>(h - 1)]);
        }
        out.envelope[i] = env;
        out.samples[i] = env * wave;
    }
    return out;
}

VentricularTruth gen_ventricular(const SynthSpec& spec) {
    validate(spec);
    SynthRng rng(spec.seed, kRhythmStream);
    const std::size_t n = sample_count(spec);
    const double fs = spec.fs;
    VentricularTruth out;
    out.samples.assign(n, 0.0);

    const auto next_rr = [&] { return spec.mean_rr_s * (1.0 + spec.rr_jitter_frac * rng.uniform(-1.0, 1.0)); };
    double t = 0.5 * next_rr();
    while (true) {
        const auto r = static_cast<std::size_t>(std::llround(t * fs));
        if (r >= n) break;
        out.r_peaks.push_back(r);

        const auto support = static_cast<std::ptrdiff_t>(std::llround(kQrsSupport * fs));
        for (std::ptrdiff_t k = -support; k <= support; ++k) {
            const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(r) + k;
            if (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) continue;
            out.samples[static_cast<std::size_t>(i)] += spec.qrs_amp_uv * qrs_shape(static_cast<double>(k) / fs);
        }
        const auto t_start = static_cast<std::ptrdiff_t>(std::llround(kTOnset * fs));
        const auto t_len = static_cast<std::ptrdiff_t>(std::llround(kTDuration * fs));
        for (std::ptrdiff_t k = 0; k <= t_len; ++k) {
            const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(r) + t_start + k;
            if (i >= static_cast<std::ptrdiff_t>(n)) break;
            out.samples[static_cast<std::size_t>(i)] +=
                kTRelativeAmp * spec.qrs_amp_uv * std::sin(std::numbers::pi * static_cast<double>(k) / t_len);
        }
        t += next_rr();
    }
    return out;
}

SynthRecord gen_record(const SynthSpec& spec, const std::string& record_id) {
    validate(spec);
    SynthRecord out;
    out.fwaves = gen_fwaves(spec);
    out.ventricular = gen_ventricular(spec);
    out.daf_hz = spec.daf_hz;
    out.am_depth = spec.fwave_am_depth;

    const std::size_t n = sample_count(spec);
    SynthRng noise_rng(spec.seed, kNoiseStream);
    out.noise.resize(n);
    for (double& v : out.noise) v = spec.noise_rms_uv * noise_rng.normal();

    SynthRng phase_rng(spec.seed, kInterferenceStream);
    const double pl_phase = phase_rng.uniform(0.0, kTwoPi);
    const double bl_phase = phase_rng.uniform(0.0, kTwoPi);
    out.powerline.resize(n);
    out.baseline.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / spec.fs;
        out.powerline[i] = spec.powerline_amp_uv * std::sin(kTwoPi * kPowerlineHz * t + pl_phase);
        out.baseline[i] = spec.baseline_amp_uv * std::sin(kTwoPi * kBaselineHz * t + bl_phase);
    }

    out.record.record_id = record_id;
    out.record.fs = spec.fs;
    out.record.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.record.samples[i] =
            out.fwaves.samples[i] + out.ventricular.samples[i] + out.noise[i] + out.powerline[i] + out.baseline[i];
    }
    return out;
}

SynthCohort gen_cohort(const CohortDesign& design, const SynthSpec& base) {
    if (design.n_sr == 0 || design.n_af == 0) {
        throw Error(ErrorCode::InvalidCounts, "both outcome groups need at least one record");
    }
    const double af_low = design.identical_ranges ? kSrDepthLow : kSrDepthHigh + design.separation;
    const double sr_high = design.identical_ranges ? kAfDepthHigh : kSrDepthHigh;
    if (!(design.separation >= 0.0) || af_low > kAfDepthHigh) {
        throw Error(ErrorCode::InvalidConfig, "separation must lie in [0, 0.6]");
    }
    validate(base);

    SynthCohort cohort;
    const std::size_t total = design.n_sr + design.n_af;
    for (std::size_t i = 0; i < total; ++i) {
        const bool relapsed = i >= design.n_sr;
        const std::size_t group_index = relapsed ? i - design.n_sr : i;
        SynthRng rng(derive_seed(design.seed, i), kCohortStream);

        SynthSpec spec = base;
        spec.seed = derive_seed(design.seed, i);
        spec.fwave_am_depth = relapsed ? rng.uniform(af_low, kAfDepthHigh) : rng.uniform(kSrDepthLow, sr_high);

        char id[32];
        std::snprintf(id, sizeof id, "%s_%03zu", relapsed ? "af" : "sr", group_index);
        cohort.records.push_back(gen_record(spec, id));
        cohort.labels.emplace(id, relapsed ? Outcome::RelapsedAF : Outcome::MaintainedSR);
    }
    return cohort;
}

}  // namespace fwave
