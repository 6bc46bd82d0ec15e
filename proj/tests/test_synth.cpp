#include "fwave/dsp.hpp"
#include "fwave/synth.hpp"
#include "support.hpp"

using namespace fwave;

namespace {

std::uint64_t splitmix_oracle(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

TEST_CASE("seed derivation is SplitMix64") {
    // stream 1 adds one golden-ratio increment, exactly SplitMix64's first output
    CHECK(derive_seed(0, 1) == splitmix_oracle(0));
    CHECK(derive_seed(12345, 1) == splitmix_oracle(12345));
    CHECK(derive_seed(0, 1) == 0xE220A8397B1DCDAFULL);
    CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("generator draws") {
    SynthRng a(9, 3);
    SynthRng b(9, 3);
    SynthRng c(9, 4);
    double sum = 0.0, sumsq = 0.0;
    bool differs = false;
    for (int i = 0; i < 20000; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        differs = differs || (u != c.uniform());
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double z = a.normal();
        b.normal();
        c.normal();
        sum += z;
        sumsq += z * z;
    }
    CHECK(differs);
    CHECK(std::abs(sum / 20000.0) < 0.03);
    CHECK(sumsq / 20000.0 == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("f-wave model") {
    SynthSpec s;
    s.fwave_am_depth = 0.0;
    const FWaveTruth f = gen_fwaves(s);
    CHECK(f.samples.size() == 20000);
    CHECK(testing::rms(f.samples) == doctest::Approx(s.fwave_amp_uv).epsilon(0.01));
    for (double e : f.envelope) REQUIRE(e == 1.0);

    const Spectrum psd = welch_psd(f.samples, 1000.0);
    const auto bin = static_cast<std::size_t>(std::max_element(psd.power.begin(), psd.power.end()) - psd.power.begin());
    CHECK(interpolate_peak(psd, bin) == doctest::Approx(6.0).epsilon(0.05 / 6.0));

    SynthSpec m = s;
    m.fwave_am_depth = 0.5;
    const FWaveTruth g = gen_fwaves(m);
    CHECK(*std::max_element(g.envelope.begin(), g.envelope.end()) == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(*std::min_element(g.envelope.begin(), g.envelope.end()) == doctest::Approx(0.5).epsilon(1e-6));
    // Same phases: the modulated wave is the stationary one times the envelope.
    for (std::size_t i = 0; i < g.samples.size(); i += 97) CHECK(g.samples[i] == doctest::Approx(g.envelope[i] * f.samples[i]));
}

TEST_CASE("ventricular model") {
    SynthSpec s;
    s.rr_jitter_frac = 0.0;
    const VentricularTruth v = gen_ventricular(s);
    REQUIRE(v.r_peaks.size() == 25);
    for (std::size_t i = 1; i < v.r_peaks.size(); ++i) CHECK(v.r_peaks[i] - v.r_peaks[i - 1] == 800);
    for (std::size_t r : v.r_peaks) CHECK(v.samples[r] == doctest::Approx(s.qrs_amp_uv));

    SynthSpec jitter;
    const VentricularTruth j = gen_ventricular(jitter);
    for (std::size_t i = 1; i < j.r_peaks.size(); ++i) {
        const auto rr = j.r_peaks[i] - j.r_peaks[i - 1];
        CHECK(rr >= 679);
        CHECK(rr <= 921);
    }

    SynthSpec silent;
    silent.qrs_amp_uv = 0.0;
    CHECK(testing::max_abs(gen_ventricular(silent).samples) == 0.0);
}

TEST_CASE("records are additive, reproducible and carry their truth") {
    SynthSpec s;
    s.seed = 42;
    const SynthRecord a = gen_record(s, "a");
    const SynthRecord b = gen_record(s, "a");
    CHECK(a.record.samples == b.record.samples);
    CHECK(a.record.record_id == "a");
    CHECK(a.record.fs == 1000);
    for (std::size_t i = 0; i < a.record.samples.size(); ++i) {
        const double sum = a.fwaves.samples[i] + a.ventricular.samples[i] + a.noise[i] + a.powerline[i] + a.baseline[i];
        REQUIRE(a.record.samples[i] == sum);
    }
    CHECK(a.fwaves.samples == gen_fwaves(s).samples);
    CHECK(a.ventricular.r_peaks == gen_ventricular(s).r_peaks);
    CHECK(a.daf_hz == s.daf_hz);
    CHECK(testing::rms(a.noise) == doctest::Approx(10.0).epsilon(0.03));
    CHECK(testing::tone_amplitude(a.powerline, 50.0, 1000.0) == doctest::Approx(20.0).epsilon(1e-6));

    SynthSpec other = s;
    other.seed = 43;
    CHECK(gen_record(other).record.samples != a.record.samples);

    SynthSpec only_f = s;
    only_f.qrs_amp_uv = only_f.noise_rms_uv = only_f.powerline_amp_uv = only_f.baseline_amp_uv = 0.0;
    const SynthRecord f = gen_record(only_f);
    CHECK(f.record.samples == f.fwaves.samples);
}

TEST_CASE("spec validation") {
    SynthSpec s;
    s.daf_hz = 2.0;
    CHECK_ERROR_CODE(validate(s), ErrorCode::InvalidConfig);
    s = {};
    s.noise_rms_uv = -1.0;
    CHECK_ERROR_CODE(validate(s), ErrorCode::InvalidConfig);
    s = {};
    s.mean_rr_s = 0.25;
    CHECK_ERROR_CODE(validate(s), ErrorCode::InvalidConfig);
    CHECK_NOTHROW(validate(SynthSpec{}));
}

TEST_CASE("cohorts") {
    CohortDesign d;
    d.n_sr = 4;
    d.n_af = 3;
    d.seed = 5;
    const SynthCohort c = gen_cohort(d);
    REQUIRE(c.records.size() == 7);
    CHECK(c.labels.size() == 7);
    CHECK(c.records[0].record.record_id == "sr_000");
    CHECK(c.records[6].record.record_id == "af_002");
    for (const SynthRecord& r : c.records) {
        const bool af = c.labels.at(r.record.record_id) == Outcome::RelapsedAF;
        if (af) {
            CHECK(r.am_depth >= 0.6);
            CHECK(r.am_depth <= 0.8);
        } else {
            CHECK(r.am_depth >= 0.0);
            CHECK(r.am_depth <= 0.2);
        }
        CHECK(r.daf_hz == 6.0);
    }
    CHECK(gen_cohort(d).records[3].record.samples == c.records[3].record.samples);

    CohortDesign null_design = d;
    null_design.separation = 0.0;
    null_design.identical_ranges = true;
    null_design.n_sr = null_design.n_af = 40;
    double max_sr = 0.0, min_af = 1.0;
    for (const SynthRecord& r : gen_cohort(null_design).records) {
        if (r.record.record_id.starts_with("sr")) max_sr = std::max(max_sr, r.am_depth);
        else min_af = std::min(min_af, r.am_depth);
    }
    CHECK(max_sr > 0.5);
    CHECK(min_af < 0.3);

    CohortDesign empty = d;
    empty.n_sr = 0;
    CHECK_ERROR_CODE(gen_cohort(empty), ErrorCode::InvalidCounts);
    CohortDesign too_wide = d;
    too_wide.separation = 0.7;
    CHECK_ERROR_CODE(gen_cohort(too_wide), ErrorCode::InvalidConfig);
}
