#include "fwave/features.hpp"
#include "fwave/pipeline.hpp"
#include "fwave/synth.hpp"
#include "fwave/wavelet.hpp"
#include "support.hpp"

using namespace fwave;

namespace {

constexpr double kFs = 1000.0;

FWaveSignal signal_of(std::vector<double> x) {
    FWaveSignal fw;
    fw.samples = std::move(x);
    fw.fs = kFs;
    fw.source_id = "probe";
    return fw;
}

}  // namespace

TEST_CASE("segmentation") {
    const auto s20 = segment_signal(signal_of(std::vector<double>(20000, 1.0)));
    CHECK(s20.segments.size() == 20);
    for (const auto& seg : s20.segments) CHECK(seg.size() == 1000);

    std::vector<double> ramp(5900);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
    const auto s59 = segment_signal(signal_of(ramp));
    REQUIRE(s59.segments.size() == 5);
    CHECK(s59.segments[3].front() == 3000.0);
    CHECK(s59.segments[4].back() == 4999.0);

    CHECK(segment_signal(signal_of(std::vector<double>(20000, 1.0)), 2.0).segments.size() == 10);
    CHECK_ERROR_CODE(segment_signal(signal_of(std::vector<double>(3000, 1.0))), ErrorCode::SignalTooShort);
    CHECK_ERROR_CODE(segment_signal(signal_of(std::vector<double>(6000, 1.0)), 4.0), ErrorCode::SignalTooShort);
}

TEST_CASE("RWE7 series") {
    SUBCASE("identical segments give identical values") {
        const auto one = testing::tone(6.0, 30.0, 1000, kFs);
        std::vector<double> x;
        for (int k = 0; k < 20; ++k) x.insert(x.end(), one.begin(), one.end());
        const auto r = rwe7_series(segment_signal(signal_of(x)));
        REQUIRE(r.size() == 20);
        for (double v : r) CHECK(v == r[0]);
    }
    SUBCASE("pure 6 Hz segments equal the single-segment wavelet value") {
        const auto one = testing::tone(6.0, 1.0, 1000, kFs);
        const double expected = relative_wavelet_energy(swt_decompose(one, {}, kFs), 7);
        const auto r = rwe7_series(segment_signal(signal_of(testing::tone(6.0, 1.0, 10000, kFs))));
        for (double v : r) CHECK(v == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("an all-zero segment") {
        auto x = testing::gaussian_noise(8000, 2);
        std::fill(x.begin() + 3000, x.begin() + 4000, 0.0);
        try {
            rwe7_series(segment_signal(signal_of(x)));
            FAIL("expected ZeroEnergy");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ZeroEnergy);
            CHECK(std::string(e.what()).find("segment 3") != std::string::npos);
        }
    }
    SUBCASE("values lie in [0, 1]") {
        for (double v : rwe7_series(segment_signal(signal_of(testing::gaussian_noise(9000, 5))))) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("coefficient of variation") {
    CHECK(coefficient_of_variation(std::vector<double>{0.2, 0.2, 0.2}) == 0.0);
    CHECK(coefficient_of_variation(std::vector<double>{0.2, 0.3}) == doctest::Approx(0.28284271).epsilon(1e-7));
    CHECK_ERROR_CODE(coefficient_of_variation(std::vector<double>{0.2}), ErrorCode::TooFewValues);
    CHECK_ERROR_CODE(coefficient_of_variation(std::vector<double>{-1.0, 1.0}), ErrorCode::ZeroMean);

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.1, 0.9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(20);
        for (double& x : v) x = u(rng);
        // Two-pass oracle.
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= 20.0;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double oracle = std::sqrt(ss / 19.0) / mean;
        CHECK(std::abs(coefficient_of_variation(v) - oracle) < 1e-12);
    }
}

TEST_CASE("dominant atrial frequency") {
    CHECK(dominant_atrial_frequency(signal_of(testing::tone(6.0, 50.0, 20000, kFs))) ==
          doctest::Approx(6.0).epsilon(0.05 / 6.0));
    const auto mix = testing::add(testing::tone(5.0, 2.0, 20000, kFs), testing::tone(9.0, 1.0, 20000, kFs));
    CHECK(dominant_atrial_frequency(signal_of(mix)) == doctest::Approx(5.0).epsilon(0.01));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const double f = dominant_atrial_frequency(signal_of(testing::gaussian_noise(10000, seed)));
        CHECK(f >= 3.0);
        CHECK(f <= 12.0);
    }
    // A stronger tone outside the band does not win.
    const auto outside = testing::add(testing::tone(20.0, 100.0, 20000, kFs), testing::tone(7.0, 10.0, 20000, kFs));
    CHECK(dominant_atrial_frequency(signal_of(outside)) == doctest::Approx(7.0).epsilon(0.01));
    CHECK(dominant_atrial_frequency(signal_of(testing::tone(6.0, 1.0, 20000, kFs)),
                                    DafOptions{4.0, 5.0, {}}) <= 5.0);
}

TEST_CASE("f-wave amplitude") {
    CHECK(fwave_amplitude(signal_of(testing::tone(6.0, 100.0, 20000, kFs))) == doctest::Approx(70.7107).epsilon(1e-4));
    CHECK(fwave_amplitude(signal_of(std::vector<double>(100, 0.0))) == 0.0);
    CHECK(fwave_amplitude(signal_of(std::vector<double>(100, 50.0))) == doctest::Approx(50.0));
    CHECK_ERROR_CODE(fwave_amplitude(signal_of({})), ErrorCode::EmptySignal);
}

TEST_CASE("scale behaviour of the three predictors") {
    const FWaveSignal fw = signal_of(testing::add(testing::tone(6.0, 40.0, 20000, kFs), testing::gaussian_noise(20000, 3, 8.0)));
    const PipelineConfig cfg;
    const FeatureSet base = compute_features(fw, cfg);
    for (double a : {0.5, 2.0, 10.0}) {
        FWaveSignal s = fw;
        s.samples = testing::scale(fw.samples, a);
        const FeatureSet f = compute_features(s, cfg);
        CHECK(std::abs(f.cv_rwe7 - base.cv_rwe7) < 1e-6);
        CHECK(f.daf_hz == base.daf_hz);
        CHECK(std::abs(f.fwa_uv - a * base.fwa_uv) <= 1e-9 * a * base.fwa_uv);
    }
}

TEST_CASE("full feature pipeline on synthetic records") {
    const PipelineConfig cfg;
    SUBCASE("DAF recovered from a default record") {
        const SynthRecord r = gen_record(SynthSpec{}, "s1");
        const FeatureSet f = compute_feature_set(r.record, cfg);
        CHECK(f.record_id == "s1");
        CHECK(f.n_segments == 20);
        CHECK(f.rwe7_series.size() == 20);
        CHECK(f.daf_hz == doctest::Approx(6.0).epsilon(0.2 / 6.0));
        CHECK(f.fwa_uv > 0.0);
        CHECK(std::isfinite(f.cv_rwe7));
    }
    SUBCASE("deterministic") {
        const SynthRecord r = gen_record(SynthSpec{});
        const FeatureSet a = compute_feature_set(r.record, cfg);
        const FeatureSet b = compute_feature_set(r.record, cfg);
        CHECK(a.cv_rwe7 == b.cv_rwe7);
        CHECK(a.daf_hz == b.daf_hz);
        CHECK(a.fwa_uv == b.fwa_uv);
        CHECK(a.rwe7_series == b.rwe7_series);
    }
    SUBCASE("a strongly modulated envelope raises CV RWE7") {
        SynthSpec flat;
        flat.fwave_am_depth = 0.0;
        SynthSpec deep = flat;
        deep.fwave_am_depth = 0.8;
        CHECK(compute_feature_set(gen_record(flat).record, cfg).cv_rwe7 <
              compute_feature_set(gen_record(deep).record, cfg).cv_rwe7);
    }
    SUBCASE("stage errors name the stage") {
        EcgRecord shortrec = gen_record(SynthSpec{}).record;
        shortrec.samples.resize(3000);
        try {
            compute_feature_set(shortrec, cfg);
            FAIL("expected SignalTooShort");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SignalTooShort);
            CHECK(std::string(e.what()).find("preprocess") != std::string::npos);
        }
        SynthSpec silent;
        silent.qrs_amp_uv = 0.0;
        try {
            compute_feature_set(gen_record(silent).record, cfg);
            FAIL("expected NoBeatsDetected");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NoBeatsDetected);
            CHECK(std::string(e.what()).find("detect_r_peaks") != std::string::npos);
        }
    }
    SUBCASE("config validation") {
        PipelineConfig bad;
        bad.rwe_scale = 9;
        CHECK_ERROR_CODE(validate(bad, kFs), ErrorCode::InvalidConfig);
        bad = {};
        bad.daf_band_high_hz = 600.0;
        CHECK_ERROR_CODE(validate(bad, kFs), ErrorCode::InvalidConfig);
        bad = {};
        bad.daf_band_low_hz = 13.0;
        CHECK_ERROR_CODE(validate(bad, kFs), ErrorCode::InvalidConfig);
        CHECK_NOTHROW(validate(PipelineConfig{}, kFs));
    }
}
