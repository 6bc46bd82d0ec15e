#include <complex>

#include "fwave/dsp.hpp"
#include "support.hpp"

using namespace fwave;

namespace {

ChebyshevIISpec highpass_spec() {
    ChebyshevIISpec s;
    s.kind = FilterKind::HighPass;
    s.passband_edge_hz = 0.5;
    s.stopband_edge_hz = 0.25;
    return s;
}

double db(double mag) { return 20.0 * std::log10(mag); }

// Direct form I, one section after another.
std::vector<double> naive_filter(const SosFilter& f, std::vector<double> x) {
    for (const Biquad& s : f.sections) {
        std::vector<double> y(x.size(), 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            double acc = s.b[0] * x[i];
            if (i >= 1) acc += s.b[1] * x[i - 1] - s.a[1] * y[i - 1];
            if (i >= 2) acc += s.b[2] * x[i - 2] - s.a[2] * y[i - 2];
            y[i] = acc;
        }
        x = std::move(y);
    }
    return x;
}

}  // namespace

TEST_CASE("minimum orders for the preprocessing filters") {
    CHECK(chebyshev2_min_order(highpass_spec()) == 5);
    CHECK(chebyshev2_min_order(ChebyshevIISpec{}) == 8);
}

TEST_CASE("Chebyshev II designs meet their edges") {
    for (const ChebyshevIISpec& spec : {highpass_spec(), ChebyshevIISpec{}}) {
        const SosFilter f = design_chebyshev2(spec);
        CHECK(f.order == chebyshev2_min_order(spec));
        CHECK(db(sos_magnitude(f, spec.passband_edge_hz, spec.fs)) >= -spec.passband_loss_db - 1e-9);
        const bool hp = spec.kind == FilterKind::HighPass;
        // Stopband: sampled densely, never above -40 dB.
        const double lo = hp ? 1e-4 : spec.stopband_edge_hz;
        const double hi = hp ? spec.stopband_edge_hz : spec.fs / 2.0 - 1e-6;
        for (int k = 0; k <= 2000; ++k) {
            const double freq = lo + (hi - lo) * k / 2000.0;
            CHECK(db(sos_magnitude(f, freq, spec.fs)) <= -spec.stopband_atten_db + 1e-6);
        }
        // Deep passband is flat (type II has no passband ripple).
        CHECK(std::abs(db(sos_magnitude(f, 6.0, spec.fs))) < 0.01);
        for (const Biquad& s : f.sections) CHECK(s.a[0] == 1.0);
    }
}

TEST_CASE("higher attenuation needs a higher order") {
    ChebyshevIISpec s;
    s.stopband_atten_db = 60.0;
    CHECK(chebyshev2_min_order(s) > 8);
}

TEST_CASE("sos_filter agrees with a direct-form oracle") {
    const auto x = testing::gaussian_noise(3000, 8);
    for (const SosFilter& f : {design_chebyshev2(highpass_spec()), design_chebyshev2(ChebyshevIISpec{}),
                               design_notch(50.0, 30.0, 1000.0)}) {
        const auto y = sos_filter(f, x);
        CHECK(testing::max_abs_diff(y, naive_filter(f, x)) < 1e-9 * testing::max_abs(y));
    }
}

TEST_CASE("steady-state tone gain equals the designed magnitude") {
    const SosFilter f = design_chebyshev2(ChebyshevIISpec{});
    for (double hz : {10.0, 60.0, 70.0, 80.0}) {
        const auto y = sos_filter(f, testing::tone(hz, 1.0, 6000, 1000.0));
        CHECK(testing::tone_amplitude(y, hz, 1000.0, 2000, 6000) ==
              doctest::Approx(sos_magnitude(f, hz, 1000.0)).epsilon(2e-3));
    }
}

TEST_CASE("filtfilt is zero phase and squares the magnitude") {
    const SosFilter f = design_chebyshev2(ChebyshevIISpec{});
    const auto x = testing::tone(60.0, 1.0, 8000, 1000.0);
    const auto y = sos_filtfilt(f, x);
    const double g = sos_magnitude(f, 60.0, 1000.0);
    // Central region: pure scaled copy, no delay.
    std::vector<double> expected(x);
    for (double& v : expected) v *= g * g;
    double worst = 0.0;
    for (std::size_t i = 1000; i < 7000; ++i) worst = std::max(worst, std::abs(y[i] - expected[i]));
    CHECK(worst < 1e-3);
}

TEST_CASE("filtfilt is linear") {
    const SosFilter f = design_chebyshev2(highpass_spec());
    const auto a = testing::gaussian_noise(5000, 1);
    const auto b = testing::gaussian_noise(5000, 2);
    const auto fa = sos_filtfilt(f, a);
    const auto fb = sos_filtfilt(f, b);
    const auto fab = sos_filtfilt(f, testing::add(testing::scale(a, 3.0), testing::scale(b, -2.0)));
    const auto expected = testing::add(testing::scale(fa, 3.0), testing::scale(fb, -2.0));
    CHECK(testing::max_abs_diff(fab, expected) < 1e-9 * testing::max_abs(expected));
}

TEST_CASE("filtfilt needs more samples than its padding") {
    const SosFilter f = design_chebyshev2(highpass_spec());
    CHECK_ERROR_CODE(sos_filtfilt(f, std::vector<double>(15, 1.0)), ErrorCode::SignalTooShort);
    CHECK(sos_filtfilt(f, std::vector<double>(16, 0.0)).size() == 16);
}

TEST_CASE("notch removes its centre frequency only") {
    const SosFilter f = design_notch(50.0, 30.0, 1000.0);
    CHECK(sos_magnitude(f, 50.0, 1000.0) < 1e-9);
    CHECK(db(sos_magnitude(f, 45.0, 1000.0)) > -3.0);
    CHECK(std::abs(db(sos_magnitude(f, 6.0, 1000.0))) < 0.01);
    CHECK_ERROR_CODE(design_notch(600.0, 30.0, 1000.0), ErrorCode::InvalidConfig);
}

TEST_CASE("invalid filter specs") {
    ChebyshevIISpec s;
    s.stopband_edge_hz = 60.0;  // below the passband edge for a low-pass
    CHECK_ERROR_CODE(design_chebyshev2(s), ErrorCode::InvalidConfig);
    ChebyshevIISpec t;
    t.passband_edge_hz = 600.0;
    CHECK_ERROR_CODE(design_chebyshev2(t), ErrorCode::InvalidConfig);
}

TEST_CASE("Welch PSD of one segment equals a direct DFT periodogram") {
    const std::size_t n = 2000;
    const auto x = testing::add(testing::gaussian_noise(n, 21), std::vector<double>(n, 3.0));
    WelchOptions opt;  // 2 s window at 1 kHz: exactly one segment
    const Spectrum s = welch_psd(x, 1000.0, opt);
    REQUIRE(s.power.size() == opt.nfft / 2 + 1);

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double wsum = 0.0;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
        wsum += w[i] * w[i];
    }
    for (std::size_t k : {std::size_t{1}, std::size_t{25}, std::size_t{400}, std::size_t{2047}}) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * i) / static_cast<double>(opt.nfft);
            acc += (x[i] - mean) * w[i] * std::polar(1.0, ang);
        }
        const double expected = 2.0 * std::norm(acc) / (1000.0 * wsum);
        CHECK(s.power[k] == doctest::Approx(expected).epsilon(1e-9));
        CHECK(s.freq_hz[k] == doctest::Approx(1000.0 * static_cast<double>(k) / static_cast<double>(opt.nfft)));
    }
}

TEST_CASE("Welch PSD integrates to the signal variance") {
    const auto x = testing::gaussian_noise(20000, 9, 5.0);
    const Spectrum s = welch_psd(x, 1000.0);
    double total = 0.0;
    for (std::size_t k = 0; k < s.power.size(); ++k) total += s.power[k];
    total *= s.freq_hz[1];
    CHECK(total == doctest::Approx(25.0).epsilon(0.05));
}

TEST_CASE("peak interpolation resolves an off-grid tone") {
    const auto x = testing::tone(6.0, 10.0, 20000, 1000.0);
    const Spectrum s = welch_psd(x, 1000.0);
    const auto bin = static_cast<std::size_t>(std::max_element(s.power.begin(), s.power.end()) - s.power.begin());
    CHECK(s.freq_hz[bin] != doctest::Approx(6.0).epsilon(1e-3));  // 6 Hz is between bins
    CHECK(interpolate_peak(s, bin) == doctest::Approx(6.0).epsilon(0.05 / 6.0));
}

TEST_CASE("Welch rejects unusable input") {
    CHECK_ERROR_CODE(welch_psd(std::vector<double>{1.0}, 1000.0), ErrorCode::EmptySignal);
    WelchOptions bad;
    bad.overlap = 1.0;
    CHECK_ERROR_CODE(welch_psd(testing::gaussian_noise(100, 1), 1000.0, bad), ErrorCode::InvalidConfig);
}
