#include "fwave/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <string>

#include "fwave/error.hpp"

namespace fwave {

namespace {

using cplx = std::complex<double>;

double prewarp(double f_hz, double fs) {
    return 2.0 * fs * std::tan(std::numbers::pi * f_hz / fs);
}

void check_spec(const ChebyshevIISpec& spec) {
    const double nyq = spec.fs / 2.0;
    const bool edges_ok = spec.passband_edge_hz > 0.0 && spec.stopband_edge_hz > 0.0 &&
                          spec.passband_edge_hz < nyq && spec.stopband_edge_hz < nyq;
    const bool ordered = spec.kind == FilterKind::LowPass
                             ? spec.passband_edge_hz < spec.stopband_edge_hz
                             : spec.stopband_edge_hz < spec.passband_edge_hz;
    if (!(spec.fs > 0.0) || !edges_ok || !ordered || !(spec.stopband_atten_db > 0.0) ||
        !(spec.passband_loss_db > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "invalid Chebyshev II specification");
    }
}

cplx bilinear(cplx s, double fs2) { return (fs2 + s) / (fs2 - s); }

bool is_real(cplx z) { return std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z)); }

struct RootSets {
    std::vector<cplx> pairs;  // one representative (imag > 0) per conjugate pair
    std::vector<double> reals;
};

RootSets split_roots(const std::vector<cplx>& roots) {
    RootSets out;
    for (const cplx& r : roots) {
        if (is_real(r)) {
            out.reals.push_back(r.real());
        } else if (r.imag() > 0.0) {
            out.pairs.push_back(r);
        }
    }
    return out;
}

std::array<double, 3> quadratic_from_pair(cplx r) { return {1.0, -2.0 * r.real(), std::norm(r)}; }

std::array<double, 3> quadratic_from_reals(const std::vector<double>& rs) {
    if (rs.empty()) return {1.0, 0.0, 0.0};
    if (rs.size() == 1) return {1.0, -rs[0], 0.0};
    return {1.0, -(rs[0] + rs[1]), rs[0] * rs[1]};
}

// Pairs each pole group with the nearest remaining zero group. Poles closest
// to the unit circle are placed first.
std::vector<Biquad> to_sections(const std::vector<cplx>& zeros, const std::vector<cplx>& poles) {
    RootSets zs = split_roots(zeros);
    RootSets ps = split_roots(poles);
    std::sort(ps.pairs.begin(), ps.pairs.end(),
              [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });

    std::vector<Biquad> sections;
    for (const cplx& p : ps.pairs) {
        Biquad bq;
        bq.a = quadratic_from_pair(p);
        if (!zs.pairs.empty()) {
            auto best = std::min_element(zs.pairs.begin(), zs.pairs.end(), [&](cplx a, cplx b) {
                return std::abs(a - p) < std::abs(b - p);
            });
            bq.b = quadratic_from_pair(*best);
            zs.pairs.erase(best);
        } else {
            std::vector<double> take;
            while (take.size() < 2 && !zs.reals.empty()) {
                take.push_back(zs.reals.back());
                zs.reals.pop_back();
            }
            bq.b = quadratic_from_reals(take);
        }
        sections.push_back(bq);
    }
    while (!ps.reals.empty()) {
        std::vector<double> pole_take;
        while (pole_take.size() < 2 && !ps.reals.empty()) {
            pole_take.push_back(ps.reals.back());
            ps.reals.pop_back();
        }
        std::vector<double> zero_take;
        while (zero_take.size() < pole_take.size() && !zs.reals.empty()) {
            zero_take.push_back(zs.reals.back());
            zs.reals.pop_back();
        }
        Biquad bq;
        bq.a = quadratic_from_reals(pole_take);
        bq.b = quadratic_from_reals(zero_take);
        sections.push_back(bq);
    }
    if (!zs.pairs.empty() || !zs.reals.empty()) {
        throw Error(ErrorCode::InvalidConfig, "filter has more zeros than poles");
    }
    return sections;
}

cplx section_response(const Biquad& bq, cplx zinv) {
    const cplx num = bq.b[0] + zinv * (bq.b[1] + zinv * bq.b[2]);
    const cplx den = bq.a[0] + zinv * (bq.a[1] + zinv * bq.a[2]);
    return num / den;
}

cplx cascade_response(const std::vector<Biquad>& sections, double f_hz, double fs) {
    const cplx zinv = std::polar(1.0, -2.0 * std::numbers::pi * f_hz / fs);
    cplx h = 1.0;
    for (const Biquad& bq : sections) h *= section_response(bq, zinv);
    return h;
}

// Transposed direct form II state that a unit-level constant input would
// leave in each section.
std::vector<std::array<double, 2>> steady_state(const std::vector<Biquad>& sections) {
    std::vector<std::array<double, 2>> zi;
    double level = 1.0;
    for (const Biquad& bq : sections) {
        const double gain = (bq.b[0] + bq.b[1] + bq.b[2]) / (bq.a[0] + bq.a[1] + bq.a[2]);
        const double z2 = level * (bq.b[2] - bq.a[2] * gain);
        const double z1 = level * (bq.b[1] - bq.a[1] * gain) + z2;
        zi.push_back({z1, z2});
        level *= gain;
    }
    return zi;
}

void run_sections(const std::vector<Biquad>& sections, std::vector<std::array<double, 2>> state,
                  std::vector<double>& x) {
    for (std::size_t s = 0; s < sections.size(); ++s) {
        const Biquad& bq = sections[s];
        double z1 = state[s][0];
        double z2 = state[s][1];
        for (double& v : x) {
            const double in = v;
            const double out = bq.b[0] * in + z1;
            z1 = bq.b[1] * in - bq.a[1] * out + z2;
            z2 = bq.b[2] * in - bq.a[2] * out;
            v = out;
        }
    }
}

std::vector<std::array<double, 2>> scaled(const std::vector<std::array<double, 2>>& zi, double x0) {
    auto out = zi;
    for (auto& s : out) {
        s[0] *= x0;
        s[1] *= x0;
    }
    return out;
}

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

int chebyshev2_min_order(const ChebyshevIISpec& spec) {
    check_spec(spec);
    const double wp = prewarp(spec.passband_edge_hz, spec.fs);
    const double ws = prewarp(spec.stopband_edge_hz, spec.fs);
    const double ratio = spec.kind == FilterKind::LowPass ? ws / wp : wp / ws;
    const double sel = std::sqrt((std::pow(10.0, spec.stopband_atten_db / 10.0) - 1.0) /
                                 (std::pow(10.0, spec.passband_loss_db / 10.0) - 1.0));
    const double n = std::acosh(sel) / std::acosh(ratio);
    return std::max(1, static_cast<int>(std::ceil(n - 1e-9)));
}

SosFilter design_chebyshev2(const ChebyshevIISpec& spec) {
    const int order = chebyshev2_min_order(spec);
    const double pi = std::numbers::pi;

    // Analog prototype with the stopband edge at 1 rad/s.
    const double eps = 1.0 / std::sqrt(std::pow(10.0, spec.stopband_atten_db / 10.0) - 1.0);
    const double mu = std::asinh(1.0 / eps) / order;
    std::vector<cplx> proto_zeros;
    std::vector<cplx> proto_poles;
    for (int m = -order + 1; m <= order - 1; m += 2) {
        const double theta = pi * m / (2.0 * order);
        if (m != 0) proto_zeros.push_back(cplx(0.0, 1.0 / std::sin(theta)));
        const cplx cheb1 = -std::exp(cplx(0.0, theta));
        proto_poles.push_back(1.0 / cplx(std::sinh(mu) * cheb1.real(), std::cosh(mu) * cheb1.imag()));
    }

    const double ws = prewarp(spec.stopband_edge_hz, spec.fs);
    std::vector<cplx> zeros;
    std::vector<cplx> poles;
    const std::size_t excess = proto_poles.size() - proto_zeros.size();
    if (spec.kind == FilterKind::LowPass) {
        for (const cplx& z : proto_zeros) zeros.push_back(z * ws);
        for (const cplx& p : proto_poles) poles.push_back(p * ws);
    } else {
        for (const cplx& z : proto_zeros) zeros.push_back(ws / z);
        for (const cplx& p : proto_poles) poles.push_back(ws / p);
        for (std::size_t i = 0; i < excess; ++i) zeros.push_back(0.0);
    }

    const double fs2 = 2.0 * spec.fs;
    std::vector<cplx> dz;
    std::vector<cplx> dp;
    for (const cplx& z : zeros) dz.push_back(bilinear(z, fs2));
    for (const cplx& p : poles) dp.push_back(bilinear(p, fs2));
    if (spec.kind == FilterKind::LowPass) {
        for (std::size_t i = 0; i < excess; ++i) dz.push_back(-1.0);
    }

    SosFilter filter;
    filter.order = order;
    filter.sections = to_sections(dz, dp);

    const double ref_hz = spec.kind == FilterKind::LowPass ? 0.0 : spec.fs / 2.0;
    const double gain = std::abs(cascade_response(filter.sections, ref_hz, spec.fs));
    for (double& c : filter.sections.front().b) c /= gain;
    return filter;
}

SosFilter design_notch(double f0_hz, double q, double fs) {
    if (!(fs > 0.0) || !(f0_hz > 0.0) || !(f0_hz < fs / 2.0) || !(q > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "invalid notch specification");
    }
    const double w0 = 2.0 * std::numbers::pi * f0_hz / fs;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    Biquad bq;
    bq.b = {1.0 / a0, -2.0 * std::cos(w0) / a0, 1.0 / a0};
    bq.a = {1.0, -2.0 * std::cos(w0) / a0, (1.0 - alpha) / a0};
    return SosFilter{{bq}, 2};
}

double sos_magnitude(const SosFilter& filter, double f_hz, double fs) {
    return std::abs(cascade_response(filter.sections, f_hz, fs));
}

std::vector<double> sos_filter(const SosFilter& filter, std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    run_sections(filter.sections, std::vector<std::array<double, 2>>(filter.sections.size(), {0.0, 0.0}), y);
    return y;
}

std::vector<double> sos_filtfilt(const SosFilter& filter, std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t pad = 3 * static_cast<std::size_t>(std::max(filter.order, 1));
    if (n <= pad) {
        throw Error(ErrorCode::SignalTooShort, "need more than " + std::to_string(pad) +
                                                   " samples for zero-phase filtering");
    }

    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    const auto zi = steady_state(filter.sections);
    run_sections(filter.sections, scaled(zi, ext.front()), ext);
    std::reverse(ext.begin(), ext.end());
    run_sections(filter.sections, scaled(zi, ext.front()), ext);
    std::reverse(ext.begin(), ext.end());

    return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
            ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

Spectrum welch_psd(std::span<const double> x, double fs, const WelchOptions& options) {
    if (x.size() < 2) throw Error(ErrorCode::EmptySignal, "PSD needs at least two samples");
    if (!(fs > 0.0) || !(options.window_s > 0.0) || options.overlap < 0.0 || options.overlap >= 1.0) {
        throw Error(ErrorCode::InvalidConfig, "invalid Welch options");
    }
    std::size_t win_len = static_cast<std::size_t>(std::lround(options.window_s * fs));
    win_len = std::clamp<std::size_t>(win_len, 2, x.size());
    std::size_t nfft = std::max<std::size_t>(options.nfft, 2);
    while (nfft < win_len) nfft *= 2;
    const std::size_t hop =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(win_len * (1.0 - options.overlap))));

    std::vector<double> window(win_len);
    double win_power = 0.0;
    for (std::size_t i = 0; i < win_len; ++i) {
        window[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (win_len - 1));
        win_power += window[i] * window[i];
    }

    const std::size_t bins = nfft / 2 + 1;
    std::vector<double> buffer(nfft, 0.0);
    std::vector<std::complex<double>> spectrum(bins);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), buffer.data(),
                                    reinterpret_cast<fftw_complex*>(spectrum.data()), FFTW_ESTIMATE);
    }

    Spectrum out;
    out.power.assign(bins, 0.0);
    std::size_t segments = 0;
    for (std::size_t start = 0; start + win_len <= x.size(); start += hop) {
        double mean = 0.0;
        for (std::size_t i = 0; i < win_len; ++i) mean += x[start + i];
        mean /= static_cast<double>(win_len);
        std::fill(buffer.begin(), buffer.end(), 0.0);
        for (std::size_t i = 0; i < win_len; ++i) buffer[i] = (x[start + i] - mean) * window[i];
        fftw_execute(plan);
        for (std::size_t k = 0; k < bins; ++k) out.power[k] += std::norm(spectrum[k]);
        ++segments;
    }
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    const double scale = 1.0 / (fs * win_power * static_cast<double>(segments));
    out.freq_hz.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        out.power[k] *= scale;
        // one-sided: double everything except DC and Nyquist
        if (k != 0 && !(nfft % 2 == 0 && k == bins - 1)) out.power[k] *= 2.0;
        out.freq_hz[k] = fs * static_cast<double>(k) / static_cast<double>(nfft);
    }
    return out;
}

double interpolate_peak(const Spectrum& spectrum, std::size_t bin) {
    const auto& p = spectrum.power;
    const auto& f = spectrum.freq_hz;
    if (bin == 0 || bin + 1 >= p.size()) return f.at(bin);
    const double l = p[bin - 1];
    const double c = p[bin];
    const double r = p[bin + 1];
    double offset = 0.0;
    if (l > 0.0 && c > 0.0 && r > 0.0) {
        const double ll = std::log(l);
        const double lc = std::log(c);
        const double lr = std::log(r);
        const double denom = ll - 2.0 * lc + lr;
        if (denom < 0.0) offset = 0.5 * (ll - lr) / denom;
    } else {
        const double denom = l - 2.0 * c + r;
        if (denom < 0.0) offset = 0.5 * (l - r) / denom;
    }
    offset = std::clamp(offset, -0.5, 0.5);
    return f[bin] + offset * (f[1] - f[0]);
}

}  // namespace fwave
