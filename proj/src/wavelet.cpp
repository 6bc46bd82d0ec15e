#include "fwave/wavelet.hpp"

#include <array>
#include <cmath>
#include <string>

#include "fwave/error.hpp"

namespace fwave {

namespace {

// Minimum-phase Daubechies scaling filters, computed by spectral
// factorisation at 60-digit precision and rounded to double.
constexpr std::array<double, 4> kDb2 = {
    0.48296291314453414337, 0.83651630373780790558, 0.22414386804201338103,
    -0.12940952255126038117};
constexpr std::array<double, 6> kDb3 = {
    0.332670552950082616, 0.80689150931109257649, 0.4598775021184915701,
    -0.1350110200102545887, -0.085441273882026661693, 0.035226291885709536603};
constexpr std::array<double, 8> kDb4 = {
    0.23037781330889650086, 0.71484657055291564709, 0.63088076792985890788,
    -0.027983769416859854211, -0.18703481171909308408, 0.030841381835560763627,
    0.032883011666885199735, -0.010597401785069032105};
constexpr std::array<double, 10> kDb5 = {
    0.16010239797419291448, 0.60382926979718967054, 0.72430852843777292773,
    0.13842814590132073151, -0.24229488706638203186, -0.032244869584638374648,
    0.077571493840045713523, -0.0062414902127982742742, -0.012580751999081999469,
    0.003335725285473771278};
constexpr std::array<double, 12> kDb6 = {
    0.11154074335010946362, 0.49462389039845308568, 0.75113390802109535068,
    0.31525035170919762909, -0.22626469396543982008, -0.12976686756726193556,
    0.097501605587323049102, 0.027522865530305728626, -0.031582039317486029565,
    0.00055384220116149613925, 0.0047772575109455106396, -0.0010773010853084795649};
constexpr std::array<double, 14> kDb7 = {
    0.07785205408500917902, 0.39653931948191730654, 0.72913209084623511992,
    0.46978228740519312247, -0.14390600392856497541, -0.22403618499387498264,
    0.071309219266830264751, 0.080612609151083071913, -0.03802993693501441358,
    -0.016574541630666880654, 0.012550998556099840613, 0.00042957797292136652113,
    -0.0018016407040474909153, 0.00035371379997452024845};
constexpr std::array<double, 16> kDb8 = {
    0.054415842243104009955, 0.31287159091429997066, 0.67563073629728980681,
    0.58535468365420671277, -0.015829105256349305667, -0.28401554296154692652,
    0.00047248457391328277036, 0.12874742662047845886, -0.01736930100180754617,
    -0.044088253930794751507, 0.013981027917398281649, 0.0087460940474057767164,
    -0.0048703529934515743104, -0.0003917403733769470463, 0.00067544940645056936637,
    -0.00011747678412476953373};
constexpr std::array<double, 18> kDb9 = {
    0.038077947363878346589, 0.24383467461259035373, 0.6048231236901111119,
    0.65728807805130053808, 0.13319738582500757619, -0.29327378327917490881,
    -0.096840783222976460514, 0.14854074933810638014, 0.030725681479333379212,
    -0.067632829061329973676, 0.00025094711483145195759, 0.022361662123679097205,
    -0.0047232047577513972779, -0.0042815036824634298345, 0.0018476468830562264766,
    0.00023038576352319596721, -0.00025196318894271013697, 0.000039347320316271599481};
constexpr std::array<double, 20> kDb10 = {
    0.026670057900555553587, 0.18817680007769148902, 0.52720118893172558648,
    0.68845903945360356574, 0.28117234366057746075, -0.24984642432731537942,
    -0.1959462743773770435, 0.12736934033579326008, 0.09305736460357235116,
    -0.071394147166397087145, -0.029457536821875812858, 0.03321267405934100174,
    0.0036065535669561696554, -0.010733175483330575044, 0.0013953517470529011658,
    0.0019924052951850561172, -0.00068585669495971162656, -0.00011646685512928545095,
    0.000093588670320069591334, -0.000013264202894521244812};

std::size_t padded_length(std::size_t n, int levels) {
    const std::size_t block = std::size_t{1} << levels;
    return ((n + block - 1) / block) * block;
}

std::vector<double> extend(std::span<const double> x, std::size_t m, Extension ext) {
    const std::size_t n = x.size();
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (i < n) {
            out[i] = x[i];
        } else if (ext == Extension::Periodic) {
            out[i] = x[i % n];
        } else {
            // half-point reflection: x[n] = x[n-1], x[n+1] = x[n-2], ...
            const std::size_t r = i % (2 * n);
            out[i] = r < n ? x[r] : x[2 * n - 1 - r];
        }
    }
    return out;
}

// y[i] = sum_k f[k] x[(i - k*step) mod m]
void circular_filter(std::span<const double> x, std::span<const double> f, std::size_t step,
                     std::vector<double>& y) {
    const std::size_t m = x.size();
    y.assign(m, 0.0);
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double c = f[k];
        const std::size_t shift = (k * step) % m;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t src = i >= shift ? i - shift : i + m - shift;
            y[i] += c * x[src];
        }
    }
}

// Adjoint of circular_filter, accumulated into y.
void circular_filter_adjoint_add(std::span<const double> x, std::span<const double> f,
                                 std::size_t step, double scale, std::vector<double>& y) {
    const std::size_t m = x.size();
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double c = scale * f[k];
        const std::size_t shift = (k * step) % m;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t src = i + shift < m ? i + shift : i + shift - m;
            y[i] += c * x[src];
        }
    }
}

void check_options(const SwtOptions& options) {
    if (options.levels < 1 || options.levels > 20) {
        throw Error(ErrorCode::InvalidConfig, "wavelet levels must be in 1..20");
    }
    daubechies_lowpass(options.vanishing_moments);
}

}  // namespace

std::span<const double> daubechies_lowpass(int vanishing_moments) {
    switch (vanishing_moments) {
        case 2: return kDb2;
        case 3: return kDb3;
        case 4: return kDb4;
        case 5: return kDb5;
        case 6: return kDb6;
        case 7: return kDb7;
        case 8: return kDb8;
        case 9: return kDb9;
        case 10: return kDb10;
        default:
            throw Error(ErrorCode::InvalidConfig,
                        "unsupported Daubechies order db" + std::to_string(vanishing_moments));
    }
}

std::vector<double> quadrature_mirror(std::span<const double> lowpass) {
    const std::size_t len = lowpass.size();
    std::vector<double> g(len);
    for (std::size_t k = 0; k < len; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        g[k] = sign * lowpass[len - 1 - k];
    }
    return g;
}

std::span<const double> WaveletDecomposition::detail(int scale) const {
    if (scale < 1 || scale > levels()) {
        throw Error(ErrorCode::InvalidConfig, "scale " + std::to_string(scale) + " out of range");
    }
    return details[static_cast<std::size_t>(scale - 1)];
}

WaveletDecomposition swt_decompose(std::span<const double> signal, const SwtOptions& options,
                                   double fs) {
    if (signal.size() < 2) throw Error(ErrorCode::EmptySignal, "need at least two samples");
    check_options(options);

    const auto h = daubechies_lowpass(options.vanishing_moments);
    const auto g = quadrature_mirror(h);
    const std::size_t n = signal.size();
    const std::size_t m = padded_length(n, options.levels);

    WaveletDecomposition out;
    out.n = n;
    out.fs = fs;
    out.vanishing_moments = options.vanishing_moments;
    out.extension = options.extension;

    std::vector<double> approx = extend(signal, m, options.extension);
    std::vector<double> next_approx;
    std::vector<double> detail;
    for (int level = 1; level <= options.levels; ++level) {
        const std::size_t step = std::size_t{1} << (level - 1);
        circular_filter(approx, g, step, detail);
        circular_filter(approx, h, step, next_approx);
        out.details.emplace_back(detail.begin(), detail.begin() + static_cast<std::ptrdiff_t>(n));
        out.detail_tails.emplace_back(detail.begin() + static_cast<std::ptrdiff_t>(n), detail.end());
        approx.swap(next_approx);
    }
    out.approximation.assign(approx.begin(), approx.begin() + static_cast<std::ptrdiff_t>(n));
    out.approximation_tail.assign(approx.begin() + static_cast<std::ptrdiff_t>(n), approx.end());
    return out;
}

std::vector<double> swt_reconstruct(const WaveletDecomposition& decomp) {
    const int levels = decomp.levels();
    const std::size_t n = decomp.n;
    if (levels < 1 || n < 2) throw Error(ErrorCode::ShapeMismatch, "empty decomposition");
    if (decomp.detail_tails.size() != decomp.details.size()) {
        throw Error(ErrorCode::ShapeMismatch, "detail tail count differs from level count");
    }
    const std::size_t m = padded_length(n, levels);
    const std::size_t tail = m - n;
    const auto check = [&](const std::vector<double>& body, const std::vector<double>& rest,
                           const std::string& what) {
        if (body.size() != n || rest.size() != tail) {
            throw Error(ErrorCode::ShapeMismatch,
                        what + " has length " + std::to_string(body.size()) + "+" +
                            std::to_string(rest.size()) + ", expected " + std::to_string(n) + "+" +
                            std::to_string(tail));
        }
    };
    check(decomp.approximation, decomp.approximation_tail, "approximation");
    for (int j = 0; j < levels; ++j) {
        check(decomp.details[static_cast<std::size_t>(j)], decomp.detail_tails[static_cast<std::size_t>(j)],
              "detail scale " + std::to_string(j + 1));
    }

    const auto h = daubechies_lowpass(decomp.vanishing_moments);
    const auto g = quadrature_mirror(h);
    const auto joined = [](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> v(a);
        v.insert(v.end(), b.begin(), b.end());
        return v;
    };

    std::vector<double> approx = joined(decomp.approximation, decomp.approximation_tail);
    for (int level = levels; level >= 1; --level) {
        const auto idx = static_cast<std::size_t>(level - 1);
        const std::size_t step = std::size_t{1} << (level - 1);
        const std::vector<double> detail = joined(decomp.details[idx], decomp.detail_tails[idx]);
        std::vector<double> prev(m, 0.0);
        circular_filter_adjoint_add(approx, h, step, 0.5, prev);
        circular_filter_adjoint_add(detail, g, step, 0.5, prev);
        approx.swap(prev);
    }
    approx.resize(n);
    return approx;
}

std::vector<double> detail_energies(const WaveletDecomposition& decomp) {
    std::vector<double> energy;
    energy.reserve(decomp.details.size());
    for (const auto& d : decomp.details) {
        double e = 0.0;
        for (double c : d) e += c * c;
        energy.push_back(e);
    }
    return energy;
}

std::vector<double> relative_wavelet_energies(const WaveletDecomposition& decomp) {
    std::vector<double> energy = detail_energies(decomp);
    double total = 0.0;
    for (double e : energy) total += e;
    if (!(total > 0.0)) throw Error(ErrorCode::ZeroEnergy, "all detail coefficients are zero");
    for (double& e : energy) e /= total;
    return energy;
}

double relative_wavelet_energy(const WaveletDecomposition& decomp, int scale) {
    if (scale < 1 || scale > decomp.levels()) {
        throw Error(ErrorCode::InvalidConfig, "scale " + std::to_string(scale) + " out of range");
    }
    return relative_wavelet_energies(decomp)[static_cast<std::size_t>(scale - 1)];
}

Band scale_band(int scale, double fs) {
    return {fs / std::ldexp(1.0, scale + 1), fs / std::ldexp(1.0, scale)};
}

}  // namespace fwave
