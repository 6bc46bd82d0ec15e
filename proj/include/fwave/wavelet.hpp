#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fwave {

/// How the input is extended to the next multiple of 2^levels before the
/// circular undecimated transform.
enum class Extension { Symmetric, Periodic };

/// Daubechies scaling (low-pass analysis) filter with `vanishing_moments`
/// vanishing moments, normalised to sum sqrt(2). Supported: 2..10.
std::span<const double> daubechies_lowpass(int vanishing_moments);

/// Quadrature-mirror high-pass companion: g[k] = (-1)^k h[L-1-k].
std::vector<double> quadrature_mirror(std::span<const double> lowpass);

struct SwtOptions {
    int levels = 8;
    int vanishing_moments = 6;
    Extension extension = Extension::Symmetric;
};

/// Undecimated wavelet decomposition. details[j-1] holds scale j; every
/// public vector has the input length n. The *_tail vectors keep the
/// coefficients that fall on the extension region so that reconstruction is
/// exact; analyses ignore them.
struct WaveletDecomposition {
    std::vector<std::vector<double>> details;
    std::vector<double> approximation;
    std::size_t n = 0;
    double fs = 0.0;

    int vanishing_moments = 6;
    Extension extension = Extension::Symmetric;
    std::vector<std::vector<double>> detail_tails;
    std::vector<double> approximation_tail;

    int levels() const { return static_cast<int>(details.size()); }
    /// Scale is 1-based, matching the usual C_j notation.
    std::span<const double> detail(int scale) const;
};

/// A trous stationary wavelet transform. Throws EmptySignal for inputs
/// shorter than two samples and InvalidConfig for bad options.
WaveletDecomposition swt_decompose(std::span<const double> signal, const SwtOptions& options = {},
                                   double fs = 0.0);

/// Inverse of swt_decompose. Throws ShapeMismatch when vector lengths are
/// inconsistent with n and the level count.
std::vector<double> swt_reconstruct(const WaveletDecomposition& decomp);

/// Sum of squared detail coefficients at each scale (index 0 = scale 1).
std::vector<double> detail_energies(const WaveletDecomposition& decomp);

/// Fraction of total detail energy (approximation excluded) at `scale`.
/// Throws ZeroEnergy when every detail coefficient is zero.
double relative_wavelet_energy(const WaveletDecomposition& decomp, int scale);

/// All relative energies; a probability vector over the detail scales.
std::vector<double> relative_wavelet_energies(const WaveletDecomposition& decomp);

/// Nominal band [fs/2^(j+1), fs/2^j] of detail scale j.
struct Band {
    double low_hz;
    double high_hz;
};
Band scale_band(int scale, double fs);

}  // namespace fwave
