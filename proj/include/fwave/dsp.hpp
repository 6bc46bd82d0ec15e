#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace fwave {

/// One biquad, a[0] == 1.
struct Biquad {
    std::array<double, 3> b{1.0, 0.0, 0.0};
    std::array<double, 3> a{1.0, 0.0, 0.0};
};

/// Cascade of second-order sections plus the design order it came from.
struct SosFilter {
    std::vector<Biquad> sections;
    int order = 0;
};

enum class FilterKind { LowPass, HighPass };

struct ChebyshevIISpec {
    FilterKind kind = FilterKind::LowPass;
    double passband_edge_hz = 70.0;
    double stopband_edge_hz = 90.0;
    double stopband_atten_db = 40.0;
    /// Largest loss allowed at the passband edge for a single pass.
    double passband_loss_db = 1.0;
    double fs = 1000.0;
};

/// Smallest order meeting the spec (bilinear prewarped analog estimate).
int chebyshev2_min_order(const ChebyshevIISpec& spec);

/// Chebyshev type II design via the analog prototype and the bilinear
/// transform, returned as second-order sections with unit passband gain.
SosFilter design_chebyshev2(const ChebyshevIISpec& spec);

/// Second-order notch (RBJ form) at `f0_hz` with quality factor `q`.
SosFilter design_notch(double f0_hz, double q, double fs);

/// Complex response of the cascade at `f_hz`, magnitude only.
double sos_magnitude(const SosFilter& filter, double f_hz, double fs);

/// Causal filtering from rest.
std::vector<double> sos_filter(const SosFilter& filter, std::span<const double> x);

/// Zero-phase forward/backward filtering with odd reflection padding of
/// 3*order samples and steady-state initial conditions. Throws
/// SignalTooShort when n <= 3*order.
std::vector<double> sos_filtfilt(const SosFilter& filter, std::span<const double> x);

struct WelchOptions {
    double window_s = 2.0;
    double overlap = 0.5;
    std::size_t nfft = 4096;
};

struct Spectrum {
    std::vector<double> freq_hz;
    std::vector<double> power;  // one-sided PSD, uV^2/Hz
};

/// Welch averaged periodogram with a Hamming window and per-segment mean
/// removal. Signals shorter than one window use a single full-length segment.
Spectrum welch_psd(std::span<const double> x, double fs, const WelchOptions& options = {});

/// Refine the peak at `bin` by fitting a parabola through the log power of
/// its neighbours. Returns the frequency of the vertex.
double interpolate_peak(const Spectrum& spectrum, std::size_t bin);

}  // namespace fwave
