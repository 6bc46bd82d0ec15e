#pragma once

#include <span>
#include <vector>

#include "fwave/ingest.hpp"

namespace fwave {

enum class PowerlineMode { SwtShrinkage, Notch };

struct PreprocessConfig {
    double powerline_hz = 50.0;
    double hp_cutoff_hz = 0.5;
    double lp_cutoff_hz = 70.0;
    double stopband_atten_db = 40.0;
    PowerlineMode powerline_mode = PowerlineMode::SwtShrinkage;
};

/// Throws InvalidConfig unless 0 < hp < lp < fs/2 and 0 < powerline < fs/2.
void validate(const PreprocessConfig& cfg, double fs);

/// Detail scales that the shrinkage step thresholds for a given powerline
/// frequency: the scale whose nominal band holds it plus the finer neighbour
/// when the tone sits in the upper part of that band.
std::vector<int> powerline_scales(double powerline_hz, double fs);

/// Powerline interference suppression. Needs at least one second of signal.
std::vector<double> remove_powerline(std::span<const double> signal, double fs,
                                     const PreprocessConfig& cfg);

/// Zero-phase Chebyshev II high-pass (stopband edge at half the cutoff)
/// followed by removal of the residual mean. Needs at least four seconds.
std::vector<double> remove_baseline(std::span<const double> signal, double fs,
                                    const PreprocessConfig& cfg);

/// Zero-phase Chebyshev II low-pass with a 20 Hz transition band above the
/// cutoff. Needs at least four seconds.
std::vector<double> lowpass_smooth(std::span<const double> signal, double fs,
                                   const PreprocessConfig& cfg);

/// remove_powerline -> remove_baseline -> lowpass_smooth on a record of at
/// least five seconds.
std::vector<double> preprocess(const EcgRecord& record, const PreprocessConfig& cfg);

}  // namespace fwave
