#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fwave {

struct RPeakList {
    std::vector<std::size_t> indices;  // strictly increasing
    double fs = 0.0;
};

/// Span of one QRST complex, [start, end) around r_index.
struct BeatWindow {
    std::size_t r_index = 0;
    std::size_t start = 0;
    std::size_t end = 0;
};

/// Atrial activity left after QRST cancellation.
struct FWaveSignal {
    std::vector<double> samples;
    double fs = 0.0;
    std::vector<BeatWindow> beat_windows;
    std::string source_id;

    double duration_seconds() const { return static_cast<double>(samples.size()) / fs; }
};

inline constexpr double kRefractorySeconds = 0.2;
inline constexpr double kDefaultPhasorRv = 0.5;

/// Swappable beat detector.
class RPeakDetector {
public:
    virtual ~RPeakDetector() = default;
    virtual RPeakList detect(std::span<const double> signal, double fs) const = 0;
};

/// Phasor-transform detector. The signal is baseline-referenced with a
/// running median and normalised by its 99th-percentile magnitude; each
/// sample becomes the phase of rv + j*x. QRS complexes are the maxima of the
/// local phase variation above an adaptive threshold (0.4 x the rolling 2 s
/// maximum, and several times the median variation), with a 200 ms
/// refractory period. Each detection is moved to the largest deflection
/// within 60 ms.
class PhasorDetector final : public RPeakDetector {
public:
    explicit PhasorDetector(double rv = kDefaultPhasorRv);
    RPeakList detect(std::span<const double> signal, double fs) const override;

private:
    double rv_;
};

/// Throws NoBeatsDetected when fewer than five beats are found and
/// SignalTooShort below five seconds.
RPeakList detect_r_peaks(std::span<const double> signal, double fs, double rv = kDefaultPhasorRv);

/// Nominal window [r - 0.30 s, r + 0.45 s), clipped at the midpoint between
/// neighbouring peaks and at the signal bounds.
std::vector<BeatWindow> make_beat_windows(const RPeakList& peaks, std::size_t signal_len, double fs);

/// Per-beat principal-component template subtraction. Each beat is matched
/// against the `m_similar` beats with the highest zero-lag normalised
/// cross-correlation; the first principal component of that group (beat
/// included, segments mean-centred) is fitted to the beat by least squares
/// and subtracted inside the beat window. Samples outside all windows are
/// copied unchanged. Throws TooFewBeats for fewer than two peaks.
FWaveSignal cancel_qrst(std::span<const double> signal, double fs, const RPeakList& peaks,
                        std::size_t m_similar = 10);

}  // namespace fwave
