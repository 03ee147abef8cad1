#pragma once

#include "vibrato/audio_buffer.hpp"

#include <Eigen/Core>

#include <utility>

namespace vibrato {

/// Parameters for the YIN fundamental-frequency estimator.
///
/// The search band [f_min, f_max] is deliberately narrow: vibrato excerpts
/// carry one note, so the band is centered on the intended pitch and the
/// estimator never has to disambiguate octaves across the whole instrument
/// range.
struct YinConfig {
    double f_min = 0.0;        ///< lowest searched frequency, Hz
    double f_max = 0.0;        ///< highest searched frequency, Hz
    int frame_length = 0;      ///< analysis frame, samples
    int hop_length = 0;        ///< frame advance, samples
    double threshold = 0.1;    ///< CMNDF absolute threshold, in (0, 1)
};

/// Frequency band spanning center_hint * 2^(±width_cents/1200).
std::pair<double, double> band_from_center(double center_hint_hz,
                                           double width_cents);

/// Default analysis geometry for a given band: frame_length is the next
/// power of two holding four periods of f_min, hop is 256 samples at
/// 44.1 kHz scaled proportionally for other rates.
YinConfig default_yin_config(double sample_rate, double f_min, double f_max);

/// Time-stamped f0 contour. Times are frame centers with uniform spacing
/// hop/sample_rate. Confidence is the CMNDF value at the selected lag
/// (lower = more periodic); it is surfaced, never gated on.
struct PitchTrack {
    Eigen::ArrayXd times;       ///< seconds
    Eigen::ArrayXd f0;          ///< Hz, each within [f_min, f_max]
    Eigen::ArrayXd confidence;  ///< dimensionless

    Eigen::Index size() const { return f0.size(); }
    /// Frames per second; valid for tracks with ≥ 2 frames.
    double frame_rate() const { return 1.0 / (times[1] - times[0]); }
};

/// Runs YIN over the buffer and returns one pitch estimate per frame.
///
/// Per frame: the difference function d(tau) = sum_j (x_j - x_{j+tau})^2 is
/// evaluated over a window spanning one period of the lowest searched pitch,
/// normalized to the cumulative-mean form d'(tau) with d'(0) = 1, and the
/// first lag below threshold is descended to its enclosing local minimum
/// (global minimum over the band when no lag crosses the threshold). The lag
/// is refined by parabolic interpolation of d' and inverted to f0, clamped
/// to the band.
///
/// Throws DomainError when the config is invalid or the buffer is shorter
/// than one frame.
PitchTrack yin_track(const AudioBuffer& buffer, const YinConfig& cfg);

}  // namespace vibrato
