#pragma once

#include "vibrato/savgol.hpp"
#include "vibrato/yin.hpp"

#include <Eigen/Core>

#include <vector>

namespace vibrato {

/// Peak/trough detection parameters. The rate band is used to derive the
/// minimum spacing between same-type extrema (1/max_rate_hz seconds) and to
/// cap the effective smoothing window so the vibrato band itself is not
/// attenuated. Prominence is measured in cents.
struct ExtremaConfig {
    double min_rate_hz = 3.0;
    double max_rate_hz = 10.0;
    double min_prominence_cents = 3.0;
};

/// One detected extremum of the smoothed contour. time_s and freq_hz are
/// refined by a three-point parabola around the winning frame so cycle
/// timing is not quantized to the hop.
struct Extremum {
    Eigen::Index frame = 0;
    double time_s = 0.0;
    double freq_hz = 0.0;
    bool is_peak = false;
};

struct TrendNode {
    double time_s = 0.0;
    double freq_hz = 0.0;
};

/// Smoothed contour, alternating extrema, midpoint trend line, and
/// per-extremum deviations from it.
struct CycleAnalysis {
    Eigen::ArrayXd smoothed_f0;
    std::vector<Eigen::Index> peak_indices;
    std::vector<Eigen::Index> trough_indices;
    std::vector<Extremum> extrema;       ///< merged, time-ordered, alternating
    std::vector<TrendNode> trend;        ///< strictly increasing node times
    Eigen::ArrayXd deviations_hz;        ///< per extremum, |f - trend(t)|
    Eigen::ArrayXd deviations_cents;     ///< per extremum, |1200*log2(f/trend(t))|
};

/// Local maxima and minima with scipy-style distance and prominence gating,
/// merged into one alternating sequence (of two same-type neighbours the
/// more extreme survives). Throws RejectionError when fewer than 2 peaks or
/// 2 troughs remain.
std::pair<std::vector<Extremum>, std::vector<Extremum>> find_extrema(
    const Eigen::Ref<const Eigen::ArrayXd>& times,
    const Eigen::Ref<const Eigen::ArrayXd>& values_hz,
    const ExtremaConfig& cfg);

/// Midpoints of consecutive extremum pairs, connected by straight lines.
std::vector<TrendNode> build_trend(const std::vector<Extremum>& extrema);

/// Trend value at time t: linear interpolation between nodes, held flat
/// before the first and after the last node.
double trend_at(const std::vector<TrendNode>& trend, double t);

/// Full contour analysis: smooth, detect extrema, build the trend line and
/// measure each extremum's deviation from it. The smoothing window is
/// min(smoothing.window, frames spanning 1/(2*max_rate_hz) seconds), so
/// smoothing.window acts as an upper bound.
CycleAnalysis measure_cycles(const PitchTrack& track,
                             const SmoothingConfig& smoothing,
                             const ExtremaConfig& extrema_cfg);

}  // namespace vibrato
