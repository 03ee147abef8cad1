#pragma once

#include "vibrato/yin.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>

namespace test_helpers {

// Synthetic pitch contour sampled like a real track: geometric FM about a
// (possibly drifting) center, so depth_cents is exact by construction.
inline vibrato::PitchTrack make_track(double center_hz, double depth_cents,
                                      double rate_hz, double fps,
                                      double duration_s,
                                      double drift_hz_per_s = 0.0,
                                      double phase = 0.0) {
    const auto n = static_cast<Eigen::Index>(std::llround(duration_s * fps));
    vibrato::PitchTrack track;
    track.times.resize(n);
    track.f0.resize(n);
    track.confidence = Eigen::ArrayXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fps;
        track.times[i] = t;
        track.f0[i] = (center_hz + drift_hz_per_s * t) *
                      std::exp2(depth_cents / 1200.0 *
                                std::sin(2.0 * std::numbers::pi * rate_hz * t + phase));
    }
    return track;
}

inline double cents_between(double f_a, double f_b) {
    return 1200.0 * std::log2(f_a / f_b);
}

}  // namespace test_helpers
