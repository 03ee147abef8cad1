#pragma once

#include <Eigen/Core>

#include <string>

namespace vibrato {

/// Decoded mono sample stream. Samples are dimensionless amplitudes in
/// [-1, 1]; sample_rate is in Hz.
struct AudioBuffer {
    Eigen::ArrayXd samples;
    double sample_rate = 0.0;
    std::string source_path;

    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

/// Returns the samples in [start_s, end_s). Boundary sample indices are
/// round(t * sample_rate); the interval is half-open.
AudioBuffer trim(const AudioBuffer& buffer, double start_s, double end_s);

}  // namespace vibrato
