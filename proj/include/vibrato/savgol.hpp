#pragma once

#include <Eigen/Core>

namespace vibrato {

/// Savitzky-Golay smoothing parameters. window must be odd and larger than
/// polyorder; inputs shorter than window shrink it to the largest odd length
/// that still exceeds polyorder.
struct SmoothingConfig {
    int window = 101;
    int polyorder = 3;
};

/// Savitzky-Golay filter: each output sample is the center value of a
/// least-squares polynomial of degree polyorder fit over the surrounding
/// window. Edge samples are re-fit on the truncated one-sided window, with
/// the degree clamped to the available point count.
Eigen::ArrayXd savgol_smooth(const Eigen::Ref<const Eigen::ArrayXd>& values,
                             const SmoothingConfig& cfg);

}  // namespace vibrato
