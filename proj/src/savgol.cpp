#include "vibrato/savgol.hpp"

#include "vibrato/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <string>

namespace vibrato {

namespace {

// Weights w such that w.dot(y) equals the least-squares polynomial of the
// given degree over (offsets, y) evaluated at offset 0. Offsets are scaled
// to [-1, 1] before forming the Vandermonde matrix; the projection is
// invariant under that scaling, which keeps the QR well conditioned for
// wide windows.
Eigen::VectorXd fit_weights(const Eigen::VectorXd& offsets, int degree) {
    const auto n = offsets.size();
    const double scale = std::max(offsets.cwiseAbs().maxCoeff(), 1.0);

    Eigen::MatrixXd vandermonde(n, degree + 1);
    vandermonde.col(0).setOnes();
    for (int k = 1; k <= degree; ++k) {
        vandermonde.col(k) = vandermonde.col(k - 1).cwiseProduct(offsets / scale);
    }

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(vandermonde);
    Eigen::MatrixXd r = qr.matrixQR()
                            .topRows(degree + 1)
                            .triangularView<Eigen::Upper>();
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(degree + 1);
    e0[0] = 1.0;
    const Eigen::VectorXd s = r.transpose().triangularView<Eigen::Lower>().solve(e0);
    Eigen::MatrixXd thin_q = qr.householderQ() * Eigen::MatrixXd::Identity(n, degree + 1);
    return thin_q * s;
}

}  // namespace

Eigen::ArrayXd savgol_smooth(const Eigen::Ref<const Eigen::ArrayXd>& values,
                             const SmoothingConfig& cfg) {
    if (cfg.window < 1 || cfg.window % 2 == 0) {
        throw DomainError("savgol: window must be a positive odd count");
    }
    if (cfg.polyorder < 0 || cfg.polyorder >= cfg.window) {
        throw DomainError("savgol: need 0 <= polyorder < window");
    }
    const auto n = values.size();
    if (n < 1) throw DomainError("savgol: empty input");

    // Shrink for short inputs: largest odd length <= n that exceeds polyorder.
    int window = cfg.window;
    if (n < window) {
        window = static_cast<int>(n);
        if (window % 2 == 0) --window;
    }
    if (window <= cfg.polyorder) {
        throw DomainError("savgol: polyorder " + std::to_string(cfg.polyorder) +
                          " >= effective window " + std::to_string(window));
    }

    const int half = window / 2;
    Eigen::ArrayXd out(n);

    Eigen::VectorXd interior_offsets(window);
    for (int r = 0; r < window; ++r) interior_offsets[r] = r - half;
    const Eigen::VectorXd interior = fit_weights(interior_offsets, cfg.polyorder);

    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
        const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + half);
        const Eigen::Index count = hi - lo + 1;
        if (count == window) {
            out[i] = interior.dot(values.matrix().segment(lo, window));
        } else {
            // Truncated edge window, re-fit with the degree the points allow.
            const int degree = std::min<int>(cfg.polyorder, static_cast<int>(count) - 1);
            Eigen::VectorXd offsets(count);
            for (Eigen::Index r = 0; r < count; ++r) {
                offsets[r] = static_cast<double>(lo + r - i);
            }
            out[i] = fit_weights(offsets, degree).dot(values.matrix().segment(lo, count));
        }
    }
    return out;
}

}  // namespace vibrato
