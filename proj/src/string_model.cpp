#include "vibrato/string_model.hpp"

#include "vibrato/errors.hpp"

#include <cmath>
#include <string>

namespace vibrato {

double physical_center(double f_s, double f_t) {
    if (!(f_s > 0.0)) throw DomainError("physical_center: f_s must be positive");
    if (f_t < f_s) {
        throw DomainError("physical_center: tone " + std::to_string(f_t) +
                          " Hz below open string " + std::to_string(f_s) + " Hz");
    }
    return 1.0 - f_s / f_t;
}

double physical_depth(double d_hz, double f_c, double f_s) {
    if (d_hz < 0.0) throw DomainError("physical_depth: negative deviation");
    if (!(f_s > 0.0) || f_c < f_s) {
        throw DomainError("physical_depth: need 0 < f_s <= f_c");
    }
    if (f_c - d_hz <= 0.0) {
        throw DomainError("physical_depth: deviation " + std::to_string(d_hz) +
                          " Hz exceeds tonal center " + std::to_string(f_c) + " Hz");
    }
    const double rest = 1.0 - physical_center(f_s, f_c);  // = f_s / f_c
    // Positive root of d*D^2 + f_s*D - d*rest^2 = 0, rationalized so the
    // d -> 0 limit d*rest^2/f_s falls out without cancellation.
    const double root = std::sqrt(f_s * f_s + 4.0 * d_hz * d_hz * rest * rest);
    return 2.0 * d_hz * rest * rest / (f_s + root);
}

double acoustic_depth(double D, double x_c, double f_s) {
    if (!(f_s > 0.0)) throw DomainError("acoustic_depth: f_s must be positive");
    if (!(x_c >= 0.0) || !(x_c < 1.0)) {
        throw DomainError("acoustic_depth: x_c must lie in [0, 1)");
    }
    const double rest = 1.0 - x_c;
    if (D < 0.0 || D >= rest) {
        throw DomainError("acoustic_depth: depth " + std::to_string(D) +
                          " reaches past the bridge (1 - x_c = " +
                          std::to_string(rest) + ")");
    }
    return f_s * D / (rest * rest - D * D);
}

double cents_half_depth(double D, double x_c) {
    if (!(x_c >= 0.0) || !(x_c < 1.0)) {
        throw DomainError("cents_half_depth: x_c must lie in [0, 1)");
    }
    const double rest = 1.0 - x_c;
    if (D < 0.0 || D >= rest) {
        throw DomainError("cents_half_depth: depth " + std::to_string(D) +
                          " reaches past the bridge");
    }
    return 600.0 * std::log2((rest + D) / (rest - D));
}

ModelCurves model_curves(double f_s,
                         const Eigen::Ref<const Eigen::ArrayXd>& x_grid,
                         double const_D, const VertexQuadratic& quad_D) {
    if (!(f_s > 0.0)) throw DomainError("model_curves: f_s must be positive");
    if (x_grid.size() < 2) throw DomainError("model_curves: need >= 2 grid points");

    ModelCurves out;
    out.x = x_grid;
    out.cents_uncompensated.resize(x_grid.size());
    out.cents_compensated.resize(x_grid.size());
    for (Eigen::Index i = 0; i < x_grid.size(); ++i) {
        out.cents_uncompensated[i] = cents_half_depth(const_D, x_grid[i]);
        out.cents_compensated[i] = cents_half_depth(quad_D(x_grid[i]), x_grid[i]);
    }

    const auto difference = [&](double x) {
        return cents_half_depth(quad_D(x), x) - cents_half_depth(const_D, x);
    };
    // Only strict sign changes count; identical curves report no crossing.
    for (Eigen::Index i = 0; i + 1 < x_grid.size(); ++i) {
        const double fa = out.cents_compensated[i] - out.cents_uncompensated[i];
        const double fb = out.cents_compensated[i + 1] - out.cents_uncompensated[i + 1];
        if (!(fa * fb < 0.0)) continue;
        double lo = x_grid[i];
        double hi = x_grid[i + 1];
        double flo = fa;
        for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const double fmid = difference(mid);
            if (fmid == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((flo < 0.0) == (fmid < 0.0)) {
                lo = mid;
                flo = fmid;
            } else {
                hi = mid;
            }
        }
        out.crossings.push_back(0.5 * (lo + hi));
    }
    return out;
}

VibratoMeasurement assemble_measurement(const CycleAnalysis& cycles,
                                        const StringSpec& string) {
    if (!(string.f_s > 0.0)) {
        throw DomainError("assemble_measurement: string frequency must be positive");
    }
    std::vector<const Extremum*> peaks;
    for (const Extremum& e : cycles.extrema) {
        if (e.is_peak) peaks.push_back(&e);
    }
    if (peaks.size() < 2 || cycles.deviations_hz.size() == 0) {
        throw RejectionError("no-vibrato",
                             "assemble_measurement: need at least 2 peaks");
    }

    VibratoMeasurement m;
    m.d_hz = cycles.deviations_hz.mean();
    m.d_cents = cycles.deviations_cents.mean();

    double trend_sum = 0.0;
    for (const Extremum& e : cycles.extrema) {
        trend_sum += trend_at(cycles.trend, e.time_s);
    }
    m.f_c = trend_sum / static_cast<double>(cycles.extrema.size());
    if (m.f_c < string.f_s) {
        throw DomainError("assemble_measurement: tonal center " +
                          std::to_string(m.f_c) + " Hz below open string " +
                          std::to_string(string.f_s) +
                          " Hz; wrong string assignment?");
    }

    m.x_c = physical_center(string.f_s, m.f_c);
    m.D = physical_depth(m.d_hz, m.f_c, string.f_s);
    m.n_cycles = static_cast<int>(peaks.size()) - 1;
    const double spread = peaks.back()->time_s - peaks.front()->time_s;
    m.rate_hz = static_cast<double>(m.n_cycles) / spread;
    return m;
}

}  // namespace vibrato
