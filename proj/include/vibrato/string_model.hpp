#pragma once

#include "vibrato/contour.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace vibrato {

/// An open string, identified by its fundamental. Standard cello tuning at
/// A4 = 440: C2 65.41, G2 98.00, D3 146.83, A3 220.00.
struct StringSpec {
    double f_s = 0.0;  ///< open-string fundamental, Hz
    std::string name;
};

/// The six quantities measured per excerpt, plus provenance metadata.
struct VibratoMeasurement {
    double d_cents = 0.0;   ///< mean pitch deviation from trend, cents (half excursion)
    double d_hz = 0.0;      ///< mean pitch deviation from trend, Hz
    double f_c = 0.0;       ///< tonal center, Hz
    double D = 0.0;         ///< physical depth, fraction of string length
    double x_c = 0.0;       ///< physical center, fraction of string length
    double rate_hz = 0.0;   ///< vibrato rate
    int n_cycles = 0;       ///< completed peak-to-peak cycles

    std::string file;
    std::string player;
    std::string corpus;
};

/// Finger position producing tone f_t on a string with open fundamental f_s,
/// as a fraction of string length from the nut: x = 1 - f_s/f_t.
double physical_center(double f_s, double f_t);

/// Physical half-amplitude of the finger oscillation producing an acoustic
/// half-depth of d_hz around tonal center f_c. Positive root of
/// d*D^2 + f_s*D - d*(1-x_c)^2 = 0, evaluated in the cancellation-free form
/// D = 2*d*(1-x_c)^2 / (f_s + sqrt(f_s^2 + 4*d^2*(1-x_c)^2)).
double physical_depth(double d_hz, double f_c, double f_s);

/// Acoustic half-depth in Hz of a finger oscillating x_c ± D:
/// d = f_s * D / ((1-x_c)^2 - D^2). Inverse of physical_depth.
double acoustic_depth(double D, double x_c, double f_s);

/// Acoustic half-depth in cents of the same oscillation,
/// 600 * log2(((1-x_c)+D) / ((1-x_c)-D)); half the peak-to-peak excursion.
double cents_half_depth(double D, double x_c);

/// Vertex-form quadratic y = a*(x-h)^2 + k.
struct VertexQuadratic {
    double a = 0.0;
    double h = 0.0;
    double k = 0.0;

    double operator()(double x) const { return a * (x - h) * (x - h) + k; }
};

/// Predicted pitch variation vs. physical center, with and without
/// compensation of the finger amplitude.
struct ModelCurves {
    Eigen::ArrayXd x;
    Eigen::ArrayXd cents_uncompensated;  ///< constant D
    Eigen::ArrayXd cents_compensated;    ///< D = quad_D(x)
    std::vector<double> crossings;       ///< abscissae where the curves meet
};

/// Evaluates both model curves over x_grid and locates curve crossings by
/// bisection on their difference. f_s is carried for provenance; the cents
/// curves themselves are independent of it.
ModelCurves model_curves(double f_s,
                         const Eigen::Ref<const Eigen::ArrayXd>& x_grid,
                         double const_D, const VertexQuadratic& quad_D);

/// Assembles the six measured quantities from a cycle analysis:
/// d is the mean extremum deviation (Hz and cents), f_c the mean trend value
/// at the extremum times, x_c and D follow from the string physics, and the
/// rate is the reciprocal mean spacing of consecutive peaks.
VibratoMeasurement assemble_measurement(const CycleAnalysis& cycles,
                                        const StringSpec& string);

}  // namespace vibrato
