#pragma once

#include "vibrato/string_model.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vibrato {

/// Least-squares polynomial fit. Quadratics are additionally reported in
/// vertex form y = a*(x-h)^2 + k; pearson_r is filled for degree 1 only.
struct RegressionResult {
    int degree = 1;
    Eigen::VectorXd coefficients;            ///< ascending powers
    std::optional<VertexQuadratic> vertex;   ///< degree 2 with a != 0
    std::optional<double> pearson_r;
    double r_squared = 0.0;
    int n = 0;

    double evaluate(double x) const;
};

struct SpearmanResult {
    double rho = 0.0;
    double p_value = 1.0;       ///< two-sided
    int n = 0;
    std::string method;         ///< "t-approximation" | "exact-permutation"
};

/// Ordinary least squares of degree 1 or 2 via Householder QR on the
/// Vandermonde matrix. R^2 is scored against the mean-only model; when the
/// data has zero variance and zero residuals, R^2 is defined as 1.
RegressionResult polyfit(const Eigen::Ref<const Eigen::VectorXd>& xs,
                         const Eigen::Ref<const Eigen::VectorXd>& ys,
                         int degree);

/// 1 - SS_res/SS_tot for an externally supplied model; may be negative.
double r_squared_of_model(const Eigen::Ref<const Eigen::VectorXd>& xs,
                          const Eigen::Ref<const Eigen::VectorXd>& ys,
                          const std::function<double(double)>& model);

/// Spearman rank correlation with average-rank ties. The two-sided p-value
/// comes from t = rho*sqrt((n-2)/(1-rho^2)) on n-2 degrees of freedom;
/// exact = true enumerates all rank permutations instead (n <= 9 only).
SpearmanResult spearman(const Eigen::Ref<const Eigen::VectorXd>& xs,
                        const Eigen::Ref<const Eigen::VectorXd>& ys,
                        bool exact = false);

/// Two-sided tail probability of Student's t with nu degrees of freedom,
/// via the regularized incomplete beta function.
double student_t_two_sided_p(double t, double nu);

/// Per-group moments, fit, and rank correlation over labelled rows.
/// Statistics a group is too small for are left empty.
struct GroupStats {
    std::string key;
    int n = 0;
    std::optional<double> y_mean;             ///< n >= 2
    std::optional<double> y_std;              ///< sample std, n-1 denominator
    std::optional<RegressionResult> fit;      ///< n >= degree+1
    std::optional<SpearmanResult> spearman;   ///< n >= 4
    std::vector<std::string> warnings;
};

/// Splits rows by group key and computes per-group statistics; groups too
/// small for a given statistic skip it with a warning record. Output order
/// follows first appearance of each key.
std::vector<GroupStats> group_stats(const std::vector<double>& xs,
                                    const std::vector<double>& ys,
                                    const std::vector<std::string>& groups,
                                    int degree);

}  // namespace vibrato
