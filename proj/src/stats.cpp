#include "vibrato/stats.hpp"

#include "vibrato/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace vibrato {

namespace {

// Lentz's continued fraction for the regularized incomplete beta function.
double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-16;
    constexpr double fpmin = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * beta_cf(a, b, x) / a;
    }
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const Eigen::VectorXd xc = x.array() - x.mean();
    const Eigen::VectorXd yc = y.array() - y.mean();
    const double denom = std::sqrt(xc.squaredNorm() * yc.squaredNorm());
    if (denom == 0.0) {
        throw DomainError("pearson: zero variance input");
    }
    return std::clamp(xc.dot(yc) / denom, -1.0, 1.0);
}

// 1-based ranks with average-rank tie handling.
Eigen::VectorXd rank_vector(const Eigen::VectorXd& v) {
    const auto n = v.size();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return v[a] < v[b]; });
    Eigen::VectorXd ranks(n);
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (Eigen::Index k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double student_t_two_sided_p(double t, double nu) {
    if (!(nu > 0.0)) throw DomainError("student_t: degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    return reg_inc_beta(0.5 * nu, 0.5, nu / (nu + t * t));
}

double RegressionResult::evaluate(double x) const {
    double acc = 0.0;
    for (Eigen::Index k = coefficients.size() - 1; k >= 0; --k) {
        acc = acc * x + coefficients[k];
    }
    return acc;
}

RegressionResult polyfit(const Eigen::Ref<const Eigen::VectorXd>& xs,
                         const Eigen::Ref<const Eigen::VectorXd>& ys,
                         int degree) {
    if (degree != 1 && degree != 2) {
        throw DomainError("polyfit: degree must be 1 or 2");
    }
    const auto n = xs.size();
    if (ys.size() != n) throw DomainError("polyfit: size mismatch");
    if (n <= degree) throw DomainError("polyfit: underdetermined system");
    if ((xs.array() == xs[0]).all()) throw DomainError("polyfit: degenerate x");

    Eigen::MatrixXd design(n, degree + 1);
    design.col(0).setOnes();
    for (int k = 1; k <= degree; ++k) {
        design.col(k) = design.col(k - 1).cwiseProduct(xs);
    }
    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(ys);

    RegressionResult result;
    result.degree = degree;
    result.coefficients = beta;
    result.n = static_cast<int>(n);

    const double ss_res = (ys - design * beta).squaredNorm();
    const double ss_tot = (ys.array() - ys.mean()).square().sum();
    result.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    if (degree == 1) {
        const Eigen::VectorXd yc = ys.array() - ys.mean();
        if (yc.squaredNorm() > 0.0) {
            result.pearson_r = pearson(xs, ys);
        }
    } else if (beta[2] != 0.0) {
        VertexQuadratic v;
        v.a = beta[2];
        v.h = -beta[1] / (2.0 * beta[2]);
        v.k = beta[0] - beta[1] * beta[1] / (4.0 * beta[2]);
        result.vertex = v;
    }
    return result;
}

double r_squared_of_model(const Eigen::Ref<const Eigen::VectorXd>& xs,
                          const Eigen::Ref<const Eigen::VectorXd>& ys,
                          const std::function<double(double)>& model) {
    const auto n = xs.size();
    if (ys.size() != n) throw DomainError("r_squared_of_model: size mismatch");
    if (n < 2) throw DomainError("r_squared_of_model: need n >= 2");
    double ss_res = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = ys[i] - model(xs[i]);
        ss_res += r * r;
    }
    const double ss_tot = (ys.array() - ys.mean()).square().sum();
    if (ss_tot == 0.0) {
        if (ss_res == 0.0) return 1.0;
        throw DomainError("r_squared_of_model: zero total variance with nonzero residuals");
    }
    return 1.0 - ss_res / ss_tot;
}

SpearmanResult spearman(const Eigen::Ref<const Eigen::VectorXd>& xs,
                        const Eigen::Ref<const Eigen::VectorXd>& ys,
                        bool exact) {
    const auto n = xs.size();
    if (ys.size() != n) throw DomainError("spearman: size mismatch");
    if (n < 4) throw DomainError("spearman: need n >= 4");
    if (!xs.allFinite() || !ys.allFinite()) {
        throw DomainError("spearman: missing or non-finite values");
    }

    const Eigen::VectorXd rx = rank_vector(xs);
    const Eigen::VectorXd ry = rank_vector(ys);

    SpearmanResult result;
    result.n = static_cast<int>(n);
    try {
        result.rho = pearson(rx, ry);
    } catch (const DomainError&) {
        throw DomainError("spearman: all-tied input, rho undefined");
    }

    if (exact) {
        if (n > 9) {
            throw DomainError("spearman: exact permutation limited to n <= 9");
        }
        result.method = "exact-permutation";
        std::vector<Eigen::Index> perm(n);
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        const double target = std::abs(result.rho) - 1e-12;
        std::uint64_t hits = 0;
        std::uint64_t total = 0;
        do {
            Eigen::VectorXd shuffled(n);
            for (Eigen::Index i = 0; i < n; ++i) shuffled[i] = ry[perm[i]];
            if (std::abs(pearson(rx, shuffled)) >= target) ++hits;
            ++total;
        } while (std::next_permutation(perm.begin(), perm.end()));
        result.p_value = static_cast<double>(hits) / static_cast<double>(total);
    } else {
        result.method = "t-approximation";
        const double rho2 = result.rho * result.rho;
        const double dof = static_cast<double>(n - 2);
        const double t = rho2 >= 1.0
                             ? std::numeric_limits<double>::infinity()
                             : result.rho * std::sqrt(dof / (1.0 - rho2));
        result.p_value = student_t_two_sided_p(t, dof);
    }
    result.p_value = std::clamp(result.p_value, std::numeric_limits<double>::min(), 1.0);
    return result;
}

std::vector<GroupStats> group_stats(const std::vector<double>& xs,
                                    const std::vector<double>& ys,
                                    const std::vector<std::string>& groups,
                                    int degree) {
    if (xs.size() != ys.size() || xs.size() != groups.size()) {
        throw DomainError("group_stats: size mismatch");
    }

    std::vector<std::string> key_order;
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        auto [it, inserted] = members.try_emplace(groups[i]);
        if (inserted) key_order.push_back(groups[i]);
        it->second.push_back(i);
    }

    std::vector<GroupStats> out;
    out.reserve(key_order.size());
    for (const std::string& key : key_order) {
        const auto& idx = members[key];
        GroupStats g;
        g.key = key;
        g.n = static_cast<int>(idx.size());

        Eigen::VectorXd gx(g.n);
        Eigen::VectorXd gy(g.n);
        for (int i = 0; i < g.n; ++i) {
            gx[i] = xs[idx[static_cast<std::size_t>(i)]];
            gy[i] = ys[idx[static_cast<std::size_t>(i)]];
        }

        if (g.n >= 2) {
            g.y_mean = gy.mean();
            g.y_std = std::sqrt((gy.array() - gy.mean()).square().sum() /
                                static_cast<double>(g.n - 1));
        } else {
            g.warnings.push_back("group '" + key + "' skipped: needs n >= 2");
        }

        if (g.n >= degree + 1) {
            try {
                g.fit = polyfit(gx, gy, degree);
            } catch (const DomainError& e) {
                g.warnings.push_back("group '" + key + "' fit skipped: " + e.what());
            }
        } else if (g.n >= 2) {
            g.warnings.push_back("group '" + key + "' fit skipped: needs n >= " +
                                 std::to_string(degree + 1));
        }

        if (g.n >= 4) {
            try {
                g.spearman = spearman(gx, gy);
            } catch (const DomainError& e) {
                g.warnings.push_back("group '" + key + "' spearman skipped: " + e.what());
            }
        }
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace vibrato
