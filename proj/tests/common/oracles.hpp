#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include "gsr/random.hpp"
#include "gsr/selection.hpp"
#include "gsr/svm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace gsr_oracle {

/// Two-class training problem with labels +-1.
struct Problem {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
};

inline Problem blobs(std::uint64_t seed) {
    // centres (+-2, +-2), radius <= 0.5: every point has |x + y| >= 3, margin well above 1
    std::mt19937_64 rng(seed);
    Problem p;
    for (int side : {1, -1}) {
        for (int i = 0; i < 20; ++i) {
            const double r = 0.5 * std::sqrt(gsr::uniform01(rng));
            const double t = 2.0 * 3.141592653589793 * gsr::uniform01(rng);
            p.rows.push_back({2.0 * side + r * std::cos(t), 2.0 * side + r * std::sin(t)});
            p.labels.push_back(side);
        }
    }
    return p;
}

inline Problem xor_problem() {
    return {{{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {1, 1, -1, -1}};
}

/// Population covariance of two equal-length columns, two plain passes.
inline double naive_covariance(const std::vector<double> &x, const std::vector<double> &y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += (x[i] - mx) * (y[i] - my);
    }
    return acc / static_cast<double>(x.size());
}

inline double min_eigenvalue(const gsr::CovarianceMatrix &m) {
    Eigen::MatrixXd a(m.dim, m.dim);
    for (std::size_t i = 0; i < m.dim; ++i) {
        for (std::size_t j = 0; j < m.dim; ++j) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.at(i, j);
        }
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

/// Mean |rho| over distinct pairs of the given 1-based indices.
inline double mean_abs_rho(const gsr::CovarianceMatrix &rho, const std::vector<std::size_t> &indices) {
    double acc = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < indices.size(); ++a) {
        for (std::size_t b = a + 1; b < indices.size(); ++b) {
            acc += std::abs(rho.at(indices[a] - 1, indices[b] - 1));
            ++pairs;
        }
    }
    return acc / static_cast<double>(pairs);
}

/// sum alpha - 1/2 sum_ij alpha_i alpha_j y_i y_j K(x_i, x_j)
inline double dual_objective(const Problem &p, const std::vector<double> &alpha, const gsr::KernelSpec &k) {
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        lin += alpha[i];
        for (std::size_t j = 0; j < alpha.size(); ++j) {
            quad += alpha[i] * alpha[j] * p.labels[i] * p.labels[j] * gsr::kernel_eval(k, p.rows[i], p.rows[j]);
        }
    }
    return lin - 0.5 * quad;
}

// Exhaustive active-set search: every point is at 0, at C, or free; on each
// face solve the stationarity system with the equality multiplier and keep
// the best feasible stationary point.
inline double qp_oracle(const Problem &p, double c, const gsr::KernelSpec &k) {
    const std::size_t n = p.rows.size();
    Eigen::MatrixXd q(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            q(i, j) = p.labels[i] * p.labels[j] * gsr::kernel_eval(k, p.rows[i], p.rows[j]);
        }
    }
    std::size_t faces = 1;
    for (std::size_t i = 0; i < n; ++i) faces *= 3;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t code = 0; code < faces; ++code) {
        std::vector<int> state(n);
        std::size_t rest = code;
        for (std::size_t i = 0; i < n; ++i, rest /= 3) state[i] = static_cast<int>(rest % 3);
        std::vector<std::size_t> free;
        std::vector<double> alpha(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (state[i] == 1) alpha[i] = c;
            if (state[i] == 2) free.push_back(i);
        }
        double fixed_balance = 0.0;
        for (std::size_t i = 0; i < n; ++i) fixed_balance += alpha[i] * p.labels[i];
        if (!free.empty()) {
            const auto m = static_cast<Eigen::Index>(free.size());
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m + 1);
            Eigen::VectorXd rhs(m + 1);
            for (Eigen::Index r = 0; r < m; ++r) {
                const std::size_t i = free[static_cast<std::size_t>(r)];
                double fixed = 0.0;
                for (std::size_t j = 0; j < n; ++j) fixed += q(i, j) * alpha[j];
                for (Eigen::Index s = 0; s < m; ++s) a(r, s) = q(i, free[static_cast<std::size_t>(s)]);
                a(r, m) = p.labels[i];
                a(m, r) = p.labels[i];
                rhs(r) = 1.0 - fixed;
            }
            rhs(m) = -fixed_balance;
            const Eigen::VectorXd sol = a.completeOrthogonalDecomposition().solve(rhs);
            if ((a * sol - rhs).norm() > 1e-9) continue;
            bool feasible = true;
            for (Eigen::Index r = 0; r < m; ++r) {
                const double v = sol(r);
                if (v < -1e-12 || v > c + 1e-12) feasible = false;
                alpha[free[static_cast<std::size_t>(r)]] = v;
            }
            if (!feasible) continue;
        } else if (std::abs(fixed_balance) > 1e-12) {
            continue;
        }
        best = std::max(best, dual_objective(p, alpha, k));
    }
    return best;
}

/// Largest KKT violation of (alpha, f) with y_i f(x_i) recomputed from the
/// multipliers: alpha = 0 needs yf >= 1, free needs yf = 1, alpha = C needs yf <= 1.
inline double kkt_violation(const Problem &p, const std::vector<double> &alpha, double bias, double c,
                            const gsr::KernelSpec &k) {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        double f = bias;
        for (std::size_t j = 0; j < p.rows.size(); ++j) {
            f += alpha[j] * p.labels[j] * gsr::kernel_eval(k, p.rows[j], p.rows[i]);
        }
        const double yf = p.labels[i] * f;
        if (alpha[i] <= 0.0) {
            worst = std::max(worst, 1.0 - yf);
        } else if (alpha[i] < c) {
            worst = std::max(worst, std::abs(yf - 1.0));
        } else {
            worst = std::max(worst, yf - 1.0);
        }
    }
    return worst;
}

}  // namespace gsr_oracle
