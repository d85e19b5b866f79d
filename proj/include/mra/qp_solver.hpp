// SPDX-License-Identifier: Apache-2.0
//
// Primal active-set solver for small convex inequality-constrained QPs:
//
//     minimize    1/2 s^T U s + c^T s
//     subject to  P s <= b
//
// The iteration starts from s = 0 with an empty working set, so s = 0 must be
// feasible (b >= -kQpFeasTol). Phase-1 is not provided.

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace mra {

inline constexpr double kQpFeasTol = 1e-8;
inline constexpr double kQpKktTol = 1e-6;
inline constexpr double kQpMultiplierSlack = -1e-10;

struct QpProblem {
    Eigen::MatrixXd U;  // D x D, symmetric
    Eigen::VectorXd c;  // D
    Eigen::MatrixXd P;  // M x D
    Eigen::VectorXd b;  // M

    Eigen::Index dim() const { return c.size(); }
    Eigen::Index num_constraints() const { return b.size(); }
    double objective(const Eigen::VectorXd& s) const { return 0.5 * s.dot(U * s) + c.dot(s); }
};

enum class QpStatus { optimal, max_iter, infeasible };

struct QpSolution {
    Eigen::VectorXd s;
    std::vector<Eigen::Index> active_set;  // sorted ascending
    Eigen::VectorXd multipliers;           // length M, zero off the active set
    std::size_t iterations = 0;
    QpStatus status = QpStatus::infeasible;
};

/// Returns U + tau I with tau = 0 if U is already positive definite, else the
/// first of 1e-8, 1e-7, ... for which a Cholesky factorization succeeds.
Eigen::MatrixXd regularize_curvature(const Eigen::MatrixXd& U);

QpSolution solve_qp(const QpProblem& problem);

/// max(|U s + c + P^T mu|_inf, max_i |mu_i (P s - b)_i|); zero at an exact KKT point.
double kkt_residual(const QpProblem& problem, const Eigen::VectorXd& s,
                    const Eigen::VectorXd& multipliers);

}  // namespace mra
