// SPDX-License-Identifier: Apache-2.0

#include "mra/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mra {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd regularize_curvature(const MatrixXd& U)
{
    MatrixXd sym = 0.5 * (U + U.transpose());
    Eigen::LLT<MatrixXd> llt(sym);
    if (llt.info() == Eigen::Success)
        return sym;
    const Index n = sym.rows();
    for (double tau = 1e-8; std::isfinite(tau); tau *= 10.0) {
        MatrixXd shifted = sym + tau * MatrixXd::Identity(n, n);
        llt.compute(shifted);
        if (llt.info() == Eigen::Success)
            return shifted;
    }
    throw std::runtime_error("regularize_curvature: matrix cannot be made positive definite");
}

double kkt_residual(const QpProblem& problem, const VectorXd& s, const VectorXd& multipliers)
{
    double res = 0.0;
    VectorXd stationarity = problem.U * s + problem.c;
    if (problem.num_constraints() > 0) {
        stationarity += problem.P.transpose() * multipliers;
        const VectorXd slack = problem.P * s - problem.b;
        for (Index i = 0; i < slack.size(); ++i)
            res = std::max(res, std::abs(multipliers[i] * slack[i]));
    }
    if (stationarity.size() > 0)
        res = std::max(res, stationarity.lpNorm<Eigen::Infinity>());
    return res;
}

namespace {

void check_dimensions(const QpProblem& qp)
{
    const Index d = qp.c.size();
    if (qp.U.rows() != d || qp.U.cols() != d)
        throw std::invalid_argument("solve_qp: U must be D x D");
    if (qp.P.rows() != qp.b.size() || (qp.b.size() > 0 && qp.P.cols() != d))
        throw std::invalid_argument("solve_qp: P must be M x D with M = len(b)");
}

// Equality-constrained step from the current point:
//   minimize 1/2 p^T U p + g^T p  subject to  A p = 0
// by the null-space method, with multipliers from A^T lambda = -(g + U p) in the
// least-squares sense. A rank-deficient working set is tolerated; p is exactly zero
// when the working rows span the whole space, the reduced gradient vanishes, or the
// previous step already reached the minimizer on this working set.
struct EqpStep {
    VectorXd p;
    VectorXd lambda;
};

EqpStep solve_working_set(const MatrixXd& U, const Eigen::LLT<MatrixXd>& u_factor,
                          const MatrixXd& P, const std::vector<Index>& working, const VectorXd& g,
                          bool at_minimizer)
{
    const Index d = g.size();
    const auto w = static_cast<Index>(working.size());
    EqpStep out;
    out.p = VectorXd::Zero(d);
    if (w == 0) {
        if (!at_minimizer)
            out.p = -u_factor.solve(g);
        out.lambda.resize(0);
        return out;
    }
    MatrixXd At(d, w);
    for (Index r = 0; r < w; ++r)
        At.col(r) = P.row(working[static_cast<std::size_t>(r)]).transpose();

    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(At);
    const Index rank = cod.rank();
    if (!at_minimizer && rank < d) {
        const MatrixXd Q = cod.householderQ();
        const MatrixXd Z = Q.rightCols(d - rank);
        const VectorXd reduced_grad = Z.transpose() * g;
        if (reduced_grad.norm() > 1e-13 * std::max(1.0, g.norm())) {
            const MatrixXd reduced_u = Z.transpose() * U * Z;
            out.p = -Z * reduced_u.llt().solve(reduced_grad);
        }
    }
    out.lambda = cod.solve(-(g + U * out.p));
    return out;
}

}  // namespace

QpSolution solve_qp(const QpProblem& problem)
{
    check_dimensions(problem);
    const Index d = problem.dim();
    const Index m = problem.num_constraints();

    QpSolution sol;
    sol.s = VectorXd::Zero(d);
    sol.multipliers = VectorXd::Zero(m);

    for (Index i = 0; i < m; ++i) {
        if (problem.b[i] < -kQpFeasTol) {
            sol.status = QpStatus::infeasible;
            return sol;
        }
    }
    if (d == 0) {
        sol.status = QpStatus::optimal;
        return sol;
    }

    const MatrixXd U = regularize_curvature(problem.U);
    const Eigen::LLT<MatrixXd> u_factor(U);

    std::vector<Index> working;
    std::vector<char> in_working(static_cast<std::size_t>(m), 0);
    const std::size_t max_iter = 100 * static_cast<std::size_t>(d + m);

    VectorXd& s = sol.s;
    bool at_minimizer = false;
    for (std::size_t it = 0; it < max_iter; ++it) {
        sol.iterations = it + 1;
        const VectorXd g = U * s + problem.c;
        const EqpStep step = solve_working_set(U, u_factor, problem.P, working, g, at_minimizer);
        at_minimizer = false;

        if (step.p.isZero(0.0)) {
            // Stationary on the working set: drop the most negative multiplier, if any.
            Index drop = -1;
            double most_negative = kQpMultiplierSlack;
            for (Index r = 0; r < step.lambda.size(); ++r) {
                if (step.lambda[r] < most_negative ||
                    (drop >= 0 && step.lambda[r] == most_negative &&
                     working[static_cast<std::size_t>(r)] < working[static_cast<std::size_t>(drop)])) {
                    most_negative = step.lambda[r];
                    drop = r;
                }
            }
            if (drop < 0) {
                for (Index r = 0; r < step.lambda.size(); ++r)
                    sol.multipliers[working[static_cast<std::size_t>(r)]] =
                        std::max(0.0, step.lambda[r]);
                sol.active_set = working;
                std::sort(sol.active_set.begin(), sol.active_set.end());
                sol.status = QpStatus::optimal;
                return sol;
            }
            in_working[static_cast<std::size_t>(working[static_cast<std::size_t>(drop)])] = 0;
            working.erase(working.begin() + drop);
            continue;
        }

        // Ratio test over constraints outside the working set; lowest index wins ties.
        double alpha = 1.0;
        Index blocking = -1;
        for (Index i = 0; i < m; ++i) {
            if (in_working[static_cast<std::size_t>(i)])
                continue;
            const double ap = problem.P.row(i).dot(step.p);
            if (ap <= 1e-12 * problem.P.row(i).norm() * step.p.norm())
                continue;
            const double slack = std::max(0.0, problem.b[i] - problem.P.row(i).dot(s));
            const double ratio = slack / ap;
            if (ratio < alpha) {
                alpha = ratio;
                blocking = i;
            }
        }
        s += alpha * step.p;
        if (blocking >= 0) {
            working.push_back(blocking);
            in_working[static_cast<std::size_t>(blocking)] = 1;
        } else {
            at_minimizer = true;
        }
    }

    sol.active_set = working;
    std::sort(sol.active_set.begin(), sol.active_set.end());
    sol.status = QpStatus::max_iter;
    return sol;
}

}  // namespace mra
