// SPDX-License-Identifier: Apache-2.0

#include "mra/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "mra/experiment.hpp"
#include "mra/qp_solver.hpp"
#include "mra/sqp_optimizer.hpp"
#include "mra/sweep_io.hpp"
#include "mra/zf_precoding.hpp"

namespace mra {

namespace {

std::string fmt(const char* pattern, double v)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

CMatrix random_channel(std::mt19937_64& rng, Eigen::Index k, Eigen::Index n)
{
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    CMatrix H(k, n);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            H(i, j) = {g(rng), g(rng)};
    return H;
}

CheckResult check_zf(bool interference)
{
    std::mt19937_64 rng(20240101);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const CMatrix H = random_channel(rng, 3, 4);
        const double power = 2.0;
        const PrecodingMatrix F = zf_precoder(H, power);
        if (interference) {
            for (Eigen::Index a = 0; a < H.rows(); ++a)
                for (Eigen::Index b = 0; b < H.rows(); ++b)
                    if (a != b)
                        worst = std::max(worst, std::abs((H.row(a) * F.F.col(b)).value()) /
                                                    (H.row(a).norm() * F.F.col(b).norm()));
        } else {
            const double direct = sum_rate(H, F, 1.0);
            const double closed = zf_sum_rate(H, power, 1.0);
            worst = std::max(worst, std::abs(direct - closed) / std::abs(closed));
        }
    }
    if (interference)
        return {"zf_zero_interference", worst <= 1e-9, fmt("max normalized leakage %.3g", worst)};
    return {"zf_closed_form_equivalence", worst <= 1e-9, fmt("max relative error %.3g", worst)};
}

// Exhaustive active-set enumeration: the feasible KKT point of least objective.
Eigen::VectorXd enumerate_qp(const QpProblem& qp)
{
    const Eigen::Index d = qp.dim();
    const Eigen::Index m = qp.num_constraints();
    Eigen::VectorXd best;
    double best_obj = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<Eigen::Index> act;
        for (Eigen::Index i = 0; i < m; ++i)
            if (mask & (1u << i))
                act.push_back(i);
        const auto a = static_cast<Eigen::Index>(act.size());
        if (a > d)
            continue;
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(d + a, d + a);
        Eigen::VectorXd rhs(d + a);
        K.topLeftCorner(d, d) = qp.U;
        rhs.head(d) = -qp.c;
        for (Eigen::Index r = 0; r < a; ++r) {
            K.block(d + r, 0, 1, d) = qp.P.row(act[static_cast<std::size_t>(r)]);
            K.block(0, d + r, d, 1) = qp.P.row(act[static_cast<std::size_t>(r)]).transpose();
            rhs[d + r] = qp.b[act[static_cast<std::size_t>(r)]];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
        if (!lu.isInvertible())
            continue;
        const Eigen::VectorXd sol = lu.solve(rhs);
        const Eigen::VectorXd s = sol.head(d);
        if (a > 0 && sol.tail(a).minCoeff() < -1e-9)
            continue;
        if (m > 0 && ((qp.P * s - qp.b).array() > 1e-9).any())
            continue;
        const double obj = qp.objective(s);
        if (obj < best_obj) {
            best_obj = obj;
            best = s;
        }
    }
    return best;
}

CheckResult check_qp()
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 4);
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 6);
        QpProblem qp;
        Eigen::MatrixXd A(d, d);
        for (Eigen::Index i = 0; i < d * d; ++i)
            A.data()[i] = g(rng);
        qp.U = A * A.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
        qp.c = Eigen::VectorXd::NullaryExpr(d, [&] { return 3.0 * g(rng); });
        qp.P = Eigen::MatrixXd::NullaryExpr(m, d, [&] { return g(rng); });
        qp.b = Eigen::VectorXd::NullaryExpr(m, [&] { return u(rng); });
        const QpSolution sol = solve_qp(qp);
        const Eigen::VectorXd ref = enumerate_qp(qp);
        if (sol.status != QpStatus::optimal || ref.size() != d)
            return {"qp_enumeration_oracle", false, "solver or oracle failed on instance " +
                                                        std::to_string(t)};
        worst = std::max(worst, (sol.s - ref).lpNorm<Eigen::Infinity>());
    }
    return {"qp_enumeration_oracle", worst <= 1e-6, fmt("max minimizer gap %.3g", worst)};
}

CheckResult check_dfp()
{
    const Eigen::Index n = 6;
    Eigen::VectorXd v(n);
    v << 0.3, -1.2, 0.7, 2.0, -0.4, 0.05;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const double err = (dfp_update(I, v, v) - I).lpNorm<Eigen::Infinity>();
    return {"dfp_identity", err <= 1e-14, fmt("max deviation from I %.3g", err)};
}

CheckResult check_rotation_optimize()
{
    // One antenna, one user, one path off boresight: rotating psi_theta onto the path
    // restores full element gain.
    Scenario sc;
    sc.power = 10.0;
    sc.users = {{PathComponent{{0.8, -0.6}, 0.3, 0.0}}};
    const Bounds bounds = region_bounds(1.0, kPi / 4, sc.wavelength);
    const AntennaLayout init = AntennaLayout::zeros(1);
    const OptResult res = optimize(sc, Scheme::RA, bounds, init);
    const double best = std::log2(1.0 + sc.power);  // |beta| = 1, u = 1
    const double gap = std::abs(res.sum_rate - best);
    const double fpa = optimize(sc, Scheme::FPA, bounds, init).sum_rate;
    return {"rotation_optimize", gap <= 1e-4 && res.sum_rate >= fpa - 1e-9,
            fmt("rate gap to boresight optimum %.3g", gap)};
}

CheckResult check_sweep_determinism()
{
    ExperimentConfig cfg;
    cfg.trials = 2;
    cfg.snr_db_list = {1.0};
    cfg.threads = 1;
    const std::string a = format_sweep_csv(run_sweep(cfg, SweepAxis::snr));
    const std::string b = format_sweep_csv(run_sweep(cfg, SweepAxis::snr));
    return {"sweep_determinism", a == b, a == b ? "identical CSV" : "CSV differs between runs"};
}

}  // namespace

std::vector<CheckResult> run_self_checks()
{
    std::vector<CheckResult> out;
    auto guarded = [&](const char* name, auto&& fn) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("exception: ") + e.what()});
        }
    };
    guarded("zf_closed_form_equivalence", [] { return check_zf(false); });
    guarded("zf_zero_interference", [] { return check_zf(true); });
    guarded("qp_enumeration_oracle", check_qp);
    guarded("dfp_identity", check_dfp);
    guarded("rotation_optimize", check_rotation_optimize);
    guarded("sweep_determinism", check_sweep_determinism);
    return out;
}

int cmd_validate(std::ostream& out)
{
    bool ok = true;
    for (const auto& c : run_self_checks()) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << "  (" << c.detail << ")\n";
        ok = ok && c.passed;
    }
    out << (ok ? "all checks passed\n" : "validation FAILED\n");
    return ok ? kExitOk : kExitValidation;
}

}  // namespace mra
