// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero if
// any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "mra/config.hpp"
#include "mra/experiment.hpp"
#include "mra/qp_solver.hpp"
#include "mra/sqp_optimizer.hpp"
#include "mra/sweep_io.hpp"
#include "mra/zf_precoding.hpp"
#include "oracles.hpp"

using namespace mra;
namespace fs = std::filesystem;

namespace {

constexpr double lam = kDefaultWavelength;

struct Outcome {
    bool passed = true;
    std::string detail;

    void fail(const std::string& why)
    {
        if (passed)
            detail = why;
        passed = false;
    }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

int failures = 0;

void criterion(const std::string& name, double time_limit_s, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (time_limit_s > 0 && secs >= time_limit_s)
        out.fail(fmt("runtime %.2f s exceeds %.0f s", secs, time_limit_s));
    if (!out.passed)
        ++failures;
    std::printf("%s  %-26s %7.2fs  %s\n", out.passed ? "PASS" : "FAIL", name.c_str(), secs,
                out.detail.c_str());
    std::fflush(stdout);
}

Outcome zf_equivalence()
{
    Outcome o;
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const CMatrix H = oracle::random_channel(rng, 3, 4);
        const double power = std::pow(10.0, (t % 17 - 4) / 10.0);
        const auto F = zf_precoder(H, power);
        double pipeline = 0.0;
        for (Eigen::Index k = 0; k < 3; ++k)
            pipeline += std::log2(1.0 + oracle::sinr(H, F.F, 1.0, k));
        const double rel = std::abs(zf_sum_rate(H, power, 1.0) - pipeline) / std::abs(pipeline);
        worst = std::max(worst, rel);
    }
    if (worst > 1e-9)
        o.fail(fmt("worst relative gap %.3g", worst));
    else
        o.detail = fmt("worst relative gap %.3g over 100 channels", worst);
    return o;
}

Outcome zero_interference()
{
    Outcome o;
    std::mt19937_64 rng(101);  // same instances as the equivalence check
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const CMatrix H = oracle::random_channel(rng, 3, 4);
        const double power = std::pow(10.0, (t % 17 - 4) / 10.0);
        const auto F = zf_precoder(H, power);
        for (Eigen::Index i = 0; i < 3; ++i)
            for (Eigen::Index k = 0; k < 3; ++k) {
                if (i == k)
                    continue;
                Complex acc{0.0, 0.0};
                for (Eigen::Index n = 0; n < 4; ++n)
                    acc += H(i, n) * F.F(n, k);
                worst = std::max(worst, std::abs(acc) / (H.row(i).norm() * F.F.col(k).norm()));
            }
    }
    if (worst > 1e-9)
        o.fail(fmt("worst normalized leakage %.3g", worst));
    else
        o.detail = fmt("worst normalized leakage %.3g", worst);
    return o;
}

Outcome qp_oracle()
{
    Outcome o;
    std::mt19937_64 rng(202);
    double worst_s = 0.0, worst_f = 0.0;
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index d = 1 + t % 4;
        const Eigen::Index m = 1 + t % 6;
        const auto qp = oracle::random_qp(rng, d, m);
        const auto sol = solve_qp(qp);
        const auto ref = oracle::enumerate_qp(qp);
        if (!ref.found || sol.status != QpStatus::optimal) {
            o.fail("problem " + std::to_string(t) + " not solved");
            continue;
        }
        worst_s = std::max(worst_s, (sol.s - ref.s).lpNorm<Eigen::Infinity>());
        worst_f = std::max(worst_f, std::abs(qp.objective(sol.s) - ref.objective));
    }
    if (worst_s > 1e-6 || worst_f > 1e-6)
        o.fail(fmt("minimizer gap %.3g, objective gap %.3g", worst_s, worst_f));
    else if (o.passed)
        o.detail = fmt("minimizer gap %.3g, objective gap %.3g", worst_s, worst_f);
    return o;
}

Outcome dfp_identity()
{
    Outcome o;
    const Matrix I = Matrix::Identity(8, 8);
    std::mt19937_64 rng(303);
    std::normal_distribution<double> g(0.0, 1.0);
    const Vector v = Vector::NullaryExpr(8, [&] { return g(rng); });
    const double id_err = (dfp_update(I, v, v) - I).lpNorm<Eigen::Infinity>();
    if (id_err > 8 * std::numeric_limits<double>::epsilon())
        o.fail(fmt("identity case deviates by %.3g", id_err));

    double worst = 0.0;
    int checked = 0;
    while (checked < 100) {
        const Matrix A = Matrix::NullaryExpr(8, 8, [&] { return g(rng); });
        const Matrix U = A * A.transpose() + Matrix::Identity(8, 8);
        const Vector dt = Vector::NullaryExpr(8, [&] { return g(rng); });
        const Vector dq = Vector::NullaryExpr(8, [&] { return g(rng); });
        if (dq.dot(dt) <= 1e-10 * dq.norm() * dt.norm())
            continue;
        const Matrix ref = oracle::dfp(U, dt, dq);
        worst = std::max(worst, (dfp_update(U, dt, dq) - ref).lpNorm<Eigen::Infinity>() /
                                    std::max(1.0, ref.lpNorm<Eigen::Infinity>()));
        ++checked;
    }
    if (worst > 1e-12)
        o.fail(fmt("random updates deviate by %.3g", worst));
    else if (o.passed)
        o.detail = fmt("identity error %.3g, random update error %.3g", id_err, worst);
    return o;
}

Outcome gradient_check()
{
    Outcome o;
    ExperimentConfig cfg;
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> jitter(-0.2 * lam, 0.2 * lam);
    std::uniform_real_distribution<double> rot(-kPi / 4, kPi / 4);
    double worst = 0.0;
    int coords = 0;
    int points = 0;
    while (points < 20) {
        const auto sc = generate_scenario(rng, cfg, 1.0);
        auto layout = grid_layout(2, 2, lam);
        layout.x *= 2.0;
        layout.z *= 2.0;
        for (Eigen::Index i = 0; i < 4; ++i) {
            layout.x[i] += jitter(rng);
            layout.z[i] += jitter(rng);
            layout.psi_theta[i] = rot(rng);
            layout.psi_phi[i] = rot(rng);
        }
        const auto v = OptVariables::from_layout(layout, Scheme::MRA);
        // The rate has no gradient where some user's channel vanishes and ZF is undefined.
        if (objective(v, sc) >= kDegeneratePenalty)
            continue;
        ++points;
        const Vector g = gradient(v, sc);
        const Vector ref = oracle::five_point_difference(v, sc, 1e-4);
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            if (std::abs(ref[i]) <= 1e-6)
                continue;
            ++coords;
            worst = std::max(worst, std::abs(g[i] - ref[i]) / std::abs(ref[i]));
        }
    }
    if (worst > 1e-3)
        o.fail(fmt("worst relative gap %.3g", worst));
    else
        o.detail = fmt("worst relative gap %.3g over %.0f coordinates", worst, coords);
    return o;
}

Outcome optimizer_contract()
{
    Outcome o;
    ExperimentConfig cfg;
    const auto init = grid_layout(2, 2, lam);
    const Bounds bounds = region_bounds(4.0, kPi / 4, lam);
    double worst_violation = 0.0, worst_merit_rise = 0.0, worst_gap = 0.0;
    for (std::size_t t = 0; t < 50; ++t) {
        std::mt19937_64 rng(trial_seed(505, t));
        const auto sc = generate_scenario(rng, cfg, 1.0);
        double fpa = 0.0;
        for (auto scheme : kAllSchemes) {
            const auto res = optimize(sc, scheme, bounds, init);
            worst_violation = std::max(worst_violation, res.max_violation);
            for (std::size_t i = 1; i < res.merit_history.size(); ++i)
                worst_merit_rise =
                    std::max(worst_merit_rise, res.merit_history[i] - res.merit_history[i - 1]);
            if (scheme == Scheme::FPA)
                fpa = res.sum_rate;
            if (scheme == Scheme::MRA)
                worst_gap = std::max(worst_gap, fpa - res.sum_rate);
        }
    }
    if (worst_violation > 1e-6)
        o.fail(fmt("constraint violation %.3g", worst_violation));
    if (worst_merit_rise > 1e-12)
        o.fail(fmt("merit increased by %.3g", worst_merit_rise));
    if (worst_gap > 1e-9)
        o.fail(fmt("MRA below FPA by %.3g", worst_gap));
    if (o.passed)
        o.detail = fmt("max violation %.3g, max merit rise %.3g, max FPA-MRA %.3g", worst_violation,
                       worst_merit_rise, worst_gap);
    return o;
}

ExperimentConfig reference_config()
{
    ExperimentConfig cfg;
    cfg.trials = 200;
    cfg.seed = 2024;
    return cfg;
}

Outcome scheme_ordering()
{
    Outcome o;
    auto cfg = reference_config();
    cfg.snr_db_list = {1.0};
    const auto res = run_sweep(cfg, SweepAxis::snr);
    struct Pair {
        Scheme a, b;
    };
    const Pair pairs[] = {{Scheme::MRA, Scheme::MA},
                          {Scheme::MRA, Scheme::RA},
                          {Scheme::MA, Scheme::FPA},
                          {Scheme::RA, Scheme::FPA}};
    std::string summary;
    for (const auto& p : pairs) {
        const auto d = paired_difference(res, p.a, p.b, 1.0);
        const std::string label =
            std::string(scheme_name(p.a)) + "-" + std::string(scheme_name(p.b));
        if (d.count < 200)
            o.fail(label + ": only " + std::to_string(d.count) + " paired trials");
        if (!(d.mean > 2.0 * d.std_error))
            o.fail(label + fmt(": margin %.4g is not above 2 x SE %.4g", d.mean, d.std_error));
        summary += label + fmt(" %.3f (%.1f SE)  ", d.mean, d.mean / d.std_error);
    }
    if (o.passed)
        o.detail = summary;
    return o;
}

Outcome snr_monotonicity()
{
    Outcome o;
    const auto cfg = reference_config();
    const auto res = run_sweep(cfg, SweepAxis::snr);
    const std::size_t n_snr = cfg.snr_db_list.size();
    const std::size_t trials = cfg.trials;

    // Per-trial FPA rows occupy the first n_snr * trials entries.
    for (std::size_t s = 1; s < n_snr; ++s)
        for (std::size_t t = 0; t < trials; ++t) {
            const auto& lo = res.rows[(s - 1) * trials + t];
            const auto& hi = res.rows[s * trials + t];
            if (!(hi.sum_rate > lo.sum_rate)) {
                o.fail("FPA trial " + std::to_string(t) + fmt(" not increasing at %.0f dB", hi.axis_value));
                return o;
            }
        }

    const auto agg = aggregate(res);
    std::string summary;
    for (std::size_t sch = 0; sch < 4; ++sch) {
        for (std::size_t s = 1; s < n_snr; ++s) {
            const auto& lo = agg[sch * n_snr + s - 1];
            const auto& hi = agg[sch * n_snr + s];
            if (!(hi.mean > lo.mean))
                o.fail(std::string(scheme_name(lo.scheme)) +
                       fmt(" mean drops from %.4g to %.4g at %.0f dB", lo.mean, hi.mean, hi.axis_value));
        }
        summary += std::string(scheme_name(agg[sch * n_snr].scheme)) +
                   fmt(" %.2f->%.2f  ", agg[sch * n_snr].mean, agg[sch * n_snr + n_snr - 1].mean);
    }
    if (o.passed)
        o.detail = "per-trial FPA strict; means " + summary;
    return o;
}

Outcome axis_irrelevance()
{
    Outcome o;
    auto cfg = reference_config();
    cfg.trials = 10;

    auto check = [&](SweepAxis axis, Scheme scheme) {
        const auto res = run_sweep(cfg, axis);
        const std::size_t n = cfg.axis_values(axis).size();
        const std::size_t base = static_cast<std::size_t>(scheme) * n * cfg.trials;
        for (std::size_t v = 1; v < n; ++v)
            for (std::size_t t = 0; t < cfg.trials; ++t) {
                const auto& a = res.rows[base + t];
                const auto& b = res.rows[base + v * cfg.trials + t];
                if (a.sum_rate != b.sum_rate || a.iterations != b.iterations)
                    o.fail(std::string(scheme_name(scheme)) + " differs across " +
                           std::string(axis_name(axis)));
            }
    };
    check(SweepAxis::psi_max, Scheme::FPA);
    check(SweepAxis::psi_max, Scheme::MA);
    check(SweepAxis::r, Scheme::FPA);
    check(SweepAxis::r, Scheme::RA);
    if (o.passed)
        o.detail = "FPA/MA fixed over psi_max, FPA/RA fixed over r (10 trials per value)";
    return o;
}

Outcome rotation_oracle()
{
    Outcome o;
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> ang(0.0, 1.0);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    const double psi_max = kPi / 4;
    const double power = std::pow(10.0, 0.1);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        Scenario sc;
        sc.power = power;
        const PathComponent p{{g(rng), g(rng)}, ang(rng), 0.0};
        sc.users = {{p}};
        const auto res =
            optimize(sc, Scheme::RA, region_bounds(1.0, psi_max, lam), AntennaLayout::zeros(1));
        const double grid = oracle::grid_search_psi_theta(p, psi_max, power, 1.0, 2001);
        worst = std::max(worst, std::abs(res.sum_rate - grid));
    }
    if (worst > 1e-4)
        o.fail(fmt("worst gap %.3g bits/s/Hz", worst));
    else
        o.detail = fmt("worst gap %.3g bits/s/Hz over 20 cases", worst);
    return o;
}

Outcome determinism()
{
    Outcome o;
    const auto dir = fs::temp_directory_path() / "mra_acceptance_determinism";
    fs::remove_all(dir);
    auto cfg = parse_config("trials = 5\nseed = 77\naxes = snr, psi_max\n");
    cfg.output_path = dir;

    auto read_all = [&] {
        std::string all;
        for (auto axis : cfg.axes) {
            std::ifstream in(sweep_csv_path(dir, axis), std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            all += ss.str();
        }
        return all;
    };
    std::ostringstream sink;
    if (cmd_sweep(cfg, sink, sink) != kExitOk) {
        o.fail("first sweep failed");
        return o;
    }
    const std::string first = read_all();
    if (cmd_sweep(cfg, sink, sink) != kExitOk) {
        o.fail("second sweep failed");
        return o;
    }
    const std::string second = read_all();
    fs::remove_all(dir);
    if (first.empty() || first != second)
        o.fail("CSV output differs between runs");
    else
        o.detail = std::to_string(first.size()) + " bytes identical across two runs";
    return o;
}

}  // namespace

int main()
{
    criterion("zf_closed_form", 1.0, zf_equivalence);
    criterion("zero_interference", 0.0, zero_interference);
    criterion("qp_oracle", 1.0, qp_oracle);
    criterion("dfp_identity", 0.0, dfp_identity);
    criterion("gradient_check", 0.0, gradient_check);
    criterion("optimizer_contract", 120.0, optimizer_contract);
    criterion("scheme_ordering", 600.0, scheme_ordering);
    criterion("snr_monotonicity", 0.0, snr_monotonicity);
    criterion("axis_irrelevance", 0.0, axis_irrelevance);
    criterion("rotation_oracle_1d", 0.0, rotation_oracle);
    criterion("sweep_determinism", 0.0, determinism);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
