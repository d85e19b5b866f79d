// SPDX-License-Identifier: Apache-2.0

#include "mra/sqp_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mra/zf_precoding.hpp"

namespace mra {

using Eigen::Index;

std::string_view scheme_name(Scheme scheme)
{
    switch (scheme) {
    case Scheme::FPA: return "FPA";
    case Scheme::MA: return "MA";
    case Scheme::RA: return "RA";
    case Scheme::MRA: return "MRA";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name)
{
    for (auto s : kAllSchemes)
        if (scheme_name(s) == name)
            return s;
    return std::nullopt;
}

std::vector<char> scheme_mask(Scheme scheme, std::size_t num_antennas)
{
    const bool positions = scheme == Scheme::MA || scheme == Scheme::MRA;
    const bool rotations = scheme == Scheme::RA || scheme == Scheme::MRA;
    std::vector<char> mask(4 * num_antennas, 0);
    std::fill_n(mask.begin(), 2 * num_antennas, static_cast<char>(positions));
    std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(2 * num_antennas), 2 * num_antennas,
                static_cast<char>(rotations));
    return mask;
}

OptVariables OptVariables::from_layout(const AntennaLayout& layout, Scheme scheme)
{
    layout.check_shape();
    const auto n = static_cast<Index>(layout.size());
    OptVariables v;
    v.theta.resize(4 * n);
    v.theta << layout.x, layout.z, layout.psi_theta, layout.psi_phi;
    v.active_mask = scheme_mask(scheme, layout.size());
    return v;
}

AntennaLayout OptVariables::to_layout() const
{
    const auto n = static_cast<Index>(num_antennas());
    return {theta.segment(0, n), theta.segment(n, n), theta.segment(2 * n, n),
            theta.segment(3 * n, n)};
}

double Bounds::for_index(Index i, std::size_t num_antennas) const
{
    switch (static_cast<std::size_t>(i) / num_antennas) {
    case 0: return x_max;
    case 1: return z_max;
    case 2: return psi_theta_max;
    default: return psi_phi_max;
    }
}

namespace {

CMatrix channel_from_theta(const Vector& theta, const Scenario& scenario)
{
    const Index n = theta.size() / 4;
    const auto x = theta.segment(0, n);
    const auto z = theta.segment(n, n);
    const auto pt = theta.segment(2 * n, n);
    const auto pp = theta.segment(3 * n, n);
    const double k = 2.0 * kPi / scenario.wavelength;
    const double scale = 1.0 / std::sqrt(static_cast<double>(scenario.num_paths()));

    CMatrix H(static_cast<Index>(scenario.num_users()), n);
    for (Index u = 0; u < H.rows(); ++u) {
        const auto& paths = scenario.users[static_cast<std::size_t>(u)];
        for (Index a = 0; a < n; ++a) {
            Complex acc{0.0, 0.0};
            for (const auto& p : paths) {
                const double g = element_gain(p.theta - pt[a], p.phi - pp[a]);
                if (g != 0.0)
                    acc += p.beta * g * std::polar(1.0, k * (p.phi * x[a] + p.theta * z[a]));
            }
            H(u, a) = std::conj(acc * scale);
        }
    }
    return H;
}

double spacing_violation(const Vector& theta, double wavelength)
{
    const Index n = theta.size() / 4;
    double worst = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            worst = std::max(worst, 0.5 * wavelength - std::hypot(theta[i] - theta[j],
                                                                  theta[n + i] - theta[n + j]));
    return worst;
}

double spacing_penalty_sum(const Vector& theta, double wavelength)
{
    const Index n = theta.size() / 4;
    double total = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            total += std::max(0.0, 0.5 * wavelength - std::hypot(theta[i] - theta[j],
                                                                 theta[n + i] - theta[n + j]));
    return total;
}

}  // namespace

double objective(const Vector& theta, const Scenario& scenario)
{
    if (theta.size() == 0 || theta.size() % 4 != 0)
        throw std::invalid_argument("objective: theta length must be a positive multiple of 4");
    const CMatrix H = channel_from_theta(theta, scenario);
    try {
        return -zf_sum_rate(H, scenario.power, scenario.noise_var);
    } catch (const SingularGram&) {
        return kDegeneratePenalty;
    }
}

Vector gradient(const OptVariables& vars, const Scenario& scenario)
{
    const Index dim = vars.theta.size();
    Vector grad = Vector::Zero(dim);
    Vector probe = vars.theta;
    double center = std::numeric_limits<double>::quiet_NaN();
    for (Index i = 0; i < dim; ++i) {
        if (!vars.active(i))
            continue;
        const double base = vars.theta[i];
        const double h = 1e-6 * std::max(1.0, std::abs(base));
        probe[i] = base + h;
        const double up = objective(probe, scenario);
        probe[i] = base - h;
        const double down = objective(probe, scenario);
        probe[i] = base;

        const bool up_bad = up >= kDegeneratePenalty;
        const bool down_bad = down >= kDegeneratePenalty;
        if (up_bad && down_bad)
            throw NonFiniteGradient("gradient: degenerate channel on both sides of coordinate " +
                                    std::to_string(i));
        if (up_bad || down_bad) {
            if (std::isnan(center))
                center = objective(vars.theta, scenario);
            grad[i] = up_bad ? (center - down) / h : (up - center) / h;
        } else {
            grad[i] = (up - down) / (2.0 * h);
        }
    }
    return grad;
}

SpacingConstraints spacing_constraints(const Vector& theta, double wavelength)
{
    const Index n = theta.size() / 4;
    const Index pairs = n * (n - 1) / 2;
    SpacingConstraints out{Vector(pairs), Matrix::Zero(pairs, theta.size())};
    Index row = 0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j, ++row) {
            const double dx = theta[i] - theta[j];
            const double dz = theta[n + i] - theta[n + j];
            const double d = std::hypot(dx, dz);
            if (d < 1e-12)
                throw CoincidentAntennas("spacing_constraints: antennas " + std::to_string(i) +
                                         " and " + std::to_string(j) + " coincide");
            out.values[row] = 0.5 * wavelength - d;
            out.jacobian(row, i) = -dx / d;
            out.jacobian(row, j) = dx / d;
            out.jacobian(row, n + i) = -dz / d;
            out.jacobian(row, n + j) = dz / d;
        }
    }
    return out;
}

double max_violation(const Vector& theta, const Bounds& bounds, double wavelength)
{
    const auto n = static_cast<std::size_t>(theta.size() / 4);
    double worst = spacing_violation(theta, wavelength);
    for (Index i = 0; i < theta.size(); ++i)
        worst = std::max(worst, std::abs(theta[i]) - bounds.for_index(i, n));
    return worst;
}

QpProblem build_qp_subproblem(const OptVariables& vars, const Vector& grad, const Matrix& U,
                              const Bounds& bounds, double wavelength)
{
    const Index dim = vars.theta.size();
    if (grad.size() != dim || U.rows() != dim || U.cols() != dim ||
        static_cast<Index>(vars.active_mask.size()) != dim)
        throw std::invalid_argument("build_qp_subproblem: dimension mismatch");

    const auto n = vars.num_antennas();
    const SpacingConstraints sc = spacing_constraints(vars.theta, wavelength);
    const Index v = sc.values.size();

    QpProblem qp;
    qp.U = U;
    qp.c = grad;
    qp.P = Matrix::Zero(v + 2 * dim, dim);
    qp.b = Vector::Zero(v + 2 * dim);

    // Spacing: g + J S <= 0.
    qp.P.topRows(v) = sc.jacobian;
    qp.b.head(v) = -sc.values;

    for (Index i = 0; i < dim; ++i) {
        const Index r = v + 2 * i;
        qp.P(r, i) = 1.0;
        qp.P(r + 1, i) = -1.0;
        if (vars.active(i)) {
            const double bound = bounds.for_index(i, n);
            qp.b[r] = bound - vars.theta[i];
            qp.b[r + 1] = bound + vars.theta[i];
        }
    }
    return qp;
}

Matrix dfp_update(const Matrix& U, const Vector& d_theta, const Vector& d_grad)
{
    if (d_theta.size() != U.rows() || d_grad.size() != U.rows() || U.rows() != U.cols())
        throw std::invalid_argument("dfp_update: dimension mismatch");
    const double curvature = d_grad.dot(d_theta);
    if (!(curvature > 1e-10 * d_grad.norm() * d_theta.norm()))
        return U;
    const Vector u_dq = U * d_grad;
    const double dq_u_dq = d_grad.dot(u_dq);
    if (!(dq_u_dq > 0.0))
        return U;
    return U + d_theta * d_theta.transpose() / curvature - u_dq * u_dq.transpose() / dq_u_dq;
}

double merit(const Vector& theta, const Scenario& scenario, double penalty)
{
    return objective(theta, scenario) + penalty * spacing_penalty_sum(theta, scenario.wavelength);
}

LineSearchResult line_search(const std::function<double(const Vector&)>& merit_fn,
                             const Vector& theta, const Vector& direction, double slope,
                             const SqpOptions& opts)
{
    const double base = merit_fn(theta);
    const double descent = std::min(0.0, slope);
    double alpha = 1.0;
    for (int k = 0; k <= opts.max_halvings; ++k, alpha *= 0.5) {
        const double trial = merit_fn(theta + alpha * direction);
        if (trial <= base + opts.armijo_c1 * alpha * descent)
            return {alpha, trial};
    }
    throw StepFailed("line_search: no step in {1, ..., 2^-" + std::to_string(opts.max_halvings) +
                     "} satisfies the Armijo condition");
}

LineSearchResult line_search(const OptVariables& vars, const Vector& direction,
                             const Vector& grad, const Scenario& scenario, const SqpOptions& opts)
{
    const double rho = opts.merit_penalty;
    auto fn = [&](const Vector& t) { return merit(t, scenario, rho); };
    // Directional derivative of the l1 merit along the QP direction.
    const double slope =
        grad.dot(direction) - rho * spacing_penalty_sum(vars.theta, scenario.wavelength);
    return line_search(fn, vars.theta, direction, slope, opts);
}

OptResult optimize(const Scenario& scenario, Scheme scheme, const Bounds& bounds,
                   const AntennaLayout& init, const SqpOptions& opts)
{
    scenario.validate();
    init.check_shape();
    if (bounds.x_max < 0.0 || bounds.z_max < 0.0 || bounds.psi_theta_max < 0.0 ||
        bounds.psi_phi_max < 0.0)
        throw std::invalid_argument("optimize: bounds must be nonnegative");

    OptResult res;
    res.theta_opt = OptVariables::from_layout(init, scheme);
    OptVariables& vars = res.theta_opt;
    const double lambda = scenario.wavelength;
    const double rho = opts.merit_penalty;

    if (max_violation(vars.theta, bounds, lambda) > kSpacingTol)
        throw InfeasibleInit("optimize: initial layout violates spacing or box constraints");

    auto finish = [&](double f) {
        res.sum_rate = f >= kDegeneratePenalty ? 0.0 : std::max(0.0, -f);
        res.max_violation = max_violation(vars.theta, bounds, lambda);
        return res;
    };

    double f = objective(vars, scenario);
    res.merit_history.push_back(f + rho * spacing_penalty_sum(vars.theta, lambda));

    if (std::none_of(vars.active_mask.begin(), vars.active_mask.end(),
                     [](char c) { return c != 0; })) {
        res.converged = true;
        res.stop_reason = "no free variables";
        return finish(f);
    }

    Vector grad;
    try {
        grad = gradient(vars, scenario);
    } catch (const NonFiniteGradient& e) {
        res.stop_reason = e.what();
        return finish(f);
    }

    const Index dim = vars.theta.size();
    Matrix U = Matrix::Identity(dim, dim);
    res.stop_reason = "iteration limit";

    for (std::size_t t = 0; t < opts.max_iterations; ++t) {
        const QpProblem qp = build_qp_subproblem(vars, grad, U, bounds, lambda);
        const QpSolution sol = solve_qp(qp);
        if (sol.status == QpStatus::infeasible) {
            res.stop_reason = "QP subproblem infeasible";
            break;
        }
        Vector step = sol.s;
        for (Index i = 0; i < dim; ++i)
            if (!vars.active(i))
                step[i] = 0.0;
        if (step.norm() < opts.tolerance) {
            // Any accepted step would pass the variable-change test anyway.
            res.converged = true;
            res.stop_reason = "QP direction below tolerance";
            break;
        }

        LineSearchResult ls;
        try {
            ls = line_search(vars, step, grad, scenario, opts);
        } catch (const StepFailed& e) {
            res.stop_reason = e.what();
            break;
        }

        const Vector d_theta = ls.alpha * step;
        vars.theta += d_theta;
        const double f_new = objective(vars, scenario);
        ++res.iterations;
        res.merit_history.push_back(ls.merit);

        const double df = std::abs(f_new - f);
        f = f_new;
        if (d_theta.norm() < opts.tolerance || df < opts.tolerance) {
            res.converged = true;
            res.stop_reason = d_theta.norm() < opts.tolerance ? "step below tolerance"
                                                              : "objective change below tolerance";
            break;
        }

        Vector grad_new;
        try {
            grad_new = gradient(vars, scenario);
        } catch (const NonFiniteGradient& e) {
            res.stop_reason = e.what();
            break;
        }
        U = dfp_update(U, d_theta, grad_new - grad);
        grad = std::move(grad_new);
    }
    return finish(f);
}

}  // namespace mra
