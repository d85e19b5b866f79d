// SPDX-License-Identifier: Apache-2.0
//
// Sequential quadratic programming over antenna positions and rotations.
//
// The decision vector is Theta = [x(0..N-1); z(0..N-1); psi_theta(0..N-1); psi_phi(0..N-1)].
// Each iteration solves a convex QP built from a DFP curvature approximation, the
// finite-difference gradient of the negative ZF sum rate, the linearized lambda/2
// spacing constraints and the exact box constraints, then backtracks along the QP
// direction on an l1 exact-penalty merit function.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mra/channel_model.hpp"
#include "mra/qp_solver.hpp"

namespace mra {

enum class Scheme { FPA, MA, RA, MRA };

inline constexpr Scheme kAllSchemes[] = {Scheme::FPA, Scheme::MA, Scheme::RA, Scheme::MRA};

std::string_view scheme_name(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

// Objective value reported for configurations whose Gram matrix is singular.
inline constexpr double kDegeneratePenalty = 1e9;

class NonFiniteGradient : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class CoincidentAntennas : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class InfeasibleInit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class StepFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OptVariables {
    Vector theta;                  // length 4N
    std::vector<char> active_mask; // length 4N, nonzero = free

    std::size_t num_antennas() const { return static_cast<std::size_t>(theta.size()) / 4; }
    bool active(Eigen::Index i) const { return active_mask[static_cast<std::size_t>(i)] != 0; }

    static OptVariables from_layout(const AntennaLayout& layout, Scheme scheme);
    AntennaLayout to_layout() const;
};

/// Free-variable mask for a scheme: FPA none, MA positions, RA rotations, MRA all.
std::vector<char> scheme_mask(Scheme scheme, std::size_t num_antennas);

struct Bounds {
    double x_max = 0.0;
    double z_max = 0.0;
    double psi_theta_max = 0.0;
    double psi_phi_max = 0.0;

    /// Bound on |Theta_i| for the block that coordinate i belongs to.
    double for_index(Eigen::Index i, std::size_t num_antennas) const;
};

struct SqpOptions {
    std::size_t max_iterations = 100;  // T
    double tolerance = 1e-6;           // epsilon for both stopping tests
    double merit_penalty = 100.0;      // rho
    double armijo_c1 = 1e-4;
    int max_halvings = 30;             // smallest trial step 2^-30
};

struct OptResult {
    OptVariables theta_opt;
    double sum_rate = 0.0;  // bits/s/Hz, 0 for a degenerate final configuration
    std::size_t iterations = 0;
    bool converged = false;
    double max_violation = 0.0;
    std::vector<double> merit_history;  // merit at the start and after each accepted step
    std::string stop_reason;
};

/// Negative ZF sum rate of the induced channel, or kDegeneratePenalty.
double objective(const Vector& theta, const Scenario& scenario);
inline double objective(const OptVariables& vars, const Scenario& scenario)
{
    return objective(vars.theta, scenario);
}

/// Central differences with h_i = 1e-6 max(1, |theta_i|); zero on masked coordinates.
Vector gradient(const OptVariables& vars, const Scenario& scenario);

struct SpacingConstraints {
    Vector values;    // g_l = lambda/2 - d_ij, pairs (i, j) with i < j in lexicographic order
    Matrix jacobian;  // V x 4N
};

SpacingConstraints spacing_constraints(const Vector& theta, double wavelength);

/// Worst violation of spacing and box constraints (0 when feasible).
double max_violation(const Vector& theta, const Bounds& bounds, double wavelength);

/// Rows: V linearized spacing constraints, then two rows per coordinate
/// (box pair when free, pinning pair when masked).
QpProblem build_qp_subproblem(const OptVariables& vars, const Vector& grad, const Matrix& U,
                              const Bounds& bounds, double wavelength);

/// DFP curvature update; returns U unchanged when the curvature condition fails.
Matrix dfp_update(const Matrix& U, const Vector& d_theta, const Vector& d_grad);

/// f(Theta) + rho * sum_l max(0, g_l(Theta)).
double merit(const Vector& theta, const Scenario& scenario, double penalty);

struct LineSearchResult {
    double alpha = 1.0;
    double merit = 0.0;
};

/// Backtracking over alpha in {1, 1/2, ..., 2^-max_halvings} with the Armijo test
/// merit(theta + alpha S) <= merit(theta) + c1 alpha min(0, slope). Throws StepFailed.
LineSearchResult line_search(const std::function<double(const Vector&)>& merit_fn,
                             const Vector& theta, const Vector& direction, double slope,
                             const SqpOptions& opts = {});

LineSearchResult line_search(const OptVariables& vars, const Vector& direction,
                             const Vector& grad, const Scenario& scenario,
                             const SqpOptions& opts = {});

OptResult optimize(const Scenario& scenario, Scheme scheme, const Bounds& bounds,
                   const AntennaLayout& init, const SqpOptions& opts = {});

}  // namespace mra
