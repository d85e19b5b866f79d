// SPDX-License-Identifier: Apache-2.0
//
// Geometric multipath channel for a planar array of movable, rotatable
// antenna elements placed in the x-z plane.

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace mra {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kCarrierHz = 3.0e9;
inline constexpr double kDefaultWavelength = kSpeedOfLight / kCarrierHz;

// Minimum spacing slack (meters) accepted when checking a layout.
inline constexpr double kSpacingTol = 1e-9;

/// One propagation path: complex gain and the two virtual (direction-cosine) angles.
struct PathComponent {
    Complex beta{1.0, 0.0};
    double theta = 0.0;  // cos(elevation), in [-1, 1]
    double phi = 0.0;    // cos(azimuth) * sin(elevation), in [-1, 1]
};

/// Per-antenna positions (meters) and rotation offsets (virtual-angle units).
struct AntennaLayout {
    Vector x;
    Vector z;
    Vector psi_theta;
    Vector psi_phi;

    std::size_t size() const { return static_cast<std::size_t>(x.size()); }

    // Throws std::invalid_argument when the four vectors disagree in length or are empty.
    void check_shape() const;

    // Smallest pairwise distance; +inf for a single antenna.
    double min_spacing() const;

    bool spacing_feasible(double wavelength, double tol = kSpacingTol) const;

    static AntennaLayout zeros(std::size_t n);
};

struct Scenario {
    std::vector<std::vector<PathComponent>> users;  // K lists of L paths
    double wavelength = kDefaultWavelength;
    double power = 1.0;
    double noise_var = 1.0;

    std::size_t num_users() const { return users.size(); }
    std::size_t num_paths() const { return users.empty() ? 0 : users.front().size(); }

    // Throws std::invalid_argument on K = 0, L = 0, ragged path lists or non-positive scalars.
    void validate() const;
};

struct VirtualAngles {
    double theta;
    double phi;
};

VirtualAngles virtual_angles(double elevation, double azimuth);

/// Steering vector exp(j 2pi/lambda (phi x_n + theta z_n)).
CVector array_manifold(const AntennaLayout& layout, double theta, double phi, double wavelength);

/// Cosine element pattern cos(pi a / 2) cos(pi b / 2) on |a|, |b| <= 1, zero outside.
double element_gain(double d_theta, double d_phi);

CVector build_channel(const std::vector<PathComponent>& paths, const AntennaLayout& layout,
                      double wavelength);

/// K x N matrix whose k-th row is h_k^H.
CMatrix build_channel_matrix(const Scenario& scenario, const AntennaLayout& layout);

/// n_x x n_z grid at exactly lambda/2 pitch centered on the origin, all rotations zero.
/// Antenna index is ix * n_z + iz.
AntennaLayout grid_layout(std::size_t n_x, std::size_t n_z, double wavelength);

}  // namespace mra
