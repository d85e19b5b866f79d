// SPDX-License-Identifier: Apache-2.0

#include "mra/channel_model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mra {

void AntennaLayout::check_shape() const
{
    const auto n = x.size();
    if (n < 1)
        throw std::invalid_argument("AntennaLayout: at least one antenna required");
    if (z.size() != n || psi_theta.size() != n || psi_phi.size() != n)
        throw std::invalid_argument("AntennaLayout: x, z, psi_theta, psi_phi lengths differ");
}

double AntennaLayout::min_spacing() const
{
    double best = std::numeric_limits<double>::infinity();
    const auto n = x.size();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            best = std::min(best, std::hypot(x[i] - x[j], z[i] - z[j]));
    return best;
}

bool AntennaLayout::spacing_feasible(double wavelength, double tol) const
{
    return min_spacing() >= 0.5 * wavelength - tol;
}

AntennaLayout AntennaLayout::zeros(std::size_t n)
{
    const auto m = static_cast<Eigen::Index>(n);
    return {Vector::Zero(m), Vector::Zero(m), Vector::Zero(m), Vector::Zero(m)};
}

void Scenario::validate() const
{
    if (users.empty())
        throw std::invalid_argument("Scenario: no users");
    const auto paths = users.front().size();
    if (paths == 0)
        throw std::invalid_argument("Scenario: users need at least one path");
    for (const auto& u : users)
        if (u.size() != paths)
            throw std::invalid_argument("Scenario: all users must have the same number of paths");
    if (!(wavelength > 0.0) || !(power > 0.0) || !(noise_var > 0.0))
        throw std::invalid_argument("Scenario: wavelength, power and noise_var must be positive");
}

VirtualAngles virtual_angles(double elevation, double azimuth)
{
    return {std::cos(elevation), std::cos(azimuth) * std::sin(elevation)};
}

CVector array_manifold(const AntennaLayout& layout, double theta, double phi, double wavelength)
{
    if (!(wavelength > 0.0))
        throw std::invalid_argument("array_manifold: wavelength must be positive");
    const double k = 2.0 * kPi / wavelength;
    CVector a(layout.x.size());
    for (Eigen::Index n = 0; n < a.size(); ++n)
        a[n] = std::polar(1.0, k * (phi * layout.x[n] + theta * layout.z[n]));
    return a;
}

double element_gain(double d_theta, double d_phi)
{
    if (std::abs(d_theta) > 1.0 || std::abs(d_phi) > 1.0)
        return 0.0;
    // Clamp tiny negatives from cos(pi/2) rounding.
    const double g = std::cos(0.5 * kPi * d_theta) * std::cos(0.5 * kPi * d_phi);
    return g < 0.0 ? 0.0 : g;
}

CVector build_channel(const std::vector<PathComponent>& paths, const AntennaLayout& layout,
                      double wavelength)
{
    if (paths.empty())
        throw std::invalid_argument("build_channel: empty path list");
    layout.check_shape();
    if (!(wavelength > 0.0))
        throw std::invalid_argument("build_channel: wavelength must be positive");

    const auto n_ant = layout.x.size();
    const double k = 2.0 * kPi / wavelength;
    CVector h = CVector::Zero(n_ant);
    for (const auto& p : paths) {
        for (Eigen::Index n = 0; n < n_ant; ++n) {
            const double u = element_gain(p.theta - layout.psi_theta[n], p.phi - layout.psi_phi[n]);
            if (u == 0.0)
                continue;
            h[n] += p.beta * u * std::polar(1.0, k * (p.phi * layout.x[n] + p.theta * layout.z[n]));
        }
    }
    return h / std::sqrt(static_cast<double>(paths.size()));
}

CMatrix build_channel_matrix(const Scenario& scenario, const AntennaLayout& layout)
{
    scenario.validate();
    const auto k_users = static_cast<Eigen::Index>(scenario.num_users());
    CMatrix H(k_users, layout.x.size());
    for (Eigen::Index k = 0; k < k_users; ++k)
        H.row(k) = build_channel(scenario.users[static_cast<std::size_t>(k)], layout,
                                 scenario.wavelength)
                       .adjoint();
    return H;
}

AntennaLayout grid_layout(std::size_t n_x, std::size_t n_z, double wavelength)
{
    if (n_x == 0 || n_z == 0)
        throw std::invalid_argument("grid_layout: grid factors must be positive");
    const double pitch = 0.5 * wavelength;
    auto layout = AntennaLayout::zeros(n_x * n_z);
    const double cx = 0.5 * static_cast<double>(n_x - 1);
    const double cz = 0.5 * static_cast<double>(n_z - 1);
    for (std::size_t ix = 0; ix < n_x; ++ix) {
        for (std::size_t iz = 0; iz < n_z; ++iz) {
            const auto n = static_cast<Eigen::Index>(ix * n_z + iz);
            layout.x[n] = (static_cast<double>(ix) - cx) * pitch;
            layout.z[n] = (static_cast<double>(iz) - cz) * pitch;
        }
    }
    return layout;
}

}  // namespace mra
