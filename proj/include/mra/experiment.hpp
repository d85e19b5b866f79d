// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo harness: random multipath scenarios, the four antenna schemes,
// and sweeps over SNR, rotation bound and movable region.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "mra/channel_model.hpp"
#include "mra/sqp_optimizer.hpp"

namespace mra {

enum class SweepAxis { snr, psi_max, r };

std::string_view axis_name(SweepAxis axis);
std::optional<SweepAxis> parse_axis(std::string_view name);

struct ExperimentConfig {
    std::size_t n_x = 2;
    std::size_t n_z = 2;
    std::size_t num_users = 4;  // K
    std::size_t num_paths = 4;  // L
    std::vector<double> snr_db_list{-4, -2, 0, 2, 4, 6, 8, 10, 12};
    std::vector<double> r_list{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> psi_max_list{kPi / 16,     kPi / 8,      3 * kPi / 16, kPi / 4,
                                     5 * kPi / 16, 3 * kPi / 8,  7 * kPi / 16, kPi / 2};
    // Values held fixed while another axis is swept.
    double snr_db = 1.0;
    double r = 4.0;
    double psi_max = kPi / 4;
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    double wavelength = kDefaultWavelength;
    std::size_t threads = 0;  // 0 = hardware concurrency

    std::size_t num_antennas() const { return n_x * n_z; }
    const std::vector<double>& axis_values(SweepAxis axis) const;
};

struct SweepRow {
    Scheme scheme = Scheme::FPA;
    double axis_value = 0.0;
    std::size_t trial = 0;
    double sum_rate = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::snr;
    std::vector<SweepRow> rows;  // sorted by (scheme, axis_value, trial)
};

struct PointOutcome {
    double sum_rate = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

struct AggregateRow {
    Scheme scheme = Scheme::FPA;
    double axis_value = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

/// Independent per-trial RNG seed derived from the experiment seed (splitmix64).
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

/// Path angles uniform on [0, 1], gains CN(0, 1), sigma^2 = 1, P = 10^(snr_db / 10).
Scenario generate_scenario(std::mt19937_64& rng, const ExperimentConfig& config, double snr_db);

Bounds region_bounds(double r, double psi_max, double wavelength);

PointOutcome run_point(const Scenario& scenario, Scheme scheme, double r, double psi_max,
                       const ExperimentConfig& config);

/// Full schemes x axis values x trials product. Each trial's channel draw is shared by
/// every scheme and axis value.
SweepResult run_sweep(const ExperimentConfig& config, SweepAxis axis);

std::vector<AggregateRow> aggregate(const SweepResult& result);

struct PairedStats {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

/// Mean and standard error of rate(a) - rate(b) over trials at one axis value.
PairedStats paired_difference(const SweepResult& result, Scheme a, Scheme b, double axis_value);

}  // namespace mra
