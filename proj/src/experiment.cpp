// SPDX-License-Identifier: Apache-2.0

#include "mra/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

namespace mra {

std::string_view axis_name(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::snr: return "snr";
    case SweepAxis::psi_max: return "psi_max";
    case SweepAxis::r: return "r";
    }
    return "?";
}

std::optional<SweepAxis> parse_axis(std::string_view name)
{
    for (auto a : {SweepAxis::snr, SweepAxis::psi_max, SweepAxis::r})
        if (axis_name(a) == name)
            return a;
    return std::nullopt;
}

const std::vector<double>& ExperimentConfig::axis_values(SweepAxis axis) const
{
    switch (axis) {
    case SweepAxis::psi_max: return psi_max_list;
    case SweepAxis::r: return r_list;
    case SweepAxis::snr: break;
    }
    return snr_db_list;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Scenario generate_scenario(std::mt19937_64& rng, const ExperimentConfig& config, double snr_db)
{
    std::uniform_real_distribution<double> angle(0.0, 1.0);
    // CN(0, 1): independent real and imaginary parts with variance 1/2 each.
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

    Scenario sc;
    sc.wavelength = config.wavelength;
    sc.noise_var = 1.0;
    sc.power = std::pow(10.0, snr_db / 10.0);
    sc.users.resize(config.num_users);
    for (auto& paths : sc.users) {
        paths.resize(config.num_paths);
        for (auto& p : paths) {
            p.theta = angle(rng);
            p.phi = angle(rng);
            const double re = gauss(rng);
            const double im = gauss(rng);
            p.beta = {re, im};
        }
    }
    return sc;
}

Bounds region_bounds(double r, double psi_max, double wavelength)
{
    const double half = 0.5 * r * wavelength;
    return {half, half, psi_max, psi_max};
}

PointOutcome run_point(const Scenario& scenario, Scheme scheme, double r, double psi_max,
                       const ExperimentConfig& config)
{
    const AntennaLayout init = grid_layout(config.n_x, config.n_z, scenario.wavelength);
    const OptResult res =
        optimize(scenario, scheme, region_bounds(r, psi_max, scenario.wavelength), init);
    return {res.sum_rate, res.iterations, res.converged};
}

SweepResult run_sweep(const ExperimentConfig& config, SweepAxis axis)
{
    std::vector<double> values = config.axis_values(axis);
    if (values.empty())
        throw std::invalid_argument("run_sweep: axis value list is empty");
    std::sort(values.begin(), values.end());

    const std::size_t n_schemes = std::size(kAllSchemes);
    const std::size_t per_trial = n_schemes * values.size();
    std::vector<SweepRow> slots(per_trial * config.trials);

    auto run_trial = [&](std::size_t trial) {
        std::mt19937_64 rng(trial_seed(config.seed, trial));
        const Scenario base = generate_scenario(rng, config, config.snr_db);
        for (std::size_t v = 0; v < values.size(); ++v) {
            Scenario sc = base;
            double r = config.r;
            double psi = config.psi_max;
            switch (axis) {
            case SweepAxis::snr: sc.power = std::pow(10.0, values[v] / 10.0); break;
            case SweepAxis::psi_max: psi = values[v]; break;
            case SweepAxis::r: r = values[v]; break;
            }
            for (std::size_t s = 0; s < n_schemes; ++s) {
                const PointOutcome out = run_point(sc, kAllSchemes[s], r, psi, config);
                slots[trial * per_trial + v * n_schemes + s] = {
                    kAllSchemes[s], values[v], trial, out.sum_rate, out.iterations,
                    out.converged};
            }
        }
    };

    std::size_t workers = config.threads;
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, config.trials);

    if (workers <= 1) {
        for (std::size_t t = 0; t < config.trials; ++t)
            run_trial(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t t = next++; t < config.trials; t = next++) {
                    try {
                        run_trial(t);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool)
            th.join();
        if (failure)
            std::rethrow_exception(failure);
    }

    std::sort(slots.begin(), slots.end(), [](const SweepRow& a, const SweepRow& b) {
        return std::tie(a.scheme, a.axis_value, a.trial) <
               std::tie(b.scheme, b.axis_value, b.trial);
    });
    return {axis, std::move(slots)};
}

std::vector<AggregateRow> aggregate(const SweepResult& result)
{
    if (result.rows.empty())
        throw std::invalid_argument("aggregate: empty sweep result");
    std::map<std::pair<Scheme, double>, std::vector<double>> groups;
    for (const auto& row : result.rows)
        groups[{row.scheme, row.axis_value}].push_back(row.sum_rate);

    std::vector<AggregateRow> out;
    out.reserve(groups.size());
    for (const auto& [key, rates] : groups) {
        const auto n = static_cast<double>(rates.size());
        double mean = 0.0;
        for (double x : rates)
            mean += x;
        mean /= n;
        double se = 0.0;
        if (rates.size() > 1) {
            double ss = 0.0;
            for (double x : rates)
                ss += (x - mean) * (x - mean);
            se = std::sqrt(ss / (n - 1.0) / n);
        }
        out.push_back({key.first, key.second, mean, se, rates.size()});
    }
    return out;
}

PairedStats paired_difference(const SweepResult& result, Scheme a, Scheme b, double axis_value)
{
    std::map<std::size_t, double> rate_a;
    std::map<std::size_t, double> rate_b;
    for (const auto& row : result.rows) {
        if (row.axis_value != axis_value)
            continue;
        if (row.scheme == a)
            rate_a[row.trial] = row.sum_rate;
        else if (row.scheme == b)
            rate_b[row.trial] = row.sum_rate;
    }
    std::vector<double> diffs;
    for (const auto& [trial, ra] : rate_a)
        if (auto it = rate_b.find(trial); it != rate_b.end())
            diffs.push_back(ra - it->second);

    PairedStats st;
    st.count = diffs.size();
    if (diffs.empty())
        return st;
    const auto n = static_cast<double>(diffs.size());
    for (double d : diffs)
        st.mean += d;
    st.mean /= n;
    if (diffs.size() > 1) {
        double ss = 0.0;
        for (double d : diffs)
            ss += (d - st.mean) * (d - st.mean);
        st.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return st;
}

}  // namespace mra
