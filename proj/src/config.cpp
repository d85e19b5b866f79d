// SPDX-License-Identifier: Apache-2.0

#include "mra/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>

namespace mra {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view value)
{
    std::vector<std::string_view> items;
    std::size_t pos = 0;
    while (true) {
        const auto comma = value.find(',', pos);
        items.push_back(trim(value.substr(pos, comma - pos)));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return items;
}

bool parse_plain(std::string_view token, double& out)
{
    if (token.empty())
        return false;
    if (token.front() == '+')
        token.remove_prefix(1);
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::uint64_t parse_unsigned(std::string_view token)
{
    token = trim(token);
    if (!token.empty() && token.front() == '-')
        throw RangeError("expected a nonnegative integer, got '" + std::string(token) + "'", 0);
    std::uint64_t v = 0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (ec == std::errc::result_out_of_range)
        throw RangeError("integer out of range: '" + std::string(token) + "'", 0);
    if (ec != std::errc() || ptr != end || token.empty())
        throw ParseError("expected an integer, got '" + std::string(token) + "'", 0);
    return v;
}

std::vector<double> parse_real_list(std::string_view value)
{
    std::vector<double> out;
    for (auto item : split_list(value)) {
        if (item.empty())
            throw ParseError("empty list element in '" + std::string(value) + "'", 0);
        out.push_back(parse_real(item));
    }
    return out;
}

}  // namespace

double parse_real(std::string_view token)
{
    token = trim(token);
    double value = 0.0;
    if (parse_plain(token, value))
        return value;

    // [coef[*]]pi[/den]
    const auto pi_pos = token.find("pi");
    if (pi_pos != std::string_view::npos) {
        std::string_view coef = trim(token.substr(0, pi_pos));
        std::string_view rest = trim(token.substr(pi_pos + 2));
        if (!coef.empty() && coef.back() == '*')
            coef = trim(coef.substr(0, coef.size() - 1));
        double c = 1.0;
        if (coef == "-")
            c = -1.0;
        else if (!coef.empty() && !parse_plain(coef, c))
            throw ParseError("bad number '" + std::string(token) + "'", 0);
        double d = 1.0;
        if (!rest.empty()) {
            if (rest.front() != '/' || !parse_plain(trim(rest.substr(1)), d) || d == 0.0)
                throw ParseError("bad number '" + std::string(token) + "'", 0);
        }
        return c * kPi / d;
    }
    throw ParseError("bad number '" + std::string(token) + "'", 0);
}

CliConfig parse_config(std::string_view text)
{
    CliConfig cfg;
    auto& ex = cfg.experiment;
    double frequency = kCarrierHz;

    using Setter = std::function<void(std::string_view)>;
    auto size_setter = [](std::size_t& field) {
        return [&field](std::string_view v) { field = static_cast<std::size_t>(parse_unsigned(v)); };
    };
    auto real_setter = [](double& field) { return [&field](std::string_view v) { field = parse_real(v); }; };
    auto list_setter = [](std::vector<double>& field) {
        return [&field](std::string_view v) { field = parse_real_list(v); };
    };

    const std::map<std::string, Setter, std::less<>> setters{
        {"n_x", size_setter(ex.n_x)},
        {"n_z", size_setter(ex.n_z)},
        {"K", size_setter(ex.num_users)},
        {"L", size_setter(ex.num_paths)},
        {"trials", size_setter(ex.trials)},
        {"threads", size_setter(ex.threads)},
        {"seed", [&](std::string_view v) { ex.seed = parse_unsigned(v); }},
        {"snr_db", real_setter(ex.snr_db)},
        {"r", real_setter(ex.r)},
        {"psi_max", real_setter(ex.psi_max)},
        {"frequency_hz", real_setter(frequency)},
        {"snr_db_list", list_setter(ex.snr_db_list)},
        {"r_list", list_setter(ex.r_list)},
        {"psi_max_list", list_setter(ex.psi_max_list)},
        {"axes",
         [&](std::string_view v) {
             cfg.axes.clear();
             for (auto item : split_list(v)) {
                 const auto axis = parse_axis(item);
                 if (!axis)
                     throw ParseError("unknown sweep axis '" + std::string(item) + "'", 0);
                 cfg.axes.push_back(*axis);
             }
         }},
        {"output_path", [&](std::string_view v) { cfg.output_path = std::string(v); }},
    };

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected 'key = value'", line_no);
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("missing key", line_no);
        if (value.empty())
            throw ParseError("missing value for '" + std::string(key) + "'", line_no);

        const auto it = setters.find(key);
        if (it == setters.end())
            throw UnknownKey("unknown key '" + std::string(key) + "'", line_no);
        try {
            it->second(value);
        } catch (const RangeError& e) {
            throw RangeError(std::string(key) + ": " + e.what(), line_no);
        } catch (const ConfigError& e) {
            throw ParseError(std::string(key) + ": " + e.what(), line_no);
        }
    }

    if (!(frequency > 0.0))
        throw RangeError("frequency_hz must be positive", 0);
    ex.wavelength = kSpeedOfLight / frequency;
    validate_config(cfg);
    return cfg;
}

void validate_config(const CliConfig& config)
{
    const auto& ex = config.experiment;
    if (ex.trials < 1)
        throw RangeError("trials must be >= 1", 0);
    if (ex.n_x < 1 || ex.n_z < 1)
        throw RangeError("n_x and n_z must be >= 1", 0);
    if (ex.num_users < 1 || ex.num_paths < 1)
        throw RangeError("K and L must be >= 1", 0);
    if (ex.num_antennas() < ex.num_users)
        throw RangeError("zero-forcing needs N = n_x * n_z >= K", 0);
    if (ex.snr_db_list.empty() || ex.r_list.empty() || ex.psi_max_list.empty())
        throw RangeError("sweep lists must be nonempty", 0);
    if (config.axes.empty())
        throw RangeError("axes must name at least one sweep axis", 0);
    if (!(ex.wavelength > 0.0))
        throw RangeError("wavelength must be positive", 0);

    // The lambda/2 starting grid must fit inside the movable region.
    const double r_min = 0.5 * static_cast<double>(std::max(ex.n_x, ex.n_z) - 1);
    auto check_r = [&](double r) {
        if (!(r >= r_min))
            throw RangeError("r = " + std::to_string(r) + " is below " + std::to_string(r_min) +
                                 ", the smallest region holding the initial grid",
                             0);
    };
    auto check_psi = [](double p) {
        if (!(p >= 0.0))
            throw RangeError("psi_max values must be nonnegative", 0);
    };
    auto check_snr = [](double s) {
        if (!std::isfinite(s))
            throw RangeError("snr_db values must be finite", 0);
    };
    check_r(ex.r);
    check_psi(ex.psi_max);
    check_snr(ex.snr_db);
    std::for_each(ex.r_list.begin(), ex.r_list.end(), check_r);
    std::for_each(ex.psi_max_list.begin(), ex.psi_max_list.end(), check_psi);
    std::for_each(ex.snr_db_list.begin(), ex.snr_db_list.end(), check_snr);
}

}  // namespace mra
