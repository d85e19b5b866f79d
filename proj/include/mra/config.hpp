// SPDX-License-Identifier: Apache-2.0
//
// Plain-text experiment configuration: one `key = value` pair per line, `#` starts a
// comment, lists are comma separated. Angles accept `pi` forms such as `pi/4` or
// `3*pi/16`.

#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mra/experiment.hpp"

namespace mra {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line)
    {
    }
    std::size_t line() const { return line_; }  // 0 when not tied to a line

private:
    std::size_t line_;
};

class ParseError : public ConfigError {
public:
    using ConfigError::ConfigError;
};
class UnknownKey : public ConfigError {
public:
    using ConfigError::ConfigError;
};
class RangeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

enum class Command { run, sweep, validate };

struct CliConfig {
    ExperimentConfig experiment;
    std::vector<SweepAxis> axes{SweepAxis::snr};
    std::filesystem::path output_path{"."};
    Command command = Command::sweep;
};

CliConfig parse_config(std::string_view text);

/// Throws RangeError for values outside their domain.
void validate_config(const CliConfig& config);

/// `pi`, `pi/4`, `3*pi/16`, `2pi` or a plain decimal number.
double parse_real(std::string_view token);

}  // namespace mra
