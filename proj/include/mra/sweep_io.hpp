// SPDX-License-Identifier: Apache-2.0
//
// CSV rendering of sweep results and the command implementations behind the CLI.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mra/config.hpp"
#include "mra/experiment.hpp"

namespace mra {

inline constexpr const char* kSweepCsvHeader =
    "scheme,axis,axis_value,trial,sum_rate_bps_hz,iterations,converged";

enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitConfig = 2, kExitValidation = 3 };

/// Header plus one row per SweepRow, reals as %.9g, converged as 0/1.
std::string format_sweep_csv(const SweepResult& result);

/// Writes to a sibling temporary file and renames it into place. Throws
/// std::filesystem::filesystem_error / std::ios_base::failure on I/O errors.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::filesystem::path sweep_csv_path(const std::filesystem::path& dir, SweepAxis axis);

int cmd_run(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliConfig& config, std::ostream& out, std::ostream& err);

}  // namespace mra
