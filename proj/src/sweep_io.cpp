// SPDX-License-Identifier: Apache-2.0

#include "mra/sweep_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <system_error>

namespace mra {

namespace fs = std::filesystem;

namespace {

std::string fmt_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void print_summary(const SweepResult& result, std::ostream& out)
{
    char line[128];
    std::snprintf(line, sizeof line, "%-4s %12s %12s %10s\n", "", std::string(axis_name(result.axis)).c_str(),
                  "mean", "stderr");
    out << line;
    for (const auto& row : aggregate(result)) {
        std::snprintf(line, sizeof line, "%-4s %12.6g %12.6f %10.6f\n",
                      std::string(scheme_name(row.scheme)).c_str(), row.axis_value, row.mean,
                      row.std_error);
        out << line;
    }
}

int write_result(const SweepResult& result, const fs::path& path, std::ostream& err)
{
    try {
        write_file_atomic(path, format_sweep_csv(result));
    } catch (const std::exception& e) {
        err << "error: cannot write " << path.string() << ": " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

int prepare_output_dir(const fs::path& dir, std::ostream& err)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        err << "error: cannot create output directory " << dir.string() << ": " << ec.message()
            << "\n";
        return kExitIo;
    }
    return kExitOk;
}

}  // namespace

std::string format_sweep_csv(const SweepResult& result)
{
    std::string out = kSweepCsvHeader;
    out += '\n';
    const std::string axis(axis_name(result.axis));
    for (const auto& row : result.rows) {
        out += scheme_name(row.scheme);
        out += ',';
        out += axis;
        out += ',';
        out += fmt_real(row.axis_value);
        out += ',';
        out += std::to_string(row.trial);
        out += ',';
        out += fmt_real(row.sum_rate);
        out += ',';
        out += std::to_string(row.iterations);
        out += ',';
        out += row.converged ? '1' : '0';
        out += '\n';
    }
    return out;
}

void write_file_atomic(const fs::path& path, const std::string& contents)
{
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f;
        f.exceptions(std::ios::failbit | std::ios::badbit);
        f.open(tmp, std::ios::binary | std::ios::trunc);
        f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        f.close();
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw fs::filesystem_error("rename failed", tmp, path, ec);
    }
}

fs::path sweep_csv_path(const fs::path& dir, SweepAxis axis)
{
    return dir / ("sweep_" + std::string(axis_name(axis)) + ".csv");
}

int cmd_run(const CliConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        validate_config(config);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    if (int rc = prepare_output_dir(config.output_path, err); rc != kExitOk)
        return rc;

    // A single operating point: the SNR axis restricted to the configured snr_db.
    ExperimentConfig point = config.experiment;
    point.snr_db_list = {point.snr_db};
    const SweepResult result = run_sweep(point, SweepAxis::snr);
    print_summary(result, out);
    return write_result(result, config.output_path / "run.csv", err);
}

int cmd_sweep(const CliConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        validate_config(config);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    if (int rc = prepare_output_dir(config.output_path, err); rc != kExitOk)
        return rc;

    for (const SweepAxis axis : config.axes) {
        const SweepResult result = run_sweep(config.experiment, axis);
        print_summary(result, out);
        const fs::path path = sweep_csv_path(config.output_path, axis);
        if (int rc = write_result(result, path, err); rc != kExitOk)
            return rc;
        out << "wrote " << path.string() << "\n";
    }
    return kExitOk;
}

}  // namespace mra
