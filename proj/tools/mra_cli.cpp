// SPDX-License-Identifier: Apache-2.0
//
// mra run|sweep|validate --config <path> --out <dir> [--seed <u64>] [--trials <n>]

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mra/config.hpp"
#include "mra/sweep_io.hpp"
#include "mra/validate.hpp"

namespace {

struct Flags {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> threads;
};

void add_common(CLI::App& cmd, Flags& flags)
{
    cmd.add_option("--config", flags.config_path, "key = value configuration file");
    cmd.add_option("--out", flags.out_dir, "output directory for CSV files");
    cmd.add_option("--seed", flags.seed, "RNG seed (overrides the config file)");
    cmd.add_option("--trials", flags.trials, "Monte-Carlo trials (overrides the config file)");
    cmd.add_option("--threads", flags.threads, "worker threads, 0 = all cores");
}

// Returns an exit code on failure.
std::optional<int> load_config(const Flags& flags, mra::CliConfig& cfg)
{
    std::string text;
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot read config file " << flags.config_path << "\n";
            return mra::kExitIo;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        cfg = mra::parse_config(text);
        if (!flags.out_dir.empty())
            cfg.output_path = flags.out_dir;
        if (flags.seed)
            cfg.experiment.seed = *flags.seed;
        if (flags.trials)
            cfg.experiment.trials = *flags.trials;
        if (flags.threads)
            cfg.experiment.threads = *flags.threads;
        mra::validate_config(cfg);
    } catch (const mra::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return mra::kExitConfig;
    }
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Joint antenna position and rotation optimization for ZF multi-user downlink"};
    app.require_subcommand(1);

    Flags flags;
    auto* run = app.add_subcommand("run", "all four schemes at the configured operating point");
    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweeps over the configured axes");
    auto* validate = app.add_subcommand("validate", "fast numerical self-checks");
    add_common(*run, flags);
    add_common(*sweep, flags);
    add_common(*validate, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : mra::kExitConfig;
    }

    if (validate->parsed())
        return mra::cmd_validate(std::cout);

    mra::CliConfig cfg;
    if (auto rc = load_config(flags, cfg))
        return *rc;
    try {
        if (run->parsed()) {
            cfg.command = mra::Command::run;
            return mra::cmd_run(cfg, std::cout, std::cerr);
        }
        cfg.command = mra::Command::sweep;
        return mra::cmd_sweep(cfg, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mra::kExitIo;
    }
}
