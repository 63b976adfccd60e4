// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#ifndef UWBSYNC_CLI_HPP
#define UWBSYNC_CLI_HPP

#include "uwbsync/harness.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace uwbsync {

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 1,
    exit_runtime = 2,
    exit_io = 3,
};

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<std::vector<std::optional<double>>> snr_db;
    std::optional<std::vector<Estimator>> estimators;
    std::optional<std::vector<Mode>> modes;
    std::optional<int> workers;
};

void apply_overrides(ScenarioConfig &cfg, const RunOverrides &o);

/// Loads a scenario file or a run manifest (detected by a leading '{').
ScenarioConfig load_run_input(const std::string &path);

/// Writes <out_dir>/metrics.csv and <out_dir>/manifest.json.
int cmd_run(const std::string &input_path, const std::string &out_dir, const RunOverrides &overrides, std::ostream &out,
            std::ostream &err);

/// Prints the canonical form of a scenario (or of the built-in desk profile when `input_path` is empty).
int cmd_emit_config(const std::string &input_path, std::ostream &out, std::ostream &err);

/// Parses argv and dispatches to run / selftest / emit-config.
int run_cli(int argc, char **argv);

} // namespace uwbsync

#endif
