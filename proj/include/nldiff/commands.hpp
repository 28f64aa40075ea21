#pragma once

#include <optional>
#include <string>

#include "nldiff/analysis.hpp"
#include "nldiff/config.hpp"
#include "nldiff/csv.hpp"
#include "nldiff/errors.hpp"

namespace nldiff {

/// Result of one CLI command: the data table, the pass/fail report and an
/// optional plot.
struct CommandOutput {
    std::string name;
    CsvTable table;
    ExperimentReport report;
    std::optional<std::string> svg;

    bool pass() const { return report.pass(); }
};

CommandOutput cmd_multiplier(const RunConfig& cfg);
CommandOutput cmd_solve(const RunConfig& cfg);
CommandOutput cmd_converge(const RunConfig& cfg, bool beta_sweep);
CommandOutput cmd_jump_decay(const RunConfig& cfg);
CommandOutput cmd_regularity(const RunConfig& cfg);
/// Quick property checks on the multiplier and the evolution.
CommandOutput cmd_selftest(const RunConfig& cfg);

/// Dispatches on cfg.command.  cfg.threads = 0 is resolved from the environment.
CommandOutput run_command(const RunConfig& cfg);

/// Writes <name>.csv, <name>_report.csv and, when requested, <name>.svg.
void write_outputs(const CommandOutput& out, const std::string& dir, bool svg);

/// CLI exit code for an error kind: 2 for configuration problems, 3 otherwise.
int exit_code_for(ErrorKind kind);

}  // namespace nldiff
