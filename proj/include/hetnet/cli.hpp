#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hetnet/scenario_io.hpp"

namespace hetnet {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitNonConvergent = 3,
    kExitNonHomogeneous = 4,
};

struct CommandOptions {
    /// One of cdf, outage, ergodic, ase, mc.
    std::string command;
    std::string config;
    bool mc = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> realizations;
    std::string out;
};

/// One CSV document; `kappa` is set when the command writes one file per
/// sweep value.
struct CsvOutput {
    std::optional<double> kappa;
    std::string text;
};

/// Runs a command on a parsed scenario file and returns its CSV documents.
std::vector<CsvOutput> execute(const CommandOptions& options, const ScenarioFile& file);

/// Path of the document for one sweep value when there are several:
/// "<stem>_kappa<value><ext>".
std::string output_path(const std::string& out, double kappa);

/// Loads the config, runs the command and writes the output. Errors are
/// reported on `diagnostics` and mapped to exit codes.
int run_command(const CommandOptions& options, std::ostream& out, std::ostream& diagnostics);

}  // namespace hetnet
