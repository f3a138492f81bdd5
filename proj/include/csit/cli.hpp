#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "csit/evaluation.hpp"

namespace csit {

/// Command line could not be interpreted; carries the message for stderr.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by parse_args when --help is requested; carries the help text.
struct HelpRequested {
    std::string text;
};

/// Fully resolved CLI invocation.
struct RunSpec {
    ScenarioConfig config;
    Sweep sweep;                         // parameter empty = single-point run
    std::vector<Algorithm> algorithms;   // nonempty, in request order
    std::string output_path = "-";       // "-" = stdout
    std::size_t jobs = 1;
    bool verbose = false;
    std::string channel_dump_path;       // empty = no dump
};

/// Parses flags (program name excluded). Throws UsageError on unknown flags,
/// malformed sweeps, or infeasible parameter combinations; throws
/// HelpRequested for --help.
RunSpec parse_args(const std::vector<std::string>& args);

/// CSV table of an experiment report:
/// sweep_param,sweep_value,algorithm,mean_snr_loss_db,trials,invalid_count,seed
/// with one row per (sweep value, algorithm), means to six decimals, and a
/// deterministic row order.
void emit_csv(const ExperimentReport& report, std::ostream& out);

/// Writes the CSV to a path ("-" = stdout). Throws IoError when unwritable.
void emit_csv(const ExperimentReport& report, const std::string& path);

/// Full CLI entry point. Exit status 0 iff every requested sweep point
/// produced a valid row for every requested algorithm.
int run_cli(int argc, const char* const* argv);

}  // namespace csit
