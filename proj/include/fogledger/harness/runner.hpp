#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fogledger/harness/report.hpp"

namespace fogledger::harness {

enum ExitCode : int { kExitOk = 0, kExitExpectationFailed = 1, kExitConfigError = 2 };

inline constexpr const char* kScenarioDirEnv = "FOGLEDGER_SCENARIO_DIR";

struct RunOptions {
    std::string preset;
    std::optional<std::string> scenario;  // defaults to the preset's file in the scenario directory
    std::optional<std::uint64_t> seed;    // defaults to the scenario's seed
    std::string out_dir = "out";
    std::vector<std::string> overrides;
};

// Directory searched for default scenario files: $FOGLEDGER_SCENARIO_DIR,
// else the directory configured at build time.
std::string scenario_dir();
std::string resolve_scenario(const RunOptions& opts);

// Writes <out>/<preset>.csv and <out>/<preset>-summary.txt. Nothing is
// written when the scenario fails to load. Returns an ExitCode.
int run(const RunOptions& opts, std::ostream& out, std::ostream& err, RunReport* report = nullptr);

struct ReplayOptions {
    std::string schedule_file;
    // Roster the caller expects, as server ids; mismatch is a configuration error.
    std::optional<std::vector<std::string>> roster;
};

// Exit 0 when the replay reproduces the recorded accepts, 1 when it does
// not, 2 when the file cannot be read or does not fit the given roster.
int replay(const ReplayOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace fogledger::harness
