#include "fogledger/harness/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "fogledger/consensus/schedule_file.hpp"
#include "fogledger/harness/presets.hpp"
#include "fogledger/sim/network.hpp"

#ifndef FOGLEDGER_DEFAULT_SCENARIO_DIR
#define FOGLEDGER_DEFAULT_SCENARIO_DIR "scenarios"
#endif

namespace fogledger::harness {

namespace fs = std::filesystem;

std::string scenario_dir() {
    if (const char* env = std::getenv(kScenarioDirEnv); env && *env) return env;
    return FOGLEDGER_DEFAULT_SCENARIO_DIR;
}

std::string resolve_scenario(const RunOptions& opts) {
    if (opts.scenario) return *opts.scenario;
    return (fs::path(scenario_dir()) / default_scenario_file(opts.preset)).string();
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

}  // namespace

int run(const RunOptions& opts, std::ostream& out, std::ostream& err, RunReport* report_out) {
    if (!is_preset(opts.preset)) {
        err << "error: unknown preset '" << opts.preset << "' (expected one of:";
        for (const auto& p : preset_names()) err << ' ' << p;
        err << ")\n";
        return kExitConfigError;
    }
    const auto started = std::chrono::steady_clock::now();
    sim::Scenario scenario;
    std::string path;
    try {
        path = resolve_scenario(opts);
        scenario = sim::load_scenario(path, opts.overrides);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    const std::uint64_t seed = opts.seed.value_or(scenario.seed);
    const fs::path dir(opts.out_dir);

    PresetResult result;
    try {
        result = run_preset(opts.preset, scenario, seed, opts.preset == "adversarial" ? std::optional(dir) : std::nullopt);
    } catch (const sim::ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const sim::TopologyError& e) {
        err << "error: topology: " << e.what() << "\n";
        return kExitConfigError;
    }
    result.coverage["cli-harness"] += 1;

    RunReport report;
    report.preset = opts.preset;
    report.scenario = path;
    report.seed = seed;
    report.metrics_path = (dir / (opts.preset + ".csv")).string();
    report.summary_path = (dir / (opts.preset + "-summary.txt")).string();
    report.expectations = evaluate(scenario.expectations_for(opts.preset), result.table);
    report.coverage = result.coverage;
    report.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    const std::string summary = render(report, result.table);
    try {
        fs::create_directories(dir);
        write_file(report.metrics_path, result.table.str());
        write_file(report.summary_path, summary);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    out << summary;
    const bool ok = report.passed();
    if (report_out) *report_out = std::move(report);
    return ok ? kExitOk : kExitExpectationFailed;
}

int replay(const ReplayOptions& opts, std::ostream& out, std::ostream& err) {
    consensus::RecordedSchedule schedule;
    consensus::ReplayResult result;
    try {
        schedule = consensus::RecordedSchedule::load(opts.schedule_file);
        if (opts.roster) {
            std::vector<NodeAddress> addrs;
            for (const auto& id : *opts.roster) addrs.push_back(NodeAddress{id, Role::CloudServer});
            result = consensus::replay_schedule(schedule, consensus::ServerRoster(addrs), schedule.scheme);
        } else {
            result = consensus::replay_schedule(schedule);
        }
    } catch (const consensus::IncompatibleSchedule& e) {
        err << "error: IncompatibleSchedule: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    out << "schedule  " << opts.schedule_file << "\n"
        << "servers  ";
    for (const auto& s : schedule.roster.servers()) out << ' ' << s.id;
    out << "\nfaulty   ";
    for (const auto& f : schedule.faulty) out << ' ' << f;
    out << "\nentries   " << schedule.entries.size() << "\n"
        << "accepts   " << result.accepts.size() << "\n";
    for (const auto& a : result.accepts)
        out << "  " << a.server << " height " << a.height << " " << to_hex(a.digest).substr(0, 16) << "\n";
    out << "recorded violation  " << (schedule.violation ? "yes" : "no") << "\n"
        << "replayed safe       " << (result.safe ? "yes" : "no") << "\n";
    if (!result.safe) out << "SAFETY VIOLATION reproduced: two distinct blocks accepted at one height\n";
    out << "matches recording   " << (result.matches_recorded ? "yes" : "no") << "\n";
    return result.matches_recorded ? kExitOk : kExitExpectationFailed;
}

}  // namespace fogledger::harness
