#include <iostream>

#include <CLI11.hpp>

#include "fogledger/harness/presets.hpp"
#include "fogledger/harness/runner.hpp"

using namespace fogledger::harness;

int main(int argc, char** argv) {
    CLI::App app{"Fog ledger simulator: run experiment presets and replay recorded consensus schedules"};
    app.require_subcommand(1);

    RunOptions run_opts;
    std::uint64_t seed = 0;
    auto* run_cmd = app.add_subcommand("run", "Run a preset against a scenario file");
    std::string presets;
    for (const auto& p : preset_names()) presets += (presets.empty() ? "" : ", ") + p;
    run_cmd->add_option("--preset", run_opts.preset, "One of: " + presets)->required();
    run_cmd->add_option("--scenario", run_opts.scenario,
                        std::string("Scenario file (default: preset's file under $") + kScenarioDirEnv + ")");
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Seed (default: the scenario's)");
    run_cmd->add_option("--out", run_opts.out_dir, "Output directory")->capture_default_str();
    run_cmd->add_option("--override", run_opts.overrides, "KEY=VALUE applied to the scenario (repeatable)")
        ->allow_extra_args(false);

    ReplayOptions replay_opts;
    std::vector<std::string> roster;
    auto* replay_cmd = app.add_subcommand("replay", "Replay a recorded consensus schedule");
    replay_cmd->add_option("schedule", replay_opts.schedule_file, "Schedule file")->required();
    auto* roster_opt =
        replay_cmd->add_option("--roster", roster, "Expected server ids, comma separated")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    if (*run_cmd) {
        if (*seed_opt) run_opts.seed = seed;
        return run(run_opts, std::cout, std::cerr);
    }
    if (*roster_opt) replay_opts.roster = roster;
    return replay(replay_opts, std::cout, std::cerr);
}
