#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>

#include "fogledger/consensus/engine.hpp"
#include "fogledger/consensus/schedule_file.hpp"

namespace fogledger::consensus {

/// Misbehaviour available to faulty servers. Faulty servers collude: they
/// pool every signature and block they observe.
struct AdversaryProfile {
    bool drop = true;          // ignore some incoming messages
    bool duplicate = true;     // send some messages more than once
    bool forge_bundle = true;  // announce blocks with padded or forged bundles
    bool wrong_reply = true;   // corrupt, misdirect or replace confirmations
    bool equivocate = true;    // propose conflicting blocks to disjoint subsets
    bool double_sign = false;  // let a faulty server sign two blocks at one height
    double act_probability = 0.35;
};

struct ExplorerConfig {
    std::size_t n = 4;
    std::size_t faulty = 1;
    std::uint64_t target_height = 3;
    std::size_t max_steps = 5000;
    double network_drop = 0.02;
    double network_duplicate = 0.05;
    double skip_probability = 0.1;
    AdversaryProfile adversary;
    crypto::SchemeId scheme = crypto::SchemeId::KeyedDigest;
    std::uint64_t key_seed = 7;
    std::size_t clients = 3;
};

struct ExplorerWorld {
    std::unique_ptr<crypto::CryptoSuite> suite;
    ServerRoster roster;
    std::map<std::string, crypto::KeyPair> server_keys;
    std::vector<crypto::KeyPair> clients;
    chain::Block genesis;
};

std::unique_ptr<ExplorerWorld> build_explorer_world(crypto::SchemeId scheme, std::uint64_t key_seed,
                                                    const ServerRoster& roster,
                                                    const std::vector<NodeAddress>& clients);

ServerRoster numbered_roster(std::size_t n);

struct ScheduleOutcome {
    std::uint64_t seed = 0;
    bool safe = true;
    bool valid_blocks = true;
    std::string violation;
    std::vector<std::string> faulty;
    std::vector<RecordedAccept> accepts;
    std::uint64_t min_honest_height = 0;
    std::uint64_t max_honest_height = 0;
    std::size_t steps = 0;
    std::size_t delivered = 0;
    std::size_t dropped = 0;
};

/// Runs randomized message schedules against a roster with a random faulty
/// subset. Delivery order is chosen uniformly from everything in flight, so
/// messages are freely reordered, and any message may be lost or duplicated.
class ScheduleExplorer {
public:
    explicit ScheduleExplorer(ExplorerConfig config);
    ~ScheduleExplorer();

    const ExplorerConfig& config() const { return config_; }

    // When `record` is given it receives a replayable copy of the run.
    ScheduleOutcome run(std::uint64_t seed, RecordedSchedule* record = nullptr);

private:
    ExplorerConfig config_;
    std::unique_ptr<ExplorerWorld> world_;
};

struct SafetySummary {
    std::size_t schedules = 0;
    std::size_t violations = 0;
    std::size_t invalid_accepts = 0;
    std::size_t schedules_with_progress = 0;
    std::vector<std::uint64_t> failing_seeds;
    std::vector<std::filesystem::path> saved_schedules;
};

// Runs `count` schedules with seeds first_seed, first_seed+1, ... Failing
// schedules are re-run with recording and saved under failure_dir if set.
SafetySummary explore(const ExplorerConfig& config, std::uint64_t first_seed, std::size_t count,
                      const std::optional<std::filesystem::path>& failure_dir = std::nullopt);

}  // namespace fogledger::consensus
