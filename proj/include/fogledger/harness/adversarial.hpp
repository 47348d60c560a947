#pragma once

#include <filesystem>
#include <map>
#include <optional>

#include "fogledger/consensus/explorer.hpp"
#include "fogledger/sim/metrics.hpp"
#include "fogledger/sim/scenario.hpp"

namespace fogledger::harness {

using Coverage = std::map<std::string, std::uint64_t>;

struct SafetyResult {
    std::size_t n = 0;
    std::size_t faulty = 0;
    bool double_sign = false;
    consensus::SafetySummary summary;
};

// Randomized schedules with n - quorum_size(n) colluding faulty servers.
SafetyResult safety_suite(std::size_t n, std::size_t schedules, std::uint64_t first_seed, double network_drop,
                          double network_duplicate, bool double_sign,
                          const std::optional<std::filesystem::path>& failure_dir = std::nullopt);

struct TamperResult {
    std::size_t mutations = 0;
    std::size_t false_accepts = 0;  // mutated blocks that still validated
    std::size_t controls = 0;
    std::size_t false_rejects = 0;  // unmutated blocks that failed
};

// Flips one random byte of a serialized block per case and validates it
// against the trusted header; every other case is an unmutated control.
TamperResult tamper_suite(std::size_t cases, std::uint64_t seed, crypto::SchemeId scheme);

struct PruneResult {
    std::size_t blocks = 0;
    std::size_t rounds = 0;
    std::size_t pruned = 0;
    std::size_t violations = 0;  // body present or absent contrary to its expiries
    bool headers_retained = false;
    bool revalidates = false;
    bool index_consistent = false;
};

PruneResult pruning_suite(std::size_t blocks, std::uint64_t seed, crypto::SchemeId scheme);

struct AccessResult {
    std::size_t groups = 0;
    std::size_t requests = 0;
    std::size_t mutations = 0;
    std::size_t responses = 0;
    std::size_t denials = 0;
    std::size_t violations = 0;        // responses to subjects off the access list
    std::size_t wrongful_denials = 0;  // listed subjects refused
    std::size_t cross_attempts = 0;
    std::size_t cross_decryptions = 0;  // a token opened another group's payload
    std::size_t own_decrypt_failures = 0;
    bool expired_session_denied = false;
};

// Random grant, revoke and data-request schedules through a simulated
// deployment of the scenario's topology.
AccessResult access_suite(const sim::Scenario& scenario, std::size_t requests, std::uint64_t seed,
                          Coverage* coverage = nullptr);

struct CompromiseResult {
    std::uint64_t reports_under_attack = 0;
    std::uint64_t reports_honest = 0;
    std::uint64_t dropped_tx = 0;
    bool conserved = false;
};

// One server silently drops its gateways' candidates; the same run without
// the attack is the control.
CompromiseResult compromise_check(const sim::Scenario& scenario, std::uint64_t seed, Coverage* coverage = nullptr);

// Runs every check above with the scenario's adversarial settings. When
// out_dir is set, one recorded schedule per roster size is saved there and
// failing schedules go to out_dir/failures.
sim::CsvTable run_adversarial(const sim::Scenario& scenario, std::uint64_t seed,
                              const std::optional<std::filesystem::path>& out_dir, Coverage& coverage);

}  // namespace fogledger::harness
