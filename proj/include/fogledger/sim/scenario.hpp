#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogledger/access/alerts.hpp"
#include "fogledger/crypto/signature.hpp"
#include "fogledger/sim/profiles.hpp"

namespace fogledger::sim {

// Message format: "source:line:column: field.path: problem".
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Placement { Fog, Cloud };
std::string_view placement_name(Placement p);

enum class Attach { Random, RoundRobin, All, Mesh };

struct TierSpec {
    std::string name;
    std::string profile;
    std::size_t count = 1;
};

struct LinkSpec {
    std::string from;
    std::string to;
    double latency_ms = 0;
    Attach attach = Attach::All;
};

struct RoleSpec {
    std::string devices = "EM";
    std::string gateways = "FLS";
    std::string servers = "Cloud";
    std::size_t servers_per_host = 1;
};

struct AppSpec {
    double sensing_rate_hz = 5;
    std::size_t client_batch = 50;
    double filter_instructions = 1e7;
    double storage_sync_ms = 45'000;
    std::string metric = "heart_rate";
    double value_mean = 78;
    double value_stddev = 18;
};

struct BlockchainSpec {
    crypto::SchemeId scheme = crypto::SchemeId::KeyedDigest;
    std::uint64_t key_seed = 1;
    std::int64_t block_period_ms = 100;
    std::int64_t skip_wait_ms = 100;
    std::int64_t cache_ttl_ms = 5'000;
    double due_time_multiplier = 3.0;
    std::int64_t tx_lifetime_ms = 3'600'000;
    std::int64_t session_lifetime_ms = 600'000;
    double sign_instructions = 1e5;
    double verify_instructions = 2e5;
    double hash_instructions_per_kb = 1e4;
    double lookup_instructions = 1e6;
};

struct RetrievalSpec {
    std::vector<double> sizes_kb = {500, 2000};
    std::size_t trials = 200;  // per size
    double hit_ratio = 0.78;
    std::size_t records_per_size = 2;
    double gap_ms = 100;
    double request_bytes = 256;
};

struct ScalingSpec {
    std::vector<std::size_t> device_counts = {150, 300, 500};
    double sample_interval_ms = 1000;
    double sample_bytes = 256;
    double duration_ms = 60'000;
};

struct AdversarialSpec {
    std::vector<std::size_t> server_counts = {4, 5, 7};
    std::size_t schedules = 500;
    std::size_t tamper_cases = 1000;
    std::size_t access_requests = 2000;
    std::size_t prune_blocks = 100;
    double network_drop = 0.02;
    double network_duplicate = 0.05;
    std::vector<std::size_t> double_sign_at = {4};
};

struct AlertSpec {
    std::string metric;
    access::Comparator comparator = access::Comparator::Greater;
    double threshold = 0;
    std::vector<std::string> notify;
};

struct Expectation {
    std::string metric;
    std::optional<double> min;
    std::optional<double> max;
    std::string where;  // source position, for reports
};

struct Scenario {
    std::string name;
    std::string source;
    std::uint64_t seed = 1;
    std::size_t runs = 1;
    double duration_ms = 500'000;
    std::map<std::string, DeviceProfile> profiles;
    std::vector<TierSpec> tiers;
    std::vector<LinkSpec> links;
    RoleSpec roles;
    std::map<Placement, std::map<std::string, std::string>> placement;  // module -> tier
    std::map<std::string, AppModuleSpec> modules;
    AppSpec app;
    BlockchainSpec blockchain;
    RetrievalSpec retrieval;
    ScalingSpec scaling;
    AdversarialSpec adversarial;
    std::vector<AlertSpec> alerts;
    // Keyed by preset name; the key "*" applies to every preset.
    std::map<std::string, std::vector<Expectation>> expectations;

    const TierSpec& tier(const std::string& name) const;
    const AppModuleSpec& module(const std::string& name) const;
    // Tier hosting a module under a placement.
    const std::string& host_tier(Placement p, const std::string& module) const;
    std::vector<Expectation> expectations_for(const std::string& preset) const;

    // Cross-field checks for topology-based runs (tier, profile and module
    // references, memory of co-placed modules). Throws ScenarioError.
    void validate_topology() const;
};

// Overrides are "dotted.path=value" pairs applied to the document before it
// is interpreted; sequence elements are addressed by index.
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>",
                        const std::vector<std::string>& overrides = {});
Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace fogledger::sim
