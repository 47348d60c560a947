#pragma once

#include <deque>
#include <map>
#include <optional>

#include "fogledger/access/registry.hpp"
#include "fogledger/chain/store.hpp"
#include "fogledger/consensus/engine.hpp"
#include "fogledger/nodes/requests.hpp"

namespace fogledger::nodes {

struct CloudConfig {
    NodeAddress address;
    std::vector<NodeAddress> served_gateways;
    std::int64_t skip_wait_ms = 100;
};

struct CloudStep {
    consensus::Step step;
    std::optional<std::uint64_t> proposed_height;
    std::vector<std::uint64_t> own_commits;  // heights this server proposed and saw committed
    std::vector<NodeAddress> fan_out;        // gateways to receive step.committed
};

/// Cloud server: keeps the full chain, queues candidate blocks from the
/// gateways it serves, and runs its seat in the server consensus.
class CloudServerNode {
public:
    CloudServerNode(crypto::CryptoSuite& suite, crypto::KeyPair key, CloudConfig config, consensus::ServerRoster roster,
                    const chain::Block& genesis, access::ContractRegistry::KeyProvider keys);

    const NodeAddress& address() const { return config_.address; }
    const CloudConfig& config() const { return config_; }

    // Queues a candidate if it comes from a served gateway, carries that
    // gateway's assembler stamp and is internally consistent.
    bool accept_candidate(const chain::Block& candidate, const NodeAddress& from);
    std::size_t queued() const { return queue_.size(); }

    // Proposes or skips when it is this server's turn.
    CloudStep poll(std::int64_t now);
    // Time at which poll() would next act without new input.
    std::optional<std::int64_t> next_deadline() const;

    CloudStep on_message(const consensus::ConsensusMsg& msg, std::int64_t now);

    RequestOutcome handle_data_request(const DataRequest& request, std::int64_t now);

    // Misbehaviour switch used by compromisation scenarios: silently discard
    // every candidate a gateway submits.
    void set_drop_candidates(bool drop) { drop_candidates_ = drop; }
    std::size_t dropped_candidates() const { return dropped_; }

    const chain::ChainStore& full_store() const { return full_; }
    const consensus::ServerConsensus& engine() const { return engine_; }
    access::ContractRegistry& contracts() { return contracts_; }

private:
    void absorb(consensus::Step&& step, std::int64_t now, CloudStep& out);
    void on_committed(const chain::BlockPtr& block);

    crypto::CryptoSuite& suite_;
    crypto::KeyPair key_;
    CloudConfig config_;
    consensus::ServerConsensus engine_;
    chain::ChainStore full_{chain::Tier::Full};
    access::ContractRegistry contracts_;
    crypto::SessionVerifier session_check_;
    std::map<std::string, std::uint64_t> tx_height_;
    std::deque<chain::Block> queue_;
    std::optional<std::int64_t> turn_since_;
    std::optional<std::uint64_t> open_proposal_;
    bool drop_candidates_ = false;
    std::size_t dropped_ = 0;
};

}  // namespace fogledger::nodes
