#pragma once

#include <limits>
#include <map>
#include <set>

#include "fogledger/access/alerts.hpp"
#include "fogledger/access/registry.hpp"
#include "fogledger/chain/expiry_index.hpp"
#include "fogledger/chain/validation.hpp"
#include "fogledger/nodes/records.hpp"
#include "fogledger/nodes/requests.hpp"

namespace fogledger::nodes {

struct GatewayConfig {
    NodeAddress address;
    std::string cluster;
    NodeAddress upstream;
    NodeAddress provisioner;
    std::int64_t block_period_ms = 100;
    std::int64_t mean_rtt_ms = 50;
    double due_time_multiplier = 3.0;
    std::int64_t tx_lifetime_ms = 3'600'000;
    std::int64_t session_lifetime_ms = 600'000;
};

struct IngestOutcome {
    chain::Transaction tx;
    bool aggregated = false;  // true when the sample joined an already pooled transaction
    std::vector<access::AlertEvent> alerts;
};

struct PendingAck {
    std::string block_id;
    std::vector<std::string> tx_ids;
    std::int64_t flushed_at = 0;
    std::int64_t due_at = 0;
};

struct MissingBlockReport {
    std::string block_id;
    std::vector<std::string> tx_ids;
    NodeAddress gateway;
    NodeAddress upstream;
    std::int64_t flushed_at = 0;
    std::int64_t detected_at = 0;
};

enum class StoredAs { Body, HeaderOnly };

struct AppliedBlock {
    chain::BlockPtr block;
    StoredAs stored = StoredAs::HeaderOnly;
};

struct NewBlockOutcome {
    std::vector<AppliedBlock> applied;  // in height order; several when a gap closes
    std::vector<NodeAddress> forward_to;
    std::vector<std::string> acknowledged;
    bool buffered = false;
};

/// Fog gateway for one cluster: assembles local transactions into candidate
/// blocks, keeps bodies of its own cluster's committed blocks and headers of
/// all others, and answers data requests from the local chain.
class GatewayNode {
public:
    GatewayNode(crypto::CryptoSuite& suite, crypto::KeyPair key, GatewayConfig config,
                const chain::Block& genesis, access::ContractRegistry::KeyProvider keys);

    const GatewayConfig& config() const { return config_; }
    const NodeAddress& address() const { return config_.address; }

    // Membership. Devices join through register_device and become usable
    // once the registration record commits; cluster users are added directly.
    Expected<chain::Transaction, NodeErrc> register_device(const NodeAddress& device, const Credentials& credentials,
                                                           std::int64_t now);
    void add_user(const NodeAddress& user);
    bool is_member(const std::string& id) const;
    const std::set<std::string>& connected_devices() const { return connected_; }
    void set_device_group(const std::string& device_id, std::string group_id);
    std::string group_for(const std::string& source_id) const;

    Expected<crypto::SessionKey, NodeErrc> authenticate(const NodeAddress& holder, std::int64_t now);

    // Builds (or extends) the pending transaction for the sample's source.
    // Samples from one source between two flushes share one transaction.
    Expected<IngestOutcome, NodeErrc> ingest(const Sample& sample, const crypto::KeyPair& creator_key,
                                             std::int64_t now);
    // Queues a signed record (registration, contract, grant, handover, raw data).
    void submit(chain::Transaction tx);
    std::size_t pool_size() const { return pool_.size(); }
    const std::vector<chain::Transaction>& pool() const { return pool_; }

    // Candidate block from the pool, or nothing if the pool is empty or a
    // block period has not passed since the last flush.
    std::optional<chain::Block> flush(std::int64_t now);

    // Handles a committed block from upstream. Blocks ahead of the tip are
    // held until the gap closes; blocks at or below the tip are ignored.
    Expected<NewBlockOutcome, NodeErrc> on_new_block(const chain::BlockPtr& block, std::int64_t now);

    RequestOutcome handle_data_request(const DataRequest& request, std::int64_t now);

    // Reports (once) every flushed block not seen committed by its due time.
    std::vector<MissingBlockReport> detect_missing_blocks(std::int64_t now);
    std::int64_t due_interval() const;
    const std::map<std::string, PendingAck>& pending_acks() const { return pending_acks_; }

    std::vector<std::string> prune(std::int64_t now);

    // Handover support, driven by handover().
    bool detach(const std::string& device_id);
    void attach(const NodeAddress& device, std::string group_id);

    const chain::ChainStore& header_store() const { return headers_; }
    const chain::ChainStore& local_store() const { return local_; }
    const chain::ExpiryIndex& expiry_index() const { return expiry_; }
    access::ContractRegistry& contracts() { return contracts_; }
    const access::ContractRegistry& contracts() const { return contracts_; }
    access::AlertEngine& alerts() { return alerts_; }
    const crypto::KeyPair& key() const { return key_; }
    crypto::CryptoSuite& suite() const { return suite_; }
    std::size_t buffered_blocks() const { return reorder_.size(); }
    std::size_t invalid_blocks() const { return invalid_blocks_; }

private:
    void apply_block(const chain::BlockPtr& block, std::int64_t now, NewBlockOutcome& out);
    void apply_records(const chain::Block& block);

    crypto::CryptoSuite& suite_;
    crypto::KeyPair key_;
    GatewayConfig config_;
    chain::ChainStore headers_{chain::Tier::HeaderOnly};
    chain::ChainStore local_{chain::Tier::Local};
    chain::ExpiryIndex expiry_;
    access::ContractRegistry contracts_;
    access::AlertEngine alerts_;
    crypto::SessionIssuer sessions_;
    crypto::SessionVerifier session_check_;
    access::ContractRegistry::KeyProvider keys_;

    std::set<std::string> connected_;
    std::set<std::string> users_;
    std::set<std::string> pending_registration_;
    std::map<std::string, std::string> device_group_;

    std::vector<chain::Transaction> pool_;
    struct OpenAggregate {
        std::size_t pool_index;
        std::vector<Sample> samples;
    };
    std::map<std::string, OpenAggregate> open_;
    std::int64_t last_flush_ = std::numeric_limits<std::int64_t>::min() / 2;
    std::uint64_t tx_seq_ = 0;
    std::uint64_t block_seq_ = 0;

    std::map<std::string, PendingAck> pending_acks_;
    std::map<std::uint64_t, chain::BlockPtr> reorder_;
    std::size_t invalid_blocks_ = 0;
};

// Moves a device between gateways: detaches it from `from`, attaches it to
// `to`, and queues a handover record at `to`. Fails with NotAttached when the
// device is not connected to `from`.
Expected<chain::Transaction, NodeErrc> handover(const NodeAddress& device, GatewayNode& from, GatewayNode& to,
                                                std::int64_t now);

}  // namespace fogledger::nodes
