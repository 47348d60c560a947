#pragma once

#include <map>
#include <vector>

#include "fogledger/chain/store.hpp"
#include "fogledger/chain/validation.hpp"
#include "fogledger/nodes/records.hpp"

namespace fogledger::nodes {

struct DeviceConfig {
    NodeAddress address;
    NodeAddress gateway;
    std::int64_t cache_ttl_ms = 5'000;
};

enum class DeviceBlockStatus { Stored, Buffered, Stale, Tampered };
std::string_view status_name(DeviceBlockStatus s);

struct DeviceBlockResult {
    DeviceBlockStatus status = DeviceBlockStatus::Stored;
    std::size_t appended = 0;
};

/// Resource-limited device: keeps the header chain and caches recent
/// bodies briefly. Blocks are checked by rehashing the body against the
/// header; signature checks are left to the fog and cloud tiers.
class IoTDeviceNode {
public:
    IoTDeviceNode(DeviceConfig config, const chain::Block& genesis);

    const NodeAddress& address() const { return config_.address; }
    const NodeAddress& gateway() const { return config_.gateway; }
    void set_gateway(const NodeAddress& gw) { config_.gateway = gw; }

    DeviceBlockResult on_block(const chain::BlockPtr& block, std::int64_t now);
    // Copies headers past the local tip from the gateway's header chain (each
    // must link), then drains buffered blocks that now fit. Returns the
    // number of headers added.
    std::size_t sync_headers(const chain::ChainStore& gateway_headers, std::int64_t now);
    std::size_t buffered() const { return reorder_.size(); }

    // Checks a block fetched later (e.g. after the gateway pruned it)
    // against the stored header at its height.
    chain::Validation validate_retrieved(const chain::Block& block, const crypto::CryptoSuite& suite) const;

    std::size_t evict(std::int64_t now) { return store_.evict_cache(now, config_.cache_ttl_ms); }
    chain::BlockPtr cached(const std::string& block_id, std::int64_t now) const {
        return store_.cached(block_id, now, config_.cache_ttl_ms);
    }

    // While a handover is in progress samples are held locally.
    void begin_handover() { in_handover_ = true; }
    bool in_handover() const { return in_handover_; }
    void hold(Sample s) { held_.push_back(std::move(s)); }
    std::vector<Sample> complete_handover(const NodeAddress& new_gateway);

    const chain::ChainStore& header_store() const { return store_; }
    std::size_t tamper_alarms() const { return tamper_alarms_; }

private:
    DeviceConfig config_;
    chain::ChainStore store_{chain::Tier::HeaderOnly};
    std::map<std::uint64_t, chain::BlockPtr> reorder_;
    std::vector<Sample> held_;
    bool in_handover_ = false;
    std::size_t tamper_alarms_ = 0;

    bool append_checked(const chain::BlockPtr& block, std::int64_t now);
    std::size_t drain(std::int64_t now);
};

}  // namespace fogledger::nodes
