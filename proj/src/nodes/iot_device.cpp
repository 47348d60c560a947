#include "fogledger/nodes/iot_device.hpp"

#include "fogledger/chain/merkle.hpp"

namespace fogledger::nodes {

std::string_view status_name(DeviceBlockStatus s) {
    switch (s) {
        case DeviceBlockStatus::Stored: return "Stored";
        case DeviceBlockStatus::Buffered: return "Buffered";
        case DeviceBlockStatus::Stale: return "Stale";
        case DeviceBlockStatus::Tampered: return "Tampered";
    }
    return "Unknown";
}

IoTDeviceNode::IoTDeviceNode(DeviceConfig config, const chain::Block& genesis) : config_(std::move(config)) {
    store_.append_header(genesis.header);
}

bool IoTDeviceNode::append_checked(const chain::BlockPtr& block, std::int64_t now) {
    if (block->transactions.empty() || chain::hash_block_body(block->transactions) != block->header.body_hash ||
        store_.append_header(block->header) != chain::AppendResult::Ok) {
        ++tamper_alarms_;
        return false;
    }
    store_.cache_body(block, now);
    return true;
}

DeviceBlockResult IoTDeviceNode::on_block(const chain::BlockPtr& block, std::int64_t now) {
    DeviceBlockResult r;
    const std::uint64_t tip = *store_.tip_height();
    const std::uint64_t h = block->header.height;
    if (h <= tip) {
        r.status = DeviceBlockStatus::Stale;
        return r;
    }
    if (h > tip + 1) {
        reorder_.emplace(h, block);
        r.status = DeviceBlockStatus::Buffered;
        return r;
    }
    if (!append_checked(block, now)) {
        r.status = DeviceBlockStatus::Tampered;
        return r;
    }
    ++r.appended;
    r.appended += drain(now);
    return r;
}

std::size_t IoTDeviceNode::drain(std::int64_t now) {
    std::size_t appended = 0;
    while (!reorder_.empty()) {
        auto it = reorder_.begin();
        const std::uint64_t next = *store_.tip_height() + 1;
        if (it->first < next) {
            reorder_.erase(it);
            continue;
        }
        if (it->first != next) break;
        chain::BlockPtr b = it->second;
        reorder_.erase(it);
        if (!append_checked(b, now)) break;
        ++appended;
    }
    return appended;
}

std::size_t IoTDeviceNode::sync_headers(const chain::ChainStore& gateway_headers, std::int64_t now) {
    std::size_t added = 0;
    const auto their_tip = gateway_headers.tip_height();
    if (!their_tip) return 0;
    for (std::uint64_t h = *store_.tip_height() + 1; h <= *their_tip; ++h) {
        const chain::BlockHeader* header = gateway_headers.header_at(h);
        if (!header || store_.append_header(*header) != chain::AppendResult::Ok) break;
        ++added;
    }
    added += drain(now);
    return added;
}

chain::Validation IoTDeviceNode::validate_retrieved(const chain::Block& block, const crypto::CryptoSuite& suite) const {
    const chain::BlockHeader* h = store_.header_at(block.header.height);
    if (!h) return chain::Validation::fail(chain::InvalidReason::HeaderMismatch);
    return chain::validate_block(block, *h, suite);
}

std::vector<Sample> IoTDeviceNode::complete_handover(const NodeAddress& new_gateway) {
    config_.gateway = new_gateway;
    in_handover_ = false;
    std::vector<Sample> out;
    out.swap(held_);
    return out;
}

}  // namespace fogledger::nodes
