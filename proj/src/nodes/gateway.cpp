#include "fogledger/nodes/gateway.hpp"

#include "fogledger/chain/merkle.hpp"

#include <limits>

namespace fogledger::nodes {

namespace {
constexpr std::int64_t kNeverExpires = std::numeric_limits<std::int64_t>::max();
}

std::string_view reason_name(DenyReason r) {
    switch (r) {
        case DenyReason::AuthExpired: return "AuthExpired";
        case DenyReason::NotListed: return "NotListed";
        case DenyReason::UnknownGroup: return "UnknownGroup";
        case DenyReason::WrongScope: return "WrongScope";
        case DenyReason::NotFound: return "NotFound";
    }
    return "Unknown";
}

GatewayNode::GatewayNode(crypto::CryptoSuite& suite, crypto::KeyPair key, GatewayConfig config,
                         const chain::Block& genesis, access::ContractRegistry::KeyProvider keys)
    : suite_(suite),
      key_(key),
      config_(std::move(config)),
      contracts_(suite, keys),
      sessions_(suite, key),
      session_check_(suite),
      keys_(std::move(keys)) {
    headers_.append_header(genesis.header);
    local_.append_header(genesis.header);
}

Expected<chain::Transaction, NodeErrc> GatewayNode::register_device(const NodeAddress& device,
                                                                    const Credentials& credentials, std::int64_t now) {
    if (device.role != Role::IoTDevice) return unexpected(NodeErrc::BadCredentials);
    if (connected_.count(device.id) || pending_registration_.count(device.id) ||
        suite_.registry().contains(device.id))
        return unexpected(NodeErrc::AlreadyRegistered);
    if (credentials.enrollment.signer != config_.provisioner ||
        !suite_.verify(enrollment_message(device, credentials.public_key), credentials.enrollment))
        return unexpected(NodeErrc::BadCredentials);
    if (credentials.proof.signer != device ||
        !suite_.scheme().verify(registration_challenge(device, config_.address, credentials.public_key),
                                credentials.proof.bytes, credentials.public_key))
        return unexpected(NodeErrc::BadCredentials);

    DeviceRecord rec{device, credentials.public_key, config_.cluster, config_.address};
    chain::Transaction tx = chain::make_transaction(suite_, key_, "register/" + device.id, rec.serialize(),
                                                    std::string(chain::system_group::kRegistry), now, kNeverExpires);
    pending_registration_.insert(device.id);
    submit(tx);
    return tx;
}

void GatewayNode::add_user(const NodeAddress& user) { users_.insert(user.id); }

bool GatewayNode::is_member(const std::string& id) const { return connected_.count(id) || users_.count(id); }

void GatewayNode::set_device_group(const std::string& device_id, std::string group_id) {
    device_group_[device_id] = std::move(group_id);
}

std::string GatewayNode::group_for(const std::string& source_id) const {
    auto it = device_group_.find(source_id);
    return it != device_group_.end() ? it->second : "data/" + source_id;
}

Expected<crypto::SessionKey, NodeErrc> GatewayNode::authenticate(const NodeAddress& holder, std::int64_t now) {
    if (!is_member(holder.id)) return unexpected(NodeErrc::NotRegistered);
    return sessions_.issue_session_key(holder, config_.session_lifetime_ms, now);
}

Expected<IngestOutcome, NodeErrc> GatewayNode::ingest(const Sample& sample, const crypto::KeyPair& creator_key,
                                                      std::int64_t now) {
    if (!is_member(sample.source.id) || creator_key.owner != sample.source) return unexpected(NodeErrc::NotRegistered);
    const std::string group = group_for(sample.source.id);
    if (!keys_) return unexpected(NodeErrc::UnknownGroup);
    const crypto::GroupKey gk = keys_(group);

    IngestOutcome out;
    out.alerts = alerts_.evaluate(sample.source.id, sample.metric, sample.value, now);

    auto it = open_.find(sample.source.id);
    if (it != open_.end()) {
        OpenAggregate& agg = it->second;
        agg.samples.push_back(sample);
        chain::Transaction& tx = pool_[agg.pool_index];
        tx.payload = crypto::encrypt_group_payload(encode_samples(agg.samples), gk);
        tx.signature = suite_.sign(creator_key, tx.signing_bytes());
        out.tx = tx;
        out.aggregated = true;
        return out;
    }

    std::vector<Sample> samples{sample};
    chain::Transaction tx = chain::make_transaction(
        suite_, creator_key, config_.address.id + "/t" + std::to_string(tx_seq_++),
        crypto::encrypt_group_payload(encode_samples(samples), gk), group, now, now + config_.tx_lifetime_ms);
    open_.emplace(sample.source.id, OpenAggregate{pool_.size(), std::move(samples)});
    pool_.push_back(tx);
    out.tx = std::move(tx);
    return out;
}

void GatewayNode::submit(chain::Transaction tx) { pool_.push_back(std::move(tx)); }

std::optional<chain::Block> GatewayNode::flush(std::int64_t now) {
    if (pool_.empty() || now - last_flush_ < config_.block_period_ms) return std::nullopt;
    chain::Block b;
    b.transactions = std::move(pool_);
    pool_.clear();
    open_.clear();
    b.header.height = *headers_.tip_height() + 1;
    b.header.block_id = config_.address.id + "/b" + std::to_string(block_seq_++);
    b.header.prev_hash = headers_.tip_digest();
    b.header.body_hash = chain::hash_block_body(b.transactions);
    b.header.proposer = config_.address;
    b.header.origin_cluster = config_.cluster;
    b.header.timestamp = now;
    b.assembler = chain::AssemblerStamp{
        suite_.sign(key_, chain::assembler_message(b.header.block_id, b.header.origin_cluster, b.header.body_hash))};

    PendingAck ack{b.header.block_id, {}, now, now + due_interval()};
    for (const auto& t : b.transactions) ack.tx_ids.push_back(t.tx_id);
    pending_acks_[b.header.block_id] = std::move(ack);
    last_flush_ = now;
    return b;
}

std::int64_t GatewayNode::due_interval() const {
    return static_cast<std::int64_t>(config_.due_time_multiplier *
                                     static_cast<double>(config_.block_period_ms + config_.mean_rtt_ms));
}

Expected<NewBlockOutcome, NodeErrc> GatewayNode::on_new_block(const chain::BlockPtr& block, std::int64_t now) {
    NewBlockOutcome out;
    const std::uint64_t tip = *headers_.tip_height();
    const std::uint64_t h = block->header.height;
    if (h <= tip) return out;
    if (h > tip + 1) {
        reorder_.emplace(h, block);
        out.buffered = true;
        return out;
    }
    if (block->header.prev_hash != headers_.tip_digest() || !chain::validate_self_consistent(*block, suite_)) {
        ++invalid_blocks_;
        return unexpected(NodeErrc::InvalidBlock);
    }
    apply_block(block, now, out);
    while (!reorder_.empty()) {
        auto it = reorder_.begin();
        const std::uint64_t next = *headers_.tip_height() + 1;
        if (it->first < next) {
            reorder_.erase(it);
            continue;
        }
        if (it->first != next) break;
        chain::BlockPtr b = it->second;
        reorder_.erase(it);
        if (b->header.prev_hash != headers_.tip_digest() || !chain::validate_self_consistent(*b, suite_)) {
            ++invalid_blocks_;
            break;
        }
        apply_block(b, now, out);
    }
    out.forward_to.reserve(connected_.size());
    for (const auto& id : connected_) out.forward_to.push_back(NodeAddress{id, Role::IoTDevice});
    return out;
}

void GatewayNode::apply_block(const chain::BlockPtr& block, std::int64_t /*now*/, NewBlockOutcome& out) {
    headers_.append_header(block->header);
    local_.append_header(block->header);
    StoredAs stored = StoredAs::HeaderOnly;
    if (block->header.origin_cluster == config_.cluster) {
        local_.put_body(block);
        expiry_.add_block(*block);
        stored = StoredAs::Body;
    }
    apply_records(*block);
    if (pending_acks_.erase(block->header.block_id)) out.acknowledged.push_back(block->header.block_id);
    out.applied.push_back({block, stored});
}

void GatewayNode::apply_records(const chain::Block& block) {
    for (const auto& tx : block.transactions) {
        if (!chain::is_system_group(tx.access_group)) {
            if (block.header.origin_cluster == config_.cluster) contracts_.note_data_tx(tx.access_group, tx.tx_id);
            continue;
        }
        try {
            if (tx.access_group == chain::system_group::kRegistry) {
                if (tx.creator.role != Role::Gateway) continue;
                DeviceRecord rec = DeviceRecord::deserialize(tx.payload);
                suite_.registry().add(rec.device, rec.public_key);
                if (rec.gateway == config_.address) {
                    pending_registration_.erase(rec.device.id);
                    connected_.insert(rec.device.id);
                }
            } else if (tx.access_group == chain::system_group::kHandover) {
                if (tx.creator.role != Role::Gateway) continue;
                HandoverRecord rec = HandoverRecord::deserialize(tx.payload);
                if (rec.from == config_.address) connected_.erase(rec.device.id);
                if (rec.to == config_.address) connected_.insert(rec.device.id);
            } else {
                contracts_.apply(tx);
            }
        } catch (const DecodeError&) {
            // A malformed system record is ignored; the block itself is valid.
        }
    }
}

RequestOutcome GatewayNode::handle_data_request(const DataRequest& request, std::int64_t now) {
    if (request.session.holder != request.requester ||
        session_check_.check(request.session, now) != crypto::SessionStatus::Live)
        return Denied{request.request_id, DenyReason::AuthExpired};
    if (request.tx_ids.empty()) return Denied{request.request_id, DenyReason::NotFound};

    chain::BlockPtr body;
    if (const chain::ExpiryEntry* e = expiry_.find(request.tx_ids.front())) body = local_.body_by_id(e->block_id);
    const chain::Transaction* first = body ? body->find_tx(request.tx_ids.front()) : nullptr;
    bool hit = first != nullptr;
    std::vector<crypto::DataRef> refs;
    if (hit) {
        for (const auto& id : request.tx_ids) {
            const chain::Transaction* t = body->find_tx(id);
            if (!t || t->access_group != first->access_group) {
                hit = false;
                break;
            }
            refs.push_back({body->header.block_id, id});
        }
    }
    if (!hit) return Forwarded{request, config_.upstream};

    auto token = contracts_.check_access(first->access_group, request.requester,
                                         access::Evaluator{config_.address, config_.cluster}, now, std::move(refs));
    if (token) return DataResponse{request.request_id, body, std::move(token).value(), config_.address};
    switch (token.error()) {
        case access::AccessErrc::WrongScope: return Forwarded{request, config_.upstream};
        case access::AccessErrc::UnknownGroup: return Denied{request.request_id, DenyReason::UnknownGroup};
        default: return Denied{request.request_id, DenyReason::NotListed};
    }
}

std::vector<MissingBlockReport> GatewayNode::detect_missing_blocks(std::int64_t now) {
    std::vector<MissingBlockReport> out;
    for (auto it = pending_acks_.begin(); it != pending_acks_.end();) {
        if (it->second.due_at < now) {
            out.push_back({it->second.block_id, it->second.tx_ids, config_.address, config_.upstream,
                           it->second.flushed_at, now});
            it = pending_acks_.erase(it);
        } else {
            ++it;
        }
    }
    return out;
}

std::vector<std::string> GatewayNode::prune(std::int64_t now) { return chain::prune_expired(local_, expiry_, now); }

bool GatewayNode::detach(const std::string& device_id) {
    bool had = connected_.erase(device_id) > 0;
    open_.erase(device_id);
    return had;
}

void GatewayNode::attach(const NodeAddress& device, std::string group_id) {
    connected_.insert(device.id);
    device_group_[device.id] = std::move(group_id);
}

Expected<chain::Transaction, NodeErrc> handover(const NodeAddress& device, GatewayNode& from, GatewayNode& to,
                                                std::int64_t now) {
    if (!from.connected_devices().count(device.id)) return unexpected(NodeErrc::NotAttached);
    std::string group = from.group_for(device.id);
    from.detach(device.id);
    to.attach(device, std::move(group));
    HandoverRecord rec{device, from.address(), to.address(), now};
    chain::Transaction tx =
        chain::make_transaction(to.suite(), to.key(),
                                "handover/" + device.id + "/" + std::to_string(now), rec.serialize(),
                                std::string(chain::system_group::kHandover), now, kNeverExpires);
    to.submit(tx);
    return tx;
}

}  // namespace fogledger::nodes
