#include "fogledger/nodes/cloud_server.hpp"

#include <algorithm>

#include "fogledger/chain/validation.hpp"
#include "fogledger/nodes/records.hpp"

namespace fogledger::nodes {

CloudServerNode::CloudServerNode(crypto::CryptoSuite& suite, crypto::KeyPair key, CloudConfig config,
                                 consensus::ServerRoster roster, const chain::Block& genesis,
                                 access::ContractRegistry::KeyProvider keys)
    : suite_(suite),
      key_(key),
      config_(std::move(config)),
      engine_(suite, key, std::move(roster), genesis.header),
      contracts_(suite, std::move(keys)),
      session_check_(suite) {
    full_.append_header(genesis.header);
    full_.put_body(std::make_shared<const chain::Block>(genesis));
}

bool CloudServerNode::accept_candidate(const chain::Block& candidate, const NodeAddress& from) {
    if (std::find(config_.served_gateways.begin(), config_.served_gateways.end(), from) ==
        config_.served_gateways.end())
        return false;
    if (!candidate.assembler || candidate.assembler->signature.signer != from) return false;
    if (!chain::validate_self_consistent(candidate, suite_)) return false;
    if (drop_candidates_) {
        ++dropped_;
        return true;
    }
    queue_.push_back(candidate);
    return true;
}

std::optional<std::int64_t> CloudServerNode::next_deadline() const {
    if (!engine_.is_my_turn() || !queue_.empty() || !turn_since_) return std::nullopt;
    return *turn_since_ + config_.skip_wait_ms;
}

CloudStep CloudServerNode::poll(std::int64_t now) {
    CloudStep out;
    if (!engine_.is_my_turn()) {
        turn_since_.reset();
        return out;
    }
    if (!turn_since_) turn_since_ = now;
    if (!queue_.empty()) {
        chain::Block candidate = std::move(queue_.front());
        queue_.pop_front();
        const std::uint64_t h = engine_.state().height;
        turn_since_.reset();
        open_proposal_ = h;
        out.proposed_height = h;
        absorb(engine_.propose(candidate, now), now, out);
    } else if (now - *turn_since_ >= config_.skip_wait_ms) {
        turn_since_.reset();
        absorb(engine_.skip_turn(), now, out);
    }
    return out;
}

CloudStep CloudServerNode::on_message(const consensus::ConsensusMsg& msg, std::int64_t now) {
    CloudStep out;
    absorb(engine_.handle(msg), now, out);
    return out;
}

void CloudServerNode::absorb(consensus::Step&& step, std::int64_t /*now*/, CloudStep& out) {
    for (const auto& b : step.committed) {
        on_committed(b);
        if (b->header.proposer == config_.address) out.own_commits.push_back(b->header.height);
        if (open_proposal_ && *open_proposal_ <= b->header.height) open_proposal_.reset();
    }
    if (!step.committed.empty()) out.fan_out = config_.served_gateways;
    out.step.absorb(std::move(step));
}

void CloudServerNode::on_committed(const chain::BlockPtr& block) {
    full_.append_header(block->header);
    full_.put_body(block);
    for (const auto& tx : block->transactions) {
        tx_height_[tx.tx_id] = block->header.height;
        if (tx.access_group == chain::system_group::kRegistry) {
            try {
                DeviceRecord rec = DeviceRecord::deserialize(tx.payload);
                suite_.registry().add(rec.device, rec.public_key);
            } catch (const DecodeError&) {
            }
        } else if (chain::is_system_group(tx.access_group)) {
            contracts_.apply(tx);
        }
    }
}

RequestOutcome CloudServerNode::handle_data_request(const DataRequest& request, std::int64_t now) {
    if (request.session.holder != request.requester ||
        session_check_.check(request.session, now) != crypto::SessionStatus::Live)
        return Denied{request.request_id, DenyReason::AuthExpired};
    if (request.tx_ids.empty()) return Denied{request.request_id, DenyReason::NotFound};
    auto it = tx_height_.find(request.tx_ids.front());
    if (it == tx_height_.end()) return Denied{request.request_id, DenyReason::NotFound};
    chain::BlockPtr body = full_.body(it->second);
    const chain::Transaction* first = body->find_tx(request.tx_ids.front());
    std::vector<crypto::DataRef> refs;
    for (const auto& id : request.tx_ids) {
        const chain::Transaction* t = body->find_tx(id);
        if (!t || t->access_group != first->access_group) return Denied{request.request_id, DenyReason::NotFound};
        refs.push_back({body->header.block_id, id});
    }
    auto token = contracts_.check_access(first->access_group, request.requester,
                                         access::Evaluator{config_.address, {}}, now, std::move(refs));
    if (token) return DataResponse{request.request_id, body, std::move(token).value(), config_.address};
    if (token.error() == access::AccessErrc::UnknownGroup) return Denied{request.request_id, DenyReason::UnknownGroup};
    return Denied{request.request_id, DenyReason::NotListed};
}

}  // namespace fogledger::nodes
