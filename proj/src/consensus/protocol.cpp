#include "fogledger/consensus/protocol.hpp"

#include <algorithm>

#include "fogledger/chain/validation.hpp"

namespace fogledger::consensus {

ConsensusState initial_state(const chain::BlockHeader& genesis) {
    ConsensusState s;
    s.tip_height = genesis.height;
    s.tip_digest = genesis.digest();
    s.height = genesis.height + 1;
    s.turn = genesis.height + 1;
    return s;
}

const NodeAddress& expected_proposer(const ServerRoster& roster, const ConsensusState& state) {
    return proposer_for_height(roster, state.turn);
}

std::string_view reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::UnknownBlock: return "UnknownBlock";
        case RejectReason::InsufficientQuorum: return "InsufficientQuorum";
        case RejectReason::InvalidSignature: return "InvalidSignature";
        case RejectReason::Stale: return "Stale";
        case RejectReason::BadLink: return "BadLink";
    }
    return "Unknown";
}

ProposeVerdict on_propose(ConsensusState& state, const ServerRoster& roster, const crypto::CryptoSuite& suite,
                          const crypto::KeyPair& self, const NodeAddress& sender, const chain::Block& block) {
    const auto& h = block.header;
    auto error = [&](ErrorReason r) { return ErrorNotice{h.height, h.block_id, r}; };

    if (h.height != state.height) return error(ErrorReason::WrongHeight);
    if (h.prev_hash != state.tip_digest) return error(ErrorReason::BadLink);
    if (sender != h.proposer || h.proposer != expected_proposer(roster, state)) return error(ErrorReason::WrongProposer);

    auto v = chain::validate_self_consistent(block, suite);
    switch (v.reason) {
        case chain::InvalidReason::None: break;
        case chain::InvalidReason::BodyHashMismatch: return error(ErrorReason::BodyHashMismatch);
        case chain::InvalidReason::BadSignature:
        case chain::InvalidReason::BadAssemblerSignature: return error(ErrorReason::BadTxSignature);
        default: return error(ErrorReason::Malformed);
    }

    const Digest d = h.digest();
    auto prior = state.signed_at.find(h.height);
    if (prior != state.signed_at.end() && prior->second != d) return error(ErrorReason::Equivocation);
    state.signed_at[h.height] = d;

    Confirm c;
    c.height = h.height;
    c.block_id = h.block_id;
    c.block_digest = d;
    c.signature = suite.sign(self, confirm_message(h.height, d));
    return c;
}

CollectResult collect_confirm(ConsensusState& state, const ServerRoster& roster, const crypto::CryptoSuite& suite,
                              const NodeAddress& from, const Confirm& confirm) {
    CollectResult r;
    if (state.phase != Phase::Proposed || !roster.contains(from) || confirm.signature.signer != from ||
        confirm.height != state.height || confirm.block_digest != state.pending_digest ||
        state.errors_received.count(from.id)) {
        r.status = CollectStatus::Rejected;
        return r;
    }
    if (state.confirms.count(from.id)) {
        r.status = CollectStatus::Duplicate;
        return r;
    }
    if (!suite.verify(confirm_message(state.height, state.pending_digest), confirm.signature)) {
        r.status = CollectStatus::Rejected;
        return r;
    }
    state.confirms.emplace(from.id, confirm.signature);
    if (state.confirms.size() < quorum_size(roster.size())) return r;

    state.phase = Phase::Committed;
    r.status = CollectStatus::QuorumReached;
    for (const auto& [_, sig] : state.confirms) r.bundle.push_back(sig);
    return r;
}

BlockAddVerdict on_block_add(const ConsensusState& state, const ServerRoster& roster, const crypto::CryptoSuite& suite,
                             const BlockAdd& msg, const chain::Block* held) {
    BlockAddVerdict v;
    if (msg.height < state.height) {
        v.reason = RejectReason::Stale;
        return v;
    }
    if (!held || held->header.height != msg.height || held->header.block_id != msg.block_id ||
        held->header.digest() != msg.block_digest) {
        v.reason = RejectReason::UnknownBlock;
        return v;
    }
    if (msg.height != state.height || held->header.prev_hash != state.tip_digest) {
        v.reason = RejectReason::BadLink;
        return v;
    }

    const Bytes payload = confirm_message(msg.height, msg.block_digest);
    std::set<std::string> counted;
    std::size_t invalid = 0;
    for (const auto& sig : msg.bundle) {
        if (counted.count(sig.signer.id)) continue;
        if (!roster.contains(sig.signer) || !suite.verify(payload, sig)) {
            ++invalid;
            continue;
        }
        counted.insert(sig.signer.id);
    }
    v.valid_signers = counted.size();
    if (counted.size() >= quorum_size(roster.size())) {
        v.accepted = true;
        return v;
    }
    v.reason = invalid > 0 ? RejectReason::InvalidSignature : RejectReason::InsufficientQuorum;
    return v;
}

void apply_commit(ConsensusState& state, const ServerRoster& roster, const chain::Block& block) {
    state.tip_height = block.header.height;
    state.tip_digest = block.header.digest();
    state.height = block.header.height + 1;
    if (auto idx = roster.index_of(block.header.proposer.id)) {
        const std::uint64_t n = roster.size();
        std::uint64_t t = state.turn;
        while (t % n != *idx) ++t;
        state.turn = t + 1;
    } else {
        state.turn += 1;
    }
    state.phase = Phase::Idle;
    state.pending.reset();
    state.pending_digest = Digest{};
    state.confirms.clear();
    state.errors_received.clear();
    state.signed_at.erase(state.signed_at.begin(), state.signed_at.lower_bound(state.height));
}

}  // namespace fogledger::consensus
