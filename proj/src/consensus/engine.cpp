#include "fogledger/consensus/engine.hpp"

#include <stdexcept>

#include "fogledger/chain/merkle.hpp"
#include "fogledger/chain/validation.hpp"

namespace fogledger::consensus {

void Step::absorb(Step&& other) {
    for (auto& o : other.out) out.push_back(std::move(o));
    for (auto& c : other.committed) committed.push_back(std::move(c));
    for (auto& e : other.errors_sent) errors_sent.push_back(std::move(e));
    for (auto& e : other.errors_received) errors_received.push_back(std::move(e));
    for (auto r : other.block_add_rejects) block_add_rejects.push_back(r);
    dropped_envelopes += other.dropped_envelopes;
}

ServerConsensus::ServerConsensus(const crypto::CryptoSuite& suite, crypto::KeyPair self, ServerRoster roster,
                                 const chain::BlockHeader& genesis)
    : suite_(suite), self_(std::move(self)), roster_(std::move(roster)), state_(initial_state(genesis)) {
    if (!roster_.contains(self_.owner)) throw std::invalid_argument("server is not in its roster: " + self_.owner.id);
}

bool ServerConsensus::is_my_turn() const {
    return state_.phase == Phase::Idle && expected_proposer(roster_, state_) == self_.owner &&
           state_.signed_at.count(state_.height) == 0;
}

Step ServerConsensus::propose(const chain::Block& candidate, std::int64_t now) {
    if (!is_my_turn()) throw std::logic_error("propose called outside this server's turn");
    auto block = std::make_shared<chain::Block>(candidate);
    block->header.height = state_.height;
    block->header.prev_hash = state_.tip_digest;
    block->header.proposer = self_.owner;
    block->header.timestamp = now;
    block->header.body_hash = chain::hash_block_body(block->transactions);

    const Digest d = block->header.digest();
    state_.pending = block;
    state_.pending_digest = d;
    state_.phase = Phase::Proposed;
    state_.signed_at[state_.height] = d;
    state_.confirms.clear();
    state_.errors_received.clear();
    state_.confirms.emplace(self_.owner.id, suite_.sign(self_, confirm_message(state_.height, d)));

    Step step;
    step.out.push_back({std::nullopt, seal(suite_, self_, Propose{block})});
    if (state_.confirms.size() >= quorum_size(roster_.size())) {
        state_.phase = Phase::Committed;
        BlockAdd add{state_.height, block->header.block_id, d, {state_.confirms.begin()->second}};
        step.out.push_back({std::nullopt, seal(suite_, self_, std::move(add))});
        commit(block, step);
    }
    return step;
}

Step ServerConsensus::skip_turn() {
    if (!is_my_turn()) throw std::logic_error("skip_turn called outside this server's turn");
    Step step;
    step.out.push_back({std::nullopt, seal(suite_, self_, SkipTurn{state_.height, state_.turn})});
    state_.turn += 1;
    drain(step);
    return step;
}

Step ServerConsensus::handle(const ConsensusMsg& msg) {
    Step step;
    if (!verify_envelope(suite_, roster_, msg)) {
        step.dropped_envelopes = 1;
        return step;
    }
    dispatch(msg, step);
    return step;
}

void ServerConsensus::dispatch(const ConsensusMsg& msg, Step& step) {
    std::visit(
        [&](const auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, Propose>) on_propose_msg(msg, body, step);
            else if constexpr (std::is_same_v<T, Confirm>) on_confirm_msg(msg, body, step);
            else if constexpr (std::is_same_v<T, ErrorNotice>) on_error_msg(msg, body, step);
            else if constexpr (std::is_same_v<T, BlockAdd>) on_block_add_msg(msg, body, step);
            else on_skip_msg(msg, body, step);
        },
        msg.body);
}

const chain::Block* ServerConsensus::held(const Digest& digest) const {
    for (const auto& [d, b] : held_)
        if (d == digest) return b.get();
    if (state_.pending && state_.pending_digest == digest) return state_.pending.get();
    return nullptr;
}

void ServerConsensus::on_propose_msg(const ConsensusMsg& msg, const Propose& p, Step& step) {
    if (!p.block) return;
    const chain::Block& block = *p.block;
    const std::uint64_t h = block.header.height;
    if (h < state_.height) return;
    if (h > state_.height) {
        defer(msg);
        return;
    }

    // Keep any well-formed block that extends the tip, even one this server
    // declines to vote for, so a quorum announcement for it can be checked.
    const Digest d = block.header.digest();
    bool newly_held = false;
    if (block.header.prev_hash == state_.tip_digest && !held(d) && chain::validate_self_consistent(block, suite_)) {
        held_.emplace_back(d, p.block);
        newly_held = true;
    }

    ProposeVerdict verdict = on_propose(state_, roster_, suite_, self_, msg.sender, block);
    if (auto* c = std::get_if<Confirm>(&verdict)) {
        step.out.push_back({msg.sender, seal(suite_, self_, *c)});
    } else {
        const auto& err = std::get<ErrorNotice>(verdict);
        // A proposal from a later turn may simply be ahead of a skip notice.
        if (err.reason == ErrorReason::WrongProposer && msg.sender == block.header.proposer) {
            defer(msg);
        } else {
            step.errors_sent.push_back(err);
            step.out.push_back({msg.sender, seal(suite_, self_, err)});
        }
    }
    if (newly_held) drain(step);
}

void ServerConsensus::on_confirm_msg(const ConsensusMsg& msg, const Confirm& c, Step& step) {
    if (state_.phase != Phase::Proposed || c.height != state_.height) return;
    CollectResult r = collect_confirm(state_, roster_, suite_, msg.sender, c);
    if (r.status != CollectStatus::QuorumReached) return;
    auto block = state_.pending;
    BlockAdd add{state_.height, block->header.block_id, state_.pending_digest, std::move(r.bundle)};
    step.out.push_back({std::nullopt, seal(suite_, self_, std::move(add))});
    commit(block, step);
}

void ServerConsensus::on_error_msg(const ConsensusMsg& msg, const ErrorNotice& e, Step& step) {
    if (state_.phase != Phase::Proposed || e.height != state_.height || !state_.pending ||
        e.block_id != state_.pending->header.block_id)
        return;
    state_.errors_received.insert(msg.sender.id);
    step.errors_received.emplace_back(msg.sender, e);
}

void ServerConsensus::on_block_add_msg(const ConsensusMsg& msg, const BlockAdd& a, Step& step) {
    if (a.height < state_.height) return;
    if (a.height > state_.height) {
        defer(msg);
        return;
    }
    const chain::Block* b = held(a.block_digest);
    if (!b) {
        defer(msg);
        return;
    }
    BlockAddVerdict v = on_block_add(state_, roster_, suite_, a, b);
    if (!v.accepted) {
        step.block_add_rejects.push_back(v.reason);
        return;
    }
    chain::BlockPtr ptr;
    for (const auto& [d, held_block] : held_)
        if (d == a.block_digest) ptr = held_block;
    if (!ptr) ptr = state_.pending;
    commit(std::move(ptr), step);
}

void ServerConsensus::on_skip_msg(const ConsensusMsg& msg, const SkipTurn& s, Step& step) {
    if (s.height < state_.height || (s.height == state_.height && s.turn < state_.turn)) return;
    if (s.height > state_.height || s.turn > state_.turn) {
        defer(msg);
        return;
    }
    if (msg.sender != expected_proposer(roster_, state_)) return;
    state_.turn += 1;
    drain(step);
}

void ServerConsensus::commit(chain::BlockPtr block, Step& step) {
    apply_commit(state_, roster_, *block);
    held_.clear();
    step.committed.push_back(std::move(block));
    drain(step);
}

void ServerConsensus::defer(const ConsensusMsg& msg) {
    if (buffer_.size() >= kMaxBuffered) buffer_.erase(buffer_.begin());
    buffer_.push_back(msg);
}

void ServerConsensus::drain(Step& step) {
    if (draining_) return;
    draining_ = true;
    for (;;) {
        const auto h0 = state_.height;
        const auto t0 = state_.turn;
        const auto held0 = held_.size();
        std::vector<ConsensusMsg> pending;
        pending.swap(buffer_);
        for (const auto& m : pending) dispatch(m, step);
        if (state_.height == h0 && state_.turn == t0 && held_.size() == held0) break;
    }
    draining_ = false;
}

}  // namespace fogledger::consensus
