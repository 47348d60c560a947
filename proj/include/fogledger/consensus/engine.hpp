#pragma once

#include <optional>

#include "fogledger/consensus/protocol.hpp"

namespace fogledger::consensus {

struct Outbound {
    std::optional<NodeAddress> to;  // empty: every other roster member
    ConsensusMsg msg;
};

struct Step {
    std::vector<Outbound> out;
    std::vector<chain::BlockPtr> committed;
    std::vector<ErrorNotice> errors_sent;
    std::vector<std::pair<NodeAddress, ErrorNotice>> errors_received;
    std::vector<RejectReason> block_add_rejects;
    std::size_t dropped_envelopes = 0;

    void absorb(Step&& other);
};

/// One cloud server's side of the rotating-proposer protocol. Messages for
/// heights or turns not reached yet, and block announcements that arrive
/// before their block, are held back and retried whenever state advances.
class ServerConsensus {
public:
    static constexpr std::size_t kMaxBuffered = 4096;

    ServerConsensus(const crypto::CryptoSuite& suite, crypto::KeyPair self, ServerRoster roster,
                    const chain::BlockHeader& genesis);

    const NodeAddress& self() const { return self_.owner; }
    const ServerRoster& roster() const { return roster_; }
    const ConsensusState& state() const { return state_; }
    std::size_t buffered() const { return buffer_.size(); }

    // True when this server owns the current turn and has not yet voted at
    // the current height.
    bool is_my_turn() const;

    // Re-stamps height, link, proposer and timestamp on the candidate and
    // opens a round. Pre: is_my_turn().
    Step propose(const chain::Block& candidate, std::int64_t now);

    // Gives up the current turn with nothing to propose. Pre: is_my_turn().
    Step skip_turn();

    Step handle(const ConsensusMsg& msg);

private:
    void dispatch(const ConsensusMsg& msg, Step& step);
    void on_propose_msg(const ConsensusMsg& msg, const Propose& p, Step& step);
    void on_confirm_msg(const ConsensusMsg& msg, const Confirm& c, Step& step);
    void on_error_msg(const ConsensusMsg& msg, const ErrorNotice& e, Step& step);
    void on_block_add_msg(const ConsensusMsg& msg, const BlockAdd& a, Step& step);
    void on_skip_msg(const ConsensusMsg& msg, const SkipTurn& s, Step& step);
    void commit(chain::BlockPtr block, Step& step);
    void defer(const ConsensusMsg& msg);
    void drain(Step& step);
    const chain::Block* held(const Digest& digest) const;

    const crypto::CryptoSuite& suite_;
    crypto::KeyPair self_;
    ServerRoster roster_;
    ConsensusState state_;
    std::vector<ConsensusMsg> buffer_;
    std::vector<std::pair<Digest, chain::BlockPtr>> held_;
    bool draining_ = false;
};

}  // namespace fogledger::consensus
