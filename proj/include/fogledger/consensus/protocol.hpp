#pragma once

#include <map>
#include <set>

#include "fogledger/consensus/messages.hpp"

namespace fogledger::consensus {

enum class Phase { Idle, Proposed, Committed };

/// Per-server round state. `height` is the height being decided; `turn`
/// counts proposal slots (a skipped slot advances turn but not height).
struct ConsensusState {
    std::uint64_t height = 1;
    std::uint64_t turn = 1;
    Phase phase = Phase::Idle;
    chain::BlockPtr pending;
    Digest pending_digest{};
    std::map<std::string, crypto::Signature> confirms;
    std::set<std::string> errors_received;
    std::uint64_t tip_height = 0;
    Digest tip_digest{};
    // The single block digest this server has signed at each open height.
    std::map<std::uint64_t, Digest> signed_at;
};

ConsensusState initial_state(const chain::BlockHeader& genesis);

// Proposer expected for the state's current turn.
const NodeAddress& expected_proposer(const ServerRoster& roster, const ConsensusState& state);

using ProposeVerdict = std::variant<Confirm, ErrorNotice>;

// Receiver-side check of a proposed block, in order: height, link, proposer,
// body, and one-vote-per-height. On success the receiver signs and records its
// vote; re-delivery of the same block yields the same Confirm.
ProposeVerdict on_propose(ConsensusState& state, const ServerRoster& roster, const crypto::CryptoSuite& suite,
                          const crypto::KeyPair& self, const NodeAddress& sender, const chain::Block& block);

enum class CollectStatus { Pending, QuorumReached, Duplicate, Rejected };

struct CollectResult {
    CollectStatus status = CollectStatus::Pending;
    std::vector<crypto::Signature> bundle;  // filled on QuorumReached, sorted by signer id
};

// Proposer-side tally. Pre: phase is Proposed. Signers outside the roster,
// signers that reported an error this round, and signatures over anything but
// the pending block are rejected.
CollectResult collect_confirm(ConsensusState& state, const ServerRoster& roster, const crypto::CryptoSuite& suite,
                              const NodeAddress& from, const Confirm& confirm);

enum class RejectReason { UnknownBlock, InsufficientQuorum, InvalidSignature, Stale, BadLink };
std::string_view reason_name(RejectReason r);

struct BlockAddVerdict {
    bool accepted = false;
    RejectReason reason = RejectReason::UnknownBlock;
    std::size_t valid_signers = 0;
};

// Accepts iff the bundle holds valid signatures from at least a quorum of
// distinct roster members over the held block. Extra or bad signatures are
// discounted, never fatal on their own.
BlockAddVerdict on_block_add(const ConsensusState& state, const ServerRoster& roster, const crypto::CryptoSuite& suite,
                             const BlockAdd& msg, const chain::Block* held);

// Advances state past an accepted block. The next turn follows the first
// turn at or after the current one that belongs to the block's proposer, which
// resynchronizes a server that missed a skip notice.
void apply_commit(ConsensusState& state, const ServerRoster& roster, const chain::Block& block);

}  // namespace fogledger::consensus
