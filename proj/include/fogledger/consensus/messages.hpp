#pragma once

#include <variant>

#include "fogledger/consensus/roster.hpp"

namespace fogledger::consensus {

enum class ErrorReason : std::uint8_t {
    WrongHeight = 1,
    BadLink,
    WrongProposer,
    BadTxSignature,
    BodyHashMismatch,
    Malformed,
    Equivocation,
};
std::string_view reason_name(ErrorReason r);

struct Propose {
    chain::BlockPtr block;
};

struct Confirm {
    std::uint64_t height = 0;
    std::string block_id;
    Digest block_digest{};
    crypto::Signature signature;
};

struct ErrorNotice {
    std::uint64_t height = 0;
    std::string block_id;
    ErrorReason reason = ErrorReason::Malformed;
};

struct BlockAdd {
    std::uint64_t height = 0;
    std::string block_id;
    Digest block_digest{};
    std::vector<crypto::Signature> bundle;
};

struct SkipTurn {
    std::uint64_t height = 0;
    std::uint64_t turn = 0;
};

using MsgBody = std::variant<Propose, Confirm, ErrorNotice, BlockAdd, SkipTurn>;

std::string_view kind_name(const MsgBody& body);

/// Every consensus message travels in an envelope signed by its sender.
struct ConsensusMsg {
    NodeAddress sender;
    MsgBody body;
    crypto::Signature sender_sig;

    Bytes body_bytes() const;
    Bytes serialize() const;
    static ConsensusMsg deserialize(ByteView data);
    std::size_t wire_size() const;
};

// The payload a server signs to confirm a block at a height.
Bytes confirm_message(std::uint64_t height, const Digest& block_digest);

ConsensusMsg seal(const crypto::CryptoSuite& suite, const crypto::KeyPair& key, MsgBody body);

// Sender must be a roster member and the envelope signature must verify.
bool verify_envelope(const crypto::CryptoSuite& suite, const ServerRoster& roster, const ConsensusMsg& msg);

}  // namespace fogledger::consensus
