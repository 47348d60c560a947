#pragma once

#include "fogledger/chain/types.hpp"

namespace fogledger::chain {

enum class InvalidReason {
    None,
    Malformed,
    HeaderMismatch,
    EmptyBlock,
    DuplicateTx,
    BodyHashMismatch,
    BadSignature,
    BadAssemblerSignature,
};

std::string_view reason_name(InvalidReason r);

struct Validation {
    InvalidReason reason = InvalidReason::None;
    std::string tx_id;  // offending transaction, when there is one

    bool valid() const { return reason == InvalidReason::None; }
    explicit operator bool() const { return valid(); }
    static Validation ok() { return {}; }
    static Validation fail(InvalidReason r, std::string tx = {}) { return {r, std::move(tx)}; }
};

// Checks, in order: header equality with the trusted header, non-empty and
// duplicate-free body, body hash, every transaction signature, and the
// assembler stamp when one is attached.
Validation validate_block(const Block& block, const BlockHeader& expected_header, const CryptoSuite& suite);

// Decodes first; undecodable input is Invalid(Malformed).
Validation validate_serialized_block(ByteView data, const BlockHeader& expected_header, const CryptoSuite& suite);

// Structural checks a receiver can do without a trusted header:
// body hash matches the block's own header and all signatures verify.
Validation validate_self_consistent(const Block& block, const CryptoSuite& suite);

}  // namespace fogledger::chain
