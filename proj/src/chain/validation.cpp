#include "fogledger/chain/validation.hpp"

#include <set>

#include "fogledger/chain/merkle.hpp"

namespace fogledger::chain {

std::string_view reason_name(InvalidReason r) {
    switch (r) {
        case InvalidReason::None: return "None";
        case InvalidReason::Malformed: return "Malformed";
        case InvalidReason::HeaderMismatch: return "HeaderMismatch";
        case InvalidReason::EmptyBlock: return "EmptyBlock";
        case InvalidReason::DuplicateTx: return "DuplicateTx";
        case InvalidReason::BodyHashMismatch: return "BodyHashMismatch";
        case InvalidReason::BadSignature: return "BadSignature";
        case InvalidReason::BadAssemblerSignature: return "BadAssemblerSignature";
    }
    return "Unknown";
}

Validation validate_self_consistent(const Block& block, const CryptoSuite& suite) {
    if (block.transactions.empty()) return Validation::fail(InvalidReason::EmptyBlock);
    std::set<std::string_view> ids;
    for (const auto& t : block.transactions)
        if (!ids.insert(t.tx_id).second) return Validation::fail(InvalidReason::DuplicateTx, t.tx_id);
    if (hash_block_body(block.transactions) != block.header.body_hash)
        return Validation::fail(InvalidReason::BodyHashMismatch);
    for (const auto& t : block.transactions)
        if (!verify_transaction(suite, t)) return Validation::fail(InvalidReason::BadSignature, t.tx_id);
    if (block.assembler) {
        const auto& sig = block.assembler->signature;
        Bytes msg = assembler_message(block.header.block_id, block.header.origin_cluster, block.header.body_hash);
        if (sig.signer.role != Role::Gateway || !suite.verify(msg, sig))
            return Validation::fail(InvalidReason::BadAssemblerSignature);
    }
    return Validation::ok();
}

Validation validate_block(const Block& block, const BlockHeader& expected_header, const CryptoSuite& suite) {
    if (!(block.header == expected_header)) return Validation::fail(InvalidReason::HeaderMismatch);
    return validate_self_consistent(block, suite);
}

Validation validate_serialized_block(ByteView data, const BlockHeader& expected_header, const CryptoSuite& suite) {
    Block b;
    try {
        b = Block::deserialize(data);
    } catch (const DecodeError&) {
        return Validation::fail(InvalidReason::Malformed);
    }
    return validate_block(b, expected_header, suite);
}

}  // namespace fogledger::chain
