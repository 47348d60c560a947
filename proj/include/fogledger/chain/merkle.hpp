#pragma once

#include <span>

#include "fogledger/chain/types.hpp"

namespace fogledger::chain {

// Merkle root over transaction digests. Each level pairs adjacent nodes as
// H(left || right) and rehashes an unpaired trailing node alone as H(node).
// At least one level is always built, so a single transaction t yields
// H(H(t)). Preimage lengths keep the node kinds apart: a lone rehash hashes
// 32 bytes, a pair 64 bytes, and a serialized transaction is always longer.
// Throws ChainError(EmptyBlock) on an empty list.
Digest hash_block_body(std::span<const Transaction> txs);

Digest merkle_root(std::vector<Digest> leaves);

}  // namespace fogledger::chain
