#include "fogledger/chain/merkle.hpp"

#include "fogledger/crypto/hash.hpp"

namespace fogledger::chain {

Digest merkle_root(std::vector<Digest> level) {
    if (level.empty()) throw ChainError(ChainErrc::EmptyBlock, "block body has no transactions");
    do {
        std::vector<Digest> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) {
            if (i + 1 < level.size())
                next.push_back(crypto::sha256(level[i], level[i + 1]));
            else
                next.push_back(crypto::sha256(view_of(level[i])));
        }
        level = std::move(next);
    } while (level.size() > 1);
    return level.front();
}

Digest hash_block_body(std::span<const Transaction> txs) {
    std::vector<Digest> leaves;
    leaves.reserve(txs.size());
    for (const auto& t : txs) leaves.push_back(t.digest());
    return merkle_root(std::move(leaves));
}

}  // namespace fogledger::chain
