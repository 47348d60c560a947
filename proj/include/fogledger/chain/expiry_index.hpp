#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fogledger/chain/store.hpp"

namespace fogledger::chain {

struct ExpiryEntry {
    std::string block_id;
    std::int64_t expiry = 0;
};

/// Maps each retained transaction to its block and expiry, and tracks the
/// latest expiry per block so fully expired blocks are found without a scan
/// of block bodies.
class ExpiryIndex {
public:
    void add_block(const Block& block);
    void remove_block(const std::string& block_id);

    const ExpiryEntry* find(const std::string& tx_id) const;
    std::size_t size() const { return by_tx_.size(); }
    std::size_t block_count() const { return by_block_.size(); }

    // Blocks whose every transaction has expiry < now, ordered by block id.
    std::vector<std::string> fully_expired(std::int64_t now) const;

    // True iff the index lists exactly the transactions of the retained bodies.
    bool consistent_with(const ChainStore& store) const;

private:
    struct BlockInfo {
        std::int64_t max_expiry;
        std::vector<std::string> tx_ids;
    };
    std::map<std::string, ExpiryEntry> by_tx_;
    std::map<std::string, BlockInfo> by_block_;
};

// Removes bodies whose transactions have all expired from a Local store.
// Returns the pruned block ids. Headers are kept.
std::vector<std::string> prune_expired(ChainStore& store, ExpiryIndex& index, std::int64_t now);

}  // namespace fogledger::chain
