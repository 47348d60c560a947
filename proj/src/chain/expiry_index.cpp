#include "fogledger/chain/expiry_index.hpp"

namespace fogledger::chain {

void ExpiryIndex::add_block(const Block& block) {
    const std::string& id = block.header.block_id;
    remove_block(id);
    BlockInfo info{block.max_expiry(), {}};
    for (const auto& t : block.transactions) {
        by_tx_[t.tx_id] = ExpiryEntry{id, t.expiry};
        info.tx_ids.push_back(t.tx_id);
    }
    by_block_[id] = std::move(info);
}

void ExpiryIndex::remove_block(const std::string& block_id) {
    auto it = by_block_.find(block_id);
    if (it == by_block_.end()) return;
    for (const auto& tx : it->second.tx_ids) {
        auto e = by_tx_.find(tx);
        if (e != by_tx_.end() && e->second.block_id == block_id) by_tx_.erase(e);
    }
    by_block_.erase(it);
}

const ExpiryEntry* ExpiryIndex::find(const std::string& tx_id) const {
    auto it = by_tx_.find(tx_id);
    return it == by_tx_.end() ? nullptr : &it->second;
}

std::vector<std::string> ExpiryIndex::fully_expired(std::int64_t now) const {
    std::vector<std::string> out;
    for (const auto& [id, info] : by_block_)
        if (info.max_expiry < now) out.push_back(id);
    return out;
}

bool ExpiryIndex::consistent_with(const ChainStore& store) const {
    std::size_t tx_count = 0;
    for (const auto& [height, block] : store.bodies()) {
        auto bi = by_block_.find(block->header.block_id);
        if (bi == by_block_.end() || bi->second.tx_ids.size() != block->transactions.size()) return false;
        for (const auto& t : block->transactions) {
            const ExpiryEntry* e = find(t.tx_id);
            if (!e || e->block_id != block->header.block_id || e->expiry != t.expiry) return false;
        }
        tx_count += block->transactions.size();
    }
    return tx_count == by_tx_.size() && store.body_count() == by_block_.size();
}

std::vector<std::string> prune_expired(ChainStore& store, ExpiryIndex& index, std::int64_t now) {
    if (store.tier() != Tier::Local) throw ChainError(ChainErrc::TierMismatch, "pruning applies to local stores only");
    std::vector<std::string> pruned = index.fully_expired(now);
    for (const auto& id : pruned) {
        if (const BlockHeader* h = store.header_by_id(id)) store.erase_body(h->height);
        index.remove_block(id);
    }
    return pruned;
}

}  // namespace fogledger::chain
