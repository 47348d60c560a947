#include "fogledger/chain/store.hpp"

namespace fogledger::chain {

std::string_view tier_name(Tier t) {
    switch (t) {
        case Tier::Full: return "full";
        case Tier::Local: return "local";
        case Tier::HeaderOnly: return "header_only";
    }
    return "unknown";
}

std::string_view result_name(AppendResult r) {
    switch (r) {
        case AppendResult::Ok: return "Ok";
        case AppendResult::BrokenLink: return "BrokenLink";
        case AppendResult::HeightGap: return "HeightGap";
    }
    return "Unknown";
}

AppendResult ChainStore::append_header(const BlockHeader& header) {
    const std::uint64_t expected = headers_.size();
    if (header.height != expected) return AppendResult::HeightGap;
    if (header.prev_hash != tip_digest()) return AppendResult::BrokenLink;
    headers_.push_back(header);
    digests_.push_back(header.digest());
    height_by_id_[header.block_id] = header.height;
    return AppendResult::Ok;
}

std::optional<std::uint64_t> ChainStore::tip_height() const {
    if (headers_.empty()) return std::nullopt;
    return headers_.size() - 1;
}

Digest ChainStore::tip_digest() const { return digests_.empty() ? kZeroDigest : digests_.back(); }

const BlockHeader* ChainStore::header_at(std::uint64_t height) const {
    return height < headers_.size() ? &headers_[height] : nullptr;
}

const BlockHeader* ChainStore::header_by_id(const std::string& block_id) const {
    auto it = height_by_id_.find(block_id);
    return it == height_by_id_.end() ? nullptr : &headers_[it->second];
}

void ChainStore::put_body(BlockPtr block) {
    if (tier_ == Tier::HeaderOnly) throw ChainError(ChainErrc::TierMismatch, "header-only store keeps no bodies");
    const BlockHeader* h = header_at(block->header.height);
    if (!h || !(*h == block->header))
        throw ChainError(ChainErrc::UnknownHeader, "body does not match a stored header: " + block->header.block_id);
    bodies_[block->header.height] = std::move(block);
}

bool ChainStore::erase_body(std::uint64_t height) { return bodies_.erase(height) > 0; }

BlockPtr ChainStore::body(std::uint64_t height) const {
    auto it = bodies_.find(height);
    return it == bodies_.end() ? nullptr : it->second;
}

BlockPtr ChainStore::body_by_id(const std::string& block_id) const {
    auto it = height_by_id_.find(block_id);
    return it == height_by_id_.end() ? nullptr : body(it->second);
}

void ChainStore::cache_body(BlockPtr block, std::int64_t now) {
    std::string id = block->header.block_id;
    cache_[id] = CacheEntry{std::move(block), now};
}

BlockPtr ChainStore::cached(const std::string& block_id, std::int64_t now, std::int64_t ttl) const {
    auto it = cache_.find(block_id);
    if (it == cache_.end() || now - it->second.cached_at > ttl) return nullptr;
    return it->second.block;
}

std::size_t ChainStore::evict_cache(std::int64_t now, std::int64_t ttl) {
    std::size_t n = 0;
    for (auto it = cache_.begin(); it != cache_.end();) {
        if (now - it->second.cached_at > ttl) {
            it = cache_.erase(it);
            ++n;
        } else {
            ++it;
        }
    }
    return n;
}

bool ChainStore::verify_header_chain() const {
    Digest prev = kZeroDigest;
    for (std::size_t i = 0; i < headers_.size(); ++i) {
        if (headers_[i].height != i || headers_[i].prev_hash != prev) return false;
        prev = headers_[i].digest();
        if (prev != digests_[i]) return false;
    }
    return true;
}

}  // namespace fogledger::chain
