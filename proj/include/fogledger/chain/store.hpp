#pragma once

#include <map>
#include <optional>
#include <unordered_map>

#include "fogledger/chain/types.hpp"

namespace fogledger::chain {

enum class Tier { Full, Local, HeaderOnly };
std::string_view tier_name(Tier t);

enum class AppendResult { Ok, BrokenLink, HeightGap };
std::string_view result_name(AppendResult r);

/// Header chain plus whatever bodies the tier keeps. Full keeps every body,
/// Local keeps bodies selected by its owner, HeaderOnly keeps none but may
/// hold short-lived cached bodies.
class ChainStore {
public:
    explicit ChainStore(Tier tier) : tier_(tier) {}

    Tier tier() const { return tier_; }

    // Accepts height 0 with a zero prev hash on an empty store, otherwise
    // only tip + 1 linking to the tip digest.
    AppendResult append_header(const BlockHeader& header);

    std::optional<std::uint64_t> tip_height() const;
    Digest tip_digest() const;
    std::size_t header_count() const { return headers_.size(); }
    const BlockHeader* header_at(std::uint64_t height) const;
    const BlockHeader* header_by_id(const std::string& block_id) const;
    const std::vector<BlockHeader>& headers() const { return headers_; }

    // Full and Local tiers only. The header must already be present and equal
    // to the block's header; throws ChainError otherwise.
    void put_body(BlockPtr block);
    bool erase_body(std::uint64_t height);
    BlockPtr body(std::uint64_t height) const;
    BlockPtr body_by_id(const std::string& block_id) const;
    std::size_t body_count() const { return bodies_.size(); }
    const std::map<std::uint64_t, BlockPtr>& bodies() const { return bodies_; }

    // Short-lived body cache (any tier). Entries older than ttl are dropped
    // by evict_cache and ignored by cached().
    void cache_body(BlockPtr block, std::int64_t now);
    BlockPtr cached(const std::string& block_id, std::int64_t now, std::int64_t ttl) const;
    std::size_t evict_cache(std::int64_t now, std::int64_t ttl);
    std::size_t cache_size() const { return cache_.size(); }
    std::vector<std::string> cache_ids() const {
        std::vector<std::string> ids;
        for (const auto& [id, entry] : cache_) ids.push_back(id);
        return ids;
    }

    // Full rescan of link hashes and heights.
    bool verify_header_chain() const;

private:
    Tier tier_;
    std::vector<BlockHeader> headers_;
    std::vector<Digest> digests_;
    std::unordered_map<std::string, std::uint64_t> height_by_id_;
    std::map<std::uint64_t, BlockPtr> bodies_;
    struct CacheEntry {
        BlockPtr block;
        std::int64_t cached_at;
    };
    std::map<std::string, CacheEntry> cache_;
};

inline AppendResult append_header(ChainStore& store, const BlockHeader& header) { return store.append_header(header); }

}  // namespace fogledger::chain
