#pragma once

#include <filesystem>
#include <variant>

#include "fogledger/chain/store.hpp"

namespace fogledger::chain {

// Layout of <path>: one record per height, each a u32 length, a u8 kind
// (0 header, 1 block) and the serialized header or block.
// <path>.idx holds a (u64 height, u64 byte offset) pair per record.
void save_chain(const ChainStore& store, const std::filesystem::path& path);

// Rebuilds a store of the given tier, re-checking every link.
// Throws ChainError(CorruptFile) on malformed input or a broken chain.
ChainStore load_chain(const std::filesystem::path& path, Tier tier);

// Reads a single record through the sidecar index.
std::variant<BlockHeader, Block> read_record(const std::filesystem::path& path, std::uint64_t height);

}  // namespace fogledger::chain
