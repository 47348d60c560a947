#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fogledger/common/error.hpp"
#include "fogledger/crypto/suite.hpp"

namespace fogledger::chain {

using crypto::CryptoSuite;
using crypto::KeyPair;
using crypto::Signature;

enum class ChainErrc { EmptyBlock, BadExpiry, UnknownHeader, TierMismatch, CorruptFile };
std::string_view errc_name(ChainErrc e);
using ChainError = DomainError<ChainErrc>;

// Reserved access groups for records the nodes themselves interpret.
namespace system_group {
inline constexpr std::string_view kRegistry = "@registry";
inline constexpr std::string_view kContract = "@contract";
inline constexpr std::string_view kGrant = "@grant";
inline constexpr std::string_view kRevoke = "@revoke";
inline constexpr std::string_view kHandover = "@handover";
inline constexpr std::string_view kGenesis = "@genesis";
}  // namespace system_group

bool is_system_group(std::string_view group);

struct Transaction {
    std::string tx_id;
    NodeAddress creator;
    Bytes payload;
    std::string access_group;
    std::int64_t expiry = 0;
    Signature signature;

    bool operator==(const Transaction&) const = default;

    // Canonical encoding of every field except the signature.
    Bytes signing_bytes() const;
    void encode(Encoder& enc) const;
    static Transaction decode(Decoder& dec);
    Bytes serialize() const;
    Digest digest() const;
};

// Builds and signs a transaction. Throws ChainError(BadExpiry) unless expiry > created_at.
Transaction make_transaction(const CryptoSuite& suite, const KeyPair& creator, std::string tx_id, Bytes payload,
                             std::string access_group, std::int64_t created_at, std::int64_t expiry);

bool verify_transaction(const CryptoSuite& suite, const Transaction& tx);

struct BlockHeader {
    std::uint64_t height = 0;
    std::string block_id;
    Digest prev_hash{};
    Digest body_hash{};
    NodeAddress proposer;
    std::string origin_cluster;
    std::int64_t timestamp = 0;

    bool operator==(const BlockHeader&) const = default;

    void encode(Encoder& enc) const;
    static BlockHeader decode(Decoder& dec);
    Bytes serialize() const;
    Digest digest() const;
};

/// Gateway attestation over the body it assembled. The cloud proposer may
/// re-stamp height, link and proposer; the attested fields survive that.
struct AssemblerStamp {
    Signature signature;
    bool operator==(const AssemblerStamp&) const = default;
};

Bytes assembler_message(const std::string& block_id, const std::string& origin_cluster, const Digest& body_hash);

struct Block {
    BlockHeader header;
    std::vector<Transaction> transactions;
    std::optional<AssemblerStamp> assembler;

    bool operator==(const Block&) const = default;

    void encode(Encoder& enc) const;
    static Block decode(Decoder& dec);
    Bytes serialize() const;
    // Throws DecodeError on malformed or trailing input.
    static Block deserialize(ByteView data);
    std::size_t wire_size() const;

    const Transaction* find_tx(const std::string& tx_id) const;
    std::int64_t max_expiry() const;
};

using BlockPtr = std::shared_ptr<const Block>;

}  // namespace fogledger::chain
