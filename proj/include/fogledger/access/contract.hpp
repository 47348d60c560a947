#pragma once

#include <set>
#include <string>
#include <vector>

#include "fogledger/chain/types.hpp"
#include "fogledger/crypto/group_cipher.hpp"

namespace fogledger::access {

enum class AccessErrc {
    IdCollision,
    EmptyGroup,
    NotOwner,
    UnknownSubject,
    NotGranted,
    UnknownGroup,
    StaleRecord,
    Denied,
    WrongScope,
    AuthExpired,
};
std::string_view errc_name(AccessErrc e);

struct ContractScope {
    enum class Kind : std::uint8_t { LocalChain = 0, FullChain = 1 };
    Kind kind = Kind::FullChain;
    std::string cluster;  // set for LocalChain only

    static ContractScope local(std::string cluster) { return {Kind::LocalChain, std::move(cluster)}; }
    static ContractScope full() { return {Kind::FullChain, {}}; }
    bool operator==(const ContractScope&) const = default;
};

struct TokenTemplate {
    std::uint32_t access_length = 16;
    std::int64_t validity_ms = 60'000;
    crypto::GroupKey key_material{};
    bool operator==(const TokenTemplate&) const = default;
};

/// Access-control contract for one group of transactions. `version` counts
/// applied grant and revoke records; each record names the version it
/// expects, so an old record cannot be replayed.
struct AccessContract {
    std::string group_id;
    NodeAddress creator;
    TokenTemplate token_template;
    std::set<std::string> access_list;
    ContractScope scope;
    // Transaction ids, or "stream:<cluster>" for data a cluster has yet to produce.
    std::vector<std::string> tx_group;
    std::uint64_t version = 0;

    bool operator==(const AccessContract&) const = default;
    void encode(Encoder& enc) const;
    static AccessContract decode(Decoder& dec);
};

struct GrantRecord {
    std::string group_id;
    NodeAddress subject;
    bool revoke = false;
    std::uint64_t version = 0;
    crypto::Signature grantor_sig;

    Bytes signing_bytes() const;
    void encode(Encoder& enc) const;
    static GrantRecord decode(Decoder& dec);
};

// Signature a contract creator attaches to a grant or revoke request.
crypto::Signature sign_grant(const crypto::CryptoSuite& suite, const crypto::KeyPair& caller, const std::string& group,
                             const NodeAddress& subject, bool revoke, std::uint64_t version);

}  // namespace fogledger::access
