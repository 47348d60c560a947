#pragma once

#include <optional>
#include <vector>

#include "fogledger/chain/types.hpp"

namespace fogledger::consensus {

/// Ordered set of cloud servers taking part in consensus. Ids are kept
/// strictly ascending; construction sorts and rejects duplicates.
class ServerRoster {
public:
    ServerRoster() = default;
    explicit ServerRoster(std::vector<NodeAddress> servers);

    std::size_t size() const { return servers_.size(); }
    const std::vector<NodeAddress>& servers() const { return servers_; }
    const NodeAddress& at(std::size_t i) const { return servers_.at(i); }
    bool contains(const NodeAddress& addr) const;
    std::optional<std::size_t> index_of(const std::string& id) const;

    bool operator==(const ServerRoster&) const = default;

    Bytes serialize() const;
    static ServerRoster deserialize(ByteView data);
    Digest digest() const;

private:
    std::vector<NodeAddress> servers_;
};

// servers[h mod n]
const NodeAddress& proposer_for_height(const ServerRoster& roster, std::uint64_t height);

// Smallest k with 2k > n, i.e. floor(n/2) + 1.
std::size_t quorum_size(std::size_t n);

// Height-0 block carrying the serialized roster, signed by founder.
chain::Block make_genesis(const ServerRoster& roster, const chain::CryptoSuite& suite, const chain::KeyPair& founder,
                          std::int64_t timestamp);

}  // namespace fogledger::consensus
