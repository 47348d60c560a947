#include "fogledger/consensus/roster.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "fogledger/chain/merkle.hpp"
#include "fogledger/crypto/hash.hpp"

namespace fogledger::consensus {

ServerRoster::ServerRoster(std::vector<NodeAddress> servers) : servers_(std::move(servers)) {
    if (servers_.empty()) throw std::invalid_argument("server roster is empty");
    std::sort(servers_.begin(), servers_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < servers_.size(); ++i) {
        if (servers_[i].role != Role::CloudServer)
            throw std::invalid_argument("roster member is not a cloud server: " + servers_[i].id);
        if (i > 0 && servers_[i].id == servers_[i - 1].id)
            throw std::invalid_argument("duplicate roster member: " + servers_[i].id);
    }
}

bool ServerRoster::contains(const NodeAddress& addr) const {
    auto i = index_of(addr.id);
    return i && servers_[*i].role == addr.role;
}

std::optional<std::size_t> ServerRoster::index_of(const std::string& id) const {
    auto it = std::lower_bound(servers_.begin(), servers_.end(), id,
                               [](const NodeAddress& a, const std::string& v) { return a.id < v; });
    if (it == servers_.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - servers_.begin());
}

Bytes ServerRoster::serialize() const {
    Encoder enc;
    enc.u32(static_cast<std::uint32_t>(servers_.size()));
    for (const auto& s : servers_) s.encode(enc);
    return enc.take();
}

ServerRoster ServerRoster::deserialize(ByteView data) {
    Decoder dec(data);
    std::uint32_t n = dec.u32();
    std::vector<NodeAddress> v;
    for (std::uint32_t i = 0; i < n; ++i) v.push_back(NodeAddress::decode(dec));
    dec.expect_done();
    return ServerRoster(std::move(v));
}

Digest ServerRoster::digest() const { return crypto::sha256(serialize()); }

const NodeAddress& proposer_for_height(const ServerRoster& roster, std::uint64_t height) {
    if (roster.size() == 0) throw std::invalid_argument("empty roster");
    return roster.at(height % roster.size());
}

std::size_t quorum_size(std::size_t n) { return n / 2 + 1; }

chain::Block make_genesis(const ServerRoster& roster, const chain::CryptoSuite& suite, const chain::KeyPair& founder,
                          std::int64_t timestamp) {
    chain::Block b;
    b.transactions.push_back(chain::make_transaction(suite, founder, "genesis/roster", roster.serialize(),
                                                     std::string(chain::system_group::kGenesis), timestamp,
                                                     std::numeric_limits<std::int64_t>::max()));
    b.header.height = 0;
    b.header.block_id = "genesis";
    b.header.prev_hash = kZeroDigest;
    b.header.body_hash = chain::hash_block_body(b.transactions);
    b.header.proposer = founder.owner;
    b.header.timestamp = timestamp;
    return b;
}

}  // namespace fogledger::consensus
