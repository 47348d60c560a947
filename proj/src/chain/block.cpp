#include <algorithm>
#include <limits>

#include "fogledger/chain/types.hpp"
#include "fogledger/crypto/hash.hpp"

namespace fogledger::chain {

void BlockHeader::encode(Encoder& enc) const {
    enc.u64(height);
    enc.str(block_id);
    enc.digest(prev_hash);
    enc.digest(body_hash);
    proposer.encode(enc);
    enc.str(origin_cluster);
    enc.i64(timestamp);
}

BlockHeader BlockHeader::decode(Decoder& dec) {
    BlockHeader h;
    h.height = dec.u64();
    h.block_id = dec.str();
    h.prev_hash = dec.digest();
    h.body_hash = dec.digest();
    h.proposer = NodeAddress::decode(dec);
    h.origin_cluster = dec.str();
    h.timestamp = dec.i64();
    return h;
}

Bytes BlockHeader::serialize() const {
    Encoder enc;
    encode(enc);
    return enc.take();
}

Digest BlockHeader::digest() const { return crypto::sha256(serialize()); }

Bytes assembler_message(const std::string& block_id, const std::string& origin_cluster, const Digest& body_hash) {
    Encoder enc;
    enc.str("fogledger/assembled");
    enc.str(block_id).str(origin_cluster).digest(body_hash);
    return enc.take();
}

void Block::encode(Encoder& enc) const {
    Bytes hdr = header.serialize();
    enc.bytes(hdr);
    enc.u32(static_cast<std::uint32_t>(transactions.size()));
    for (const auto& t : transactions) enc.bytes(t.serialize());
    enc.boolean(assembler.has_value());
    if (assembler) assembler->signature.encode(enc);
}

Block Block::decode(Decoder& dec) {
    Block b;
    {
        Bytes hdr = dec.bytes();
        Decoder hd(hdr);
        b.header = BlockHeader::decode(hd);
        hd.expect_done();
    }
    std::uint32_t n = dec.u32();
    if (n > dec.remaining() / 4) throw DecodeError("transaction count exceeds input");
    b.transactions.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        Bytes tb = dec.bytes();
        Decoder td(tb);
        b.transactions.push_back(Transaction::decode(td));
        td.expect_done();
    }
    if (dec.boolean()) b.assembler = AssemblerStamp{Signature::decode(dec)};
    return b;
}

Bytes Block::serialize() const {
    Encoder enc;
    encode(enc);
    return enc.take();
}

Block Block::deserialize(ByteView data) {
    Decoder dec(data);
    Block b = decode(dec);
    dec.expect_done();
    return b;
}

std::size_t Block::wire_size() const { return serialize().size(); }

const Transaction* Block::find_tx(const std::string& tx_id) const {
    auto it = std::find_if(transactions.begin(), transactions.end(),
                           [&](const Transaction& t) { return t.tx_id == tx_id; });
    return it == transactions.end() ? nullptr : &*it;
}

std::int64_t Block::max_expiry() const {
    std::int64_t m = std::numeric_limits<std::int64_t>::min();
    for (const auto& t : transactions) m = std::max(m, t.expiry);
    return m;
}

}  // namespace fogledger::chain
