#include "fogledger/chain/types.hpp"

#include "fogledger/crypto/hash.hpp"

namespace fogledger::chain {

std::string_view errc_name(ChainErrc e) {
    switch (e) {
        case ChainErrc::EmptyBlock: return "EmptyBlock";
        case ChainErrc::BadExpiry: return "BadExpiry";
        case ChainErrc::UnknownHeader: return "UnknownHeader";
        case ChainErrc::TierMismatch: return "TierMismatch";
        case ChainErrc::CorruptFile: return "CorruptFile";
    }
    return "Unknown";
}

bool is_system_group(std::string_view group) { return !group.empty() && group.front() == '@'; }

Bytes Transaction::signing_bytes() const {
    Encoder enc;
    enc.str(tx_id);
    creator.encode(enc);
    enc.bytes(payload);
    enc.str(access_group);
    enc.i64(expiry);
    return enc.take();
}

void Transaction::encode(Encoder& enc) const {
    enc.str(tx_id);
    creator.encode(enc);
    enc.bytes(payload);
    enc.str(access_group);
    enc.i64(expiry);
    signature.encode(enc);
}

Transaction Transaction::decode(Decoder& dec) {
    Transaction t;
    t.tx_id = dec.str();
    t.creator = NodeAddress::decode(dec);
    t.payload = dec.bytes();
    t.access_group = dec.str();
    t.expiry = dec.i64();
    t.signature = Signature::decode(dec);
    return t;
}

Bytes Transaction::serialize() const {
    Encoder enc;
    encode(enc);
    return enc.take();
}

Digest Transaction::digest() const { return crypto::sha256(serialize()); }

Transaction make_transaction(const CryptoSuite& suite, const KeyPair& creator, std::string tx_id, Bytes payload,
                             std::string access_group, std::int64_t created_at, std::int64_t expiry) {
    if (expiry <= created_at) throw ChainError(ChainErrc::BadExpiry, "expiry must be later than creation time");
    Transaction t;
    t.tx_id = std::move(tx_id);
    t.creator = creator.owner;
    t.payload = std::move(payload);
    t.access_group = std::move(access_group);
    t.expiry = expiry;
    t.signature = suite.sign(creator, t.signing_bytes());
    return t;
}

bool verify_transaction(const CryptoSuite& suite, const Transaction& tx) {
    if (tx.signature.signer != tx.creator) return false;
    return suite.verify(tx.signing_bytes(), tx.signature);
}

}  // namespace fogledger::chain
