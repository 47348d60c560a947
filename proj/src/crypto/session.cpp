#include "fogledger/crypto/session.hpp"

#include "fogledger/crypto/hash.hpp"

namespace fogledger::crypto {

Bytes SessionKey::signing_bytes() const {
    Encoder enc;
    enc.str("fogledger/session");
    enc.str(key_id);
    holder.encode(enc);
    enc.i64(issued_at).i64(lifetime);
    issuer.encode(enc);
    return enc.take();
}

void SessionKey::encode(Encoder& enc) const {
    enc.str(key_id);
    holder.encode(enc);
    enc.i64(issued_at).i64(lifetime);
    issuer.encode(enc);
    attestation.encode(enc);
}

SessionKey SessionKey::decode(Decoder& dec) {
    SessionKey k;
    k.key_id = dec.str();
    k.holder = NodeAddress::decode(dec);
    k.issued_at = dec.i64();
    k.lifetime = dec.i64();
    k.issuer = NodeAddress::decode(dec);
    k.attestation = Signature::decode(dec);
    return k;
}

SessionIssuer::SessionIssuer(const CryptoSuite& suite, KeyPair issuer_key)
    : suite_(suite), key_(std::move(issuer_key)) {}

SessionKey SessionIssuer::issue_session_key(const NodeAddress& holder, std::int64_t lifetime_ms, std::int64_t now) {
    if (lifetime_ms <= 0) throw CryptoError(CryptoErrc::BadLifetime, "session lifetime must be positive");
    auto rec = suite_.registry().find(holder.id);
    if (!rec || rec->address.role != holder.role)
        throw CryptoError(CryptoErrc::UnknownHolder, "session holder not registered: " + holder.id);

    Encoder id_src;
    id_src.str(key_.owner.id).u64(counter_++).str(holder.id).i64(now);
    Digest d = sha256(id_src.data());

    SessionKey k;
    k.key_id = to_hex(ByteView{d.data(), 16});
    k.holder = holder;
    k.issued_at = now;
    k.lifetime = lifetime_ms;
    k.issuer = key_.owner;
    k.attestation = suite_.sign(key_, k.signing_bytes());
    return k;
}

SessionStatus SessionVerifier::check(const SessionKey& key, std::int64_t now) {
    if (key.attestation.signer != key.issuer || !suite_.verify(key.signing_bytes(), key.attestation))
        return SessionStatus::BadAttestation;
    if (rejected_.count(key.key_id)) return SessionStatus::Expired;
    if (now > key.expires_at()) {
        rejected_.insert(key.key_id);
        return SessionStatus::Expired;
    }
    return SessionStatus::Live;
}

}  // namespace fogledger::crypto
