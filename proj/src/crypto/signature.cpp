#include "fogledger/crypto/signature.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

#include "fogledger/crypto/hash.hpp"

namespace fogledger::crypto {

std::string_view scheme_name(SchemeId id) {
    switch (id) {
        case SchemeId::Ed25519: return "ed25519";
        case SchemeId::KeyedDigest: return "keyed-digest";
    }
    return "unknown";
}

std::optional<SchemeId> parse_scheme(std::string_view name) {
    if (name == "ed25519") return SchemeId::Ed25519;
    if (name == "keyed-digest") return SchemeId::KeyedDigest;
    return std::nullopt;
}

void Signature::encode(Encoder& enc) const {
    enc.bytes(bytes);
    signer.encode(enc);
}

Signature Signature::decode(Decoder& dec) {
    Signature s;
    s.bytes = dec.bytes();
    s.signer = NodeAddress::decode(dec);
    return s;
}

KeyPair Ed25519Scheme::derive(const NodeAddress& owner, const Digest& seed) {
    ensure_initialized();
    KeyPair kp;
    kp.owner = owner;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
    return kp;
}

Bytes Ed25519Scheme::sign(ByteView secret_key, ByteView message) const {
    if (secret_key.size() != crypto_sign_SECRETKEYBYTES) throw std::invalid_argument("bad ed25519 secret key size");
    Bytes sig(crypto_sign_BYTES);
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_key.data());
    return sig;
}

bool Ed25519Scheme::verify(ByteView message, ByteView signature, ByteView public_key) const {
    if (signature.size() != crypto_sign_BYTES || public_key.size() != crypto_sign_PUBLICKEYBYTES) return false;
    return crypto_sign_verify_detached(signature.data(), message.data(), message.size(), public_key.data()) == 0;
}

namespace {
Bytes keyed_digest(ByteView secret, ByteView message) {
    Sha256Stream h;
    h.update(secret).update(message);
    Digest d = h.finish();
    return Bytes(d.begin(), d.end());
}
}  // namespace

KeyPair KeyedDigestScheme::derive(const NodeAddress& owner, const Digest& seed) {
    KeyPair kp;
    kp.owner = owner;
    kp.secret_key.assign(seed.begin(), seed.end());
    Sha256Stream h;
    static constexpr std::uint8_t kPubTag[] = {'k', 'd', '-', 'p', 'u', 'b'};
    h.update(ByteView{kPubTag, sizeof kPubTag}).update(view_of(seed));
    Digest pub = h.finish();
    kp.public_key.assign(pub.begin(), pub.end());
    std::unique_lock lock(mu_);
    secret_by_public_[kp.public_key] = kp.secret_key;
    return kp;
}

Bytes KeyedDigestScheme::sign(ByteView secret_key, ByteView message) const {
    return keyed_digest(secret_key, message);
}

bool KeyedDigestScheme::verify(ByteView message, ByteView signature, ByteView public_key) const {
    Bytes secret;
    {
        std::shared_lock lock(mu_);
        auto it = secret_by_public_.find(Bytes(public_key.begin(), public_key.end()));
        if (it == secret_by_public_.end()) return false;
        secret = it->second;
    }
    Bytes expected = keyed_digest(secret, message);
    return constant_time_equal(expected, signature);
}

std::unique_ptr<SignatureScheme> make_scheme(SchemeId id) {
    switch (id) {
        case SchemeId::Ed25519: return std::make_unique<Ed25519Scheme>();
        case SchemeId::KeyedDigest: return std::make_unique<KeyedDigestScheme>();
    }
    throw std::invalid_argument("unknown signature scheme");
}

}  // namespace fogledger::crypto
