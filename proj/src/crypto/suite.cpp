#include "fogledger/crypto/suite.hpp"

#include "fogledger/crypto/hash.hpp"

namespace fogledger::crypto {

std::string_view errc_name(CryptoErrc e) {
    switch (e) {
        case CryptoErrc::UnknownKey: return "UnknownKey";
        case CryptoErrc::DuplicateAddress: return "DuplicateAddress";
        case CryptoErrc::BadLifetime: return "BadLifetime";
        case CryptoErrc::UnknownHolder: return "UnknownHolder";
        case CryptoErrc::DecryptFailed: return "DecryptFailed";
        case CryptoErrc::TokenExpired: return "TokenExpired";
        case CryptoErrc::TokenExhausted: return "TokenExhausted";
    }
    return "Unknown";
}

CryptoSuite::CryptoSuite(SchemeId scheme) : scheme_(make_scheme(scheme)) {}

Digest derive_seed(std::uint64_t master_seed, std::string_view id) {
    Encoder enc;
    enc.str("fogledger/seed").u64(master_seed).str(id);
    return sha256(enc.data());
}

KeyPair CryptoSuite::derive(const NodeAddress& owner, std::uint64_t master_seed) {
    return scheme_->derive(owner, derive_seed(master_seed, owner.id));
}

KeyPair CryptoSuite::enroll(const NodeAddress& owner, const Digest& seed) {
    KeyPair kp = scheme_->derive(owner, seed);
    if (!registry_.add(owner, kp.public_key))
        throw CryptoError(CryptoErrc::DuplicateAddress, "address already registered: " + owner.id);
    return kp;
}

KeyPair CryptoSuite::enroll_derived(const NodeAddress& owner, std::uint64_t master_seed) {
    return enroll(owner, derive_seed(master_seed, owner.id));
}

Signature CryptoSuite::sign(const KeyPair& key, ByteView message) const {
    auto rec = registry_.find(key.owner.id);
    if (!rec || rec->public_key != key.public_key || rec->address.role != key.owner.role)
        throw CryptoError(CryptoErrc::UnknownKey, "signing key is not registered: " + key.owner.id);
    return Signature{scheme_->sign(key.secret_key, message), key.owner};
}

bool CryptoSuite::verify(ByteView message, const Signature& sig) const {
    auto rec = registry_.find(sig.signer.id);
    if (!rec || rec->address.role != sig.signer.role) return false;
    return scheme_->verify(message, sig.bytes, rec->public_key);
}

}  // namespace fogledger::crypto
