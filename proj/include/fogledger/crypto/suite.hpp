#pragma once

#include <memory>

#include "fogledger/common/error.hpp"
#include "fogledger/crypto/key_registry.hpp"
#include "fogledger/crypto/signature.hpp"

namespace fogledger::crypto {

enum class CryptoErrc {
    UnknownKey,
    DuplicateAddress,
    BadLifetime,
    UnknownHolder,
    DecryptFailed,
    TokenExpired,
    TokenExhausted,
};

std::string_view errc_name(CryptoErrc e);

using CryptoError = DomainError<CryptoErrc>;

/// A signature scheme bound to the registry of public keys it verifies against.
class CryptoSuite {
public:
    explicit CryptoSuite(SchemeId scheme);

    CryptoSuite(const CryptoSuite&) = delete;
    CryptoSuite& operator=(const CryptoSuite&) = delete;

    // Derives a key pair from seed and registers its public key.
    // Throws CryptoError(DuplicateAddress) if the id is already registered.
    KeyPair enroll(const NodeAddress& owner, const Digest& seed);
    // Seed = SHA-256(master || id), so whole rosters are reproducible from one value.
    KeyPair enroll_derived(const NodeAddress& owner, std::uint64_t master_seed);
    // Derives the same key pair as enroll_derived without registering it.
    KeyPair derive(const NodeAddress& owner, std::uint64_t master_seed);

    // Throws CryptoError(UnknownKey) when the key pair's public key is not
    // the one registered for its owner.
    Signature sign(const KeyPair& key, ByteView message) const;
    // True iff the signer is registered with the same role and the bytes verify.
    bool verify(ByteView message, const Signature& sig) const;

    SchemeId scheme_id() const { return scheme_->id(); }
    const SignatureScheme& scheme() const { return *scheme_; }
    KeyRegistry& registry() { return registry_; }
    const KeyRegistry& registry() const { return registry_; }

private:
    std::unique_ptr<SignatureScheme> scheme_;
    KeyRegistry registry_;
};

Digest derive_seed(std::uint64_t master_seed, std::string_view id);

}  // namespace fogledger::crypto
