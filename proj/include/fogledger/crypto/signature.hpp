#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>

#include "fogledger/common/identity.hpp"

namespace fogledger::crypto {

enum class SchemeId : std::uint8_t { Ed25519 = 1, KeyedDigest = 2 };

std::string_view scheme_name(SchemeId id);
std::optional<SchemeId> parse_scheme(std::string_view name);

struct Signature {
    Bytes bytes;
    NodeAddress signer;

    bool operator==(const Signature&) const = default;
    void encode(Encoder& enc) const;
    static Signature decode(Decoder& dec);
};

struct KeyPair {
    Bytes public_key;
    Bytes secret_key;
    NodeAddress owner;
};

class SignatureScheme {
public:
    virtual ~SignatureScheme() = default;
    virtual SchemeId id() const = 0;
    // Deterministically derives a key pair from a 32-byte seed.
    virtual KeyPair derive(const NodeAddress& owner, const Digest& seed) = 0;
    virtual Bytes sign(ByteView secret_key, ByteView message) const = 0;
    virtual bool verify(ByteView message, ByteView signature, ByteView public_key) const = 0;
};

class Ed25519Scheme final : public SignatureScheme {
public:
    SchemeId id() const override { return SchemeId::Ed25519; }
    KeyPair derive(const NodeAddress& owner, const Digest& seed) override;
    Bytes sign(ByteView secret_key, ByteView message) const override;
    bool verify(ByteView message, ByteView signature, ByteView public_key) const override;
};

// Fast test double: sig = SHA-256(secret || message). Verification consults
// the scheme's own table of derived keys, standing in for an oracle that
// only the scheme instance can query. Not a real public-key scheme.
class KeyedDigestScheme final : public SignatureScheme {
public:
    SchemeId id() const override { return SchemeId::KeyedDigest; }
    KeyPair derive(const NodeAddress& owner, const Digest& seed) override;
    Bytes sign(ByteView secret_key, ByteView message) const override;
    bool verify(ByteView message, ByteView signature, ByteView public_key) const override;

private:
    mutable std::shared_mutex mu_;
    std::map<Bytes, Bytes> secret_by_public_;
};

std::unique_ptr<SignatureScheme> make_scheme(SchemeId id);

}  // namespace fogledger::crypto
