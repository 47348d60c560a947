#pragma once

#include <cstdint>
#include <set>
#include <string>

#include "fogledger/crypto/suite.hpp"

namespace fogledger::crypto {

/// Short-lived authentication key issued by the fog node that authenticated
/// the holder. The attestation is the issuer's signature over the other fields,
/// which lets any node holding the key registry check it.
struct SessionKey {
    std::string key_id;
    NodeAddress holder;
    std::int64_t issued_at = 0;
    std::int64_t lifetime = 0;
    NodeAddress issuer;
    Signature attestation;

    std::int64_t expires_at() const { return issued_at + lifetime; }
    Bytes signing_bytes() const;
    void encode(Encoder& enc) const;
    static SessionKey decode(Decoder& dec);
};

class SessionIssuer {
public:
    SessionIssuer(const CryptoSuite& suite, KeyPair issuer_key);

    // Throws CryptoError(BadLifetime) for non-positive lifetimes and
    // CryptoError(UnknownHolder) when the holder has no registered key.
    SessionKey issue_session_key(const NodeAddress& holder, std::int64_t lifetime_ms, std::int64_t now);

    const NodeAddress& issuer() const { return key_.owner; }

private:
    const CryptoSuite& suite_;
    KeyPair key_;
    std::uint64_t counter_ = 0;
};

enum class SessionStatus { Live, Expired, BadAttestation };

/// Rejections are sticky: once a key id has been refused for expiry it is
/// refused for good, even if a later call passes an earlier clock value.
class SessionVerifier {
public:
    explicit SessionVerifier(const CryptoSuite& suite) : suite_(suite) {}

    SessionStatus check(const SessionKey& key, std::int64_t now);
    bool is_rejected(const std::string& key_id) const { return rejected_.count(key_id) > 0; }

private:
    const CryptoSuite& suite_;
    std::set<std::string> rejected_;
};

}  // namespace fogledger::crypto
