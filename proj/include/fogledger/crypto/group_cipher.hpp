#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fogledger/common/expected.hpp"
#include "fogledger/crypto/suite.hpp"

namespace fogledger::crypto {

using GroupKey = Digest;

GroupKey derive_group_key(std::uint64_t master_seed, std::string_view group_id);

struct DataRef {
    std::string block_id;
    std::string tx_id;
    auto operator<=>(const DataRef&) const = default;
};

/// Capability returned by a successful access check.
/// access_length counts the decryptions still allowed with this token.
struct AccessToken {
    std::string token_id;
    std::string uid;
    std::string group_id;
    NodeAddress subject;
    std::vector<DataRef> data_address;
    NodeAddress issuer;
    std::uint32_t access_length = 0;
    std::int64_t valid_until = 0;
    GroupKey key_material{};
};

// Output layout: 24-byte nonce followed by the secretbox ciphertext. The nonce
// is derived from key and plaintext so encryption is deterministic.
Bytes encrypt_group_payload(ByteView plain, const GroupKey& key);

// Consumes one unit of token.access_length on every call that gets past the
// expiry check, whether or not decryption then succeeds.
Expected<Bytes, CryptoErrc> decrypt_group_payload(ByteView cipher, AccessToken& token, std::int64_t now);

// Decryption with a raw key, for holders of the group key itself.
Expected<Bytes, CryptoErrc> decrypt_with_key(ByteView cipher, const GroupKey& key);

}  // namespace fogledger::crypto
