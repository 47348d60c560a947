#include "fogledger/crypto/group_cipher.hpp"

#include <sodium.h>

#include "fogledger/crypto/hash.hpp"

namespace fogledger::crypto {

static_assert(crypto_secretbox_KEYBYTES == 32);

GroupKey derive_group_key(std::uint64_t master_seed, std::string_view group_id) {
    Encoder enc;
    enc.str("fogledger/group-key").u64(master_seed).str(group_id);
    return sha256(enc.data());
}

Bytes encrypt_group_payload(ByteView plain, const GroupKey& key) {
    ensure_initialized();
    Sha256Stream h;
    static constexpr std::uint8_t kTag[] = {'n', 'o', 'n', 'c', 'e'};
    h.update(ByteView{kTag, sizeof kTag}).update(view_of(key)).update(plain);
    Digest nd = h.finish();

    Bytes out(crypto_secretbox_NONCEBYTES + crypto_secretbox_MACBYTES + plain.size());
    std::copy(nd.begin(), nd.begin() + crypto_secretbox_NONCEBYTES, out.begin());
    crypto_secretbox_easy(out.data() + crypto_secretbox_NONCEBYTES, plain.data(), plain.size(), out.data(),
                          key.data());
    return out;
}

Expected<Bytes, CryptoErrc> decrypt_with_key(ByteView cipher, const GroupKey& key) {
    ensure_initialized();
    if (cipher.size() < crypto_secretbox_NONCEBYTES + crypto_secretbox_MACBYTES)
        return unexpected(CryptoErrc::DecryptFailed);
    Bytes plain(cipher.size() - crypto_secretbox_NONCEBYTES - crypto_secretbox_MACBYTES);
    const std::uint8_t* nonce = cipher.data();
    const std::uint8_t* box = cipher.data() + crypto_secretbox_NONCEBYTES;
    std::size_t box_len = cipher.size() - crypto_secretbox_NONCEBYTES;
    if (crypto_secretbox_open_easy(plain.data(), box, box_len, nonce, key.data()) != 0)
        return unexpected(CryptoErrc::DecryptFailed);
    return plain;
}

Expected<Bytes, CryptoErrc> decrypt_group_payload(ByteView cipher, AccessToken& token, std::int64_t now) {
    if (now > token.valid_until) return unexpected(CryptoErrc::TokenExpired);
    if (token.access_length == 0) return unexpected(CryptoErrc::TokenExhausted);
    --token.access_length;
    return decrypt_with_key(cipher, token.key_material);
}

}  // namespace fogledger::crypto
