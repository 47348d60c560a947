#include "fogledger/crypto/hash.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

namespace fogledger::crypto {

static_assert(sizeof(crypto_hash_sha256_state) <= 128);

void ensure_initialized() {
    static const bool ok = [] { return sodium_init() >= 0; }();
    if (!ok) throw std::runtime_error("libsodium initialization failed");
}

Digest sha256(ByteView data) {
    ensure_initialized();
    Digest out;
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

Digest sha256(const Digest& a, const Digest& b) {
    std::uint8_t buf[64];
    std::memcpy(buf, a.data(), 32);
    std::memcpy(buf + 32, b.data(), 32);
    return sha256(ByteView{buf, sizeof buf});
}

Sha256Stream::Sha256Stream() {
    ensure_initialized();
    crypto_hash_sha256_init(reinterpret_cast<crypto_hash_sha256_state*>(state_));
}

Sha256Stream& Sha256Stream::update(ByteView data) {
    crypto_hash_sha256_update(reinterpret_cast<crypto_hash_sha256_state*>(state_), data.data(), data.size());
    return *this;
}

Digest Sha256Stream::finish() {
    Digest out;
    crypto_hash_sha256_final(reinterpret_cast<crypto_hash_sha256_state*>(state_), out.data());
    return out;
}

bool constant_time_equal(ByteView a, ByteView b) {
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    return sodium_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace fogledger::crypto
