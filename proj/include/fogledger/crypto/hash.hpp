#pragma once

#include "fogledger/common/bytes.hpp"

namespace fogledger::crypto {

// Initializes libsodium once; safe to call from any thread.
void ensure_initialized();

Digest sha256(ByteView data);
Digest sha256(const Digest& a, const Digest& b);

class Sha256Stream {
public:
    Sha256Stream();
    Sha256Stream& update(ByteView data);
    Digest finish();

private:
    alignas(16) unsigned char state_[128];
};

bool constant_time_equal(ByteView a, ByteView b);

}  // namespace fogledger::crypto
