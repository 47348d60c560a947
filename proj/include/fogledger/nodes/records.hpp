#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fogledger/chain/types.hpp"
#include "fogledger/common/expected.hpp"

namespace fogledger::nodes {

enum class NodeErrc {
    NotRegistered,
    AlreadyRegistered,
    BadCredentials,
    NotAttached,
    InvalidBlock,
    UnknownGroup,
};
std::string_view errc_name(NodeErrc e);

struct Sample {
    NodeAddress source;
    std::string metric;
    double value = 0.0;
    Bytes data;
    std::int64_t timestamp = 0;

    bool operator==(const Sample&) const = default;
    void encode(Encoder& enc) const;
    static Sample decode(Decoder& dec);
};

Bytes encode_samples(const std::vector<Sample>& samples);
std::vector<Sample> decode_samples(ByteView data);

/// What a device presents to join a cluster: its public key, the cluster
/// provisioner's signature over (device, key), and the device's own signature
/// over a challenge naming the gateway.
struct Credentials {
    Bytes public_key;
    crypto::Signature enrollment;
    crypto::Signature proof;
};

Bytes enrollment_message(const NodeAddress& device, ByteView public_key);
Bytes registration_challenge(const NodeAddress& device, const NodeAddress& gateway, ByteView public_key);

Credentials make_credentials(const crypto::CryptoSuite& suite, const crypto::KeyPair& provisioner,
                             const crypto::KeyPair& device, const NodeAddress& gateway);

struct DeviceRecord {
    NodeAddress device;
    Bytes public_key;
    std::string cluster;
    NodeAddress gateway;

    Bytes serialize() const;
    static DeviceRecord deserialize(ByteView data);
};

struct HandoverRecord {
    NodeAddress device;
    NodeAddress from;
    NodeAddress to;
    std::int64_t at = 0;

    Bytes serialize() const;
    static HandoverRecord deserialize(ByteView data);
};

}  // namespace fogledger::nodes
