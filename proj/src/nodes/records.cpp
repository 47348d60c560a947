#include "fogledger/nodes/records.hpp"

namespace fogledger::nodes {

std::string_view errc_name(NodeErrc e) {
    switch (e) {
        case NodeErrc::NotRegistered: return "NotRegistered";
        case NodeErrc::AlreadyRegistered: return "AlreadyRegistered";
        case NodeErrc::BadCredentials: return "BadCredentials";
        case NodeErrc::NotAttached: return "NotAttached";
        case NodeErrc::InvalidBlock: return "InvalidBlock";
        case NodeErrc::UnknownGroup: return "UnknownGroup";
    }
    return "Unknown";
}

void Sample::encode(Encoder& enc) const {
    source.encode(enc);
    enc.str(metric).f64(value).bytes(data).i64(timestamp);
}

Sample Sample::decode(Decoder& dec) {
    Sample s;
    s.source = NodeAddress::decode(dec);
    s.metric = dec.str();
    s.value = dec.f64();
    s.data = dec.bytes();
    s.timestamp = dec.i64();
    return s;
}

Bytes encode_samples(const std::vector<Sample>& samples) {
    Encoder enc;
    enc.u32(static_cast<std::uint32_t>(samples.size()));
    for (const auto& s : samples) s.encode(enc);
    return enc.take();
}

std::vector<Sample> decode_samples(ByteView data) {
    Decoder dec(data);
    std::uint32_t n = dec.u32();
    std::vector<Sample> v;
    for (std::uint32_t i = 0; i < n; ++i) v.push_back(Sample::decode(dec));
    dec.expect_done();
    return v;
}

Bytes enrollment_message(const NodeAddress& device, ByteView public_key) {
    Encoder enc;
    enc.str("fogledger/enroll");
    device.encode(enc);
    enc.bytes(public_key);
    return enc.take();
}

Bytes registration_challenge(const NodeAddress& device, const NodeAddress& gateway, ByteView public_key) {
    Encoder enc;
    enc.str("fogledger/register");
    device.encode(enc);
    gateway.encode(enc);
    enc.bytes(public_key);
    return enc.take();
}

Credentials make_credentials(const crypto::CryptoSuite& suite, const crypto::KeyPair& provisioner,
                             const crypto::KeyPair& device, const NodeAddress& gateway) {
    Credentials c;
    c.public_key = device.public_key;
    c.enrollment = suite.sign(provisioner, enrollment_message(device.owner, device.public_key));
    c.proof = crypto::Signature{suite.scheme().sign(device.secret_key,
                                                    registration_challenge(device.owner, gateway, device.public_key)),
                                device.owner};
    return c;
}

Bytes DeviceRecord::serialize() const {
    Encoder enc;
    device.encode(enc);
    enc.bytes(public_key).str(cluster);
    gateway.encode(enc);
    return enc.take();
}

DeviceRecord DeviceRecord::deserialize(ByteView data) {
    Decoder dec(data);
    DeviceRecord r;
    r.device = NodeAddress::decode(dec);
    r.public_key = dec.bytes();
    r.cluster = dec.str();
    r.gateway = NodeAddress::decode(dec);
    dec.expect_done();
    return r;
}

Bytes HandoverRecord::serialize() const {
    Encoder enc;
    device.encode(enc);
    from.encode(enc);
    to.encode(enc);
    enc.i64(at);
    return enc.take();
}

HandoverRecord HandoverRecord::deserialize(ByteView data) {
    Decoder dec(data);
    HandoverRecord r;
    r.device = NodeAddress::decode(dec);
    r.from = NodeAddress::decode(dec);
    r.to = NodeAddress::decode(dec);
    r.at = dec.i64();
    dec.expect_done();
    return r;
}

}  // namespace fogledger::nodes
