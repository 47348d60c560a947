#include "fogledger/access/contract.hpp"

namespace fogledger::access {

std::string_view errc_name(AccessErrc e) {
    switch (e) {
        case AccessErrc::IdCollision: return "IdCollision";
        case AccessErrc::EmptyGroup: return "EmptyGroup";
        case AccessErrc::NotOwner: return "NotOwner";
        case AccessErrc::UnknownSubject: return "UnknownSubject";
        case AccessErrc::NotGranted: return "NotGranted";
        case AccessErrc::UnknownGroup: return "UnknownGroup";
        case AccessErrc::StaleRecord: return "StaleRecord";
        case AccessErrc::Denied: return "Denied";
        case AccessErrc::WrongScope: return "WrongScope";
        case AccessErrc::AuthExpired: return "AuthExpired";
    }
    return "Unknown";
}

void AccessContract::encode(Encoder& enc) const {
    enc.str(group_id);
    creator.encode(enc);
    // Key material stays off the chain; evaluators derive it locally.
    enc.u32(token_template.access_length).i64(token_template.validity_ms);
    enc.u32(static_cast<std::uint32_t>(access_list.size()));
    for (const auto& s : access_list) enc.str(s);
    enc.u8(static_cast<std::uint8_t>(scope.kind)).str(scope.cluster);
    enc.u32(static_cast<std::uint32_t>(tx_group.size()));
    for (const auto& t : tx_group) enc.str(t);
    enc.u64(version);
}

AccessContract AccessContract::decode(Decoder& dec) {
    AccessContract c;
    c.group_id = dec.str();
    c.creator = NodeAddress::decode(dec);
    c.token_template.access_length = dec.u32();
    c.token_template.validity_ms = dec.i64();
    std::uint32_t n = dec.u32();
    for (std::uint32_t i = 0; i < n; ++i) c.access_list.insert(dec.str());
    std::uint8_t kind = dec.u8();
    if (kind > 1) throw DecodeError("contract scope out of range");
    c.scope.kind = static_cast<ContractScope::Kind>(kind);
    c.scope.cluster = dec.str();
    std::uint32_t m = dec.u32();
    for (std::uint32_t i = 0; i < m; ++i) c.tx_group.push_back(dec.str());
    c.version = dec.u64();
    return c;
}

Bytes GrantRecord::signing_bytes() const {
    Encoder enc;
    enc.str(revoke ? "fogledger/revoke" : "fogledger/grant");
    enc.str(group_id);
    subject.encode(enc);
    enc.u64(version);
    return enc.take();
}

void GrantRecord::encode(Encoder& enc) const {
    enc.str(group_id);
    subject.encode(enc);
    enc.boolean(revoke);
    enc.u64(version);
    grantor_sig.encode(enc);
}

GrantRecord GrantRecord::decode(Decoder& dec) {
    GrantRecord g;
    g.group_id = dec.str();
    g.subject = NodeAddress::decode(dec);
    g.revoke = dec.boolean();
    g.version = dec.u64();
    g.grantor_sig = crypto::Signature::decode(dec);
    return g;
}

crypto::Signature sign_grant(const crypto::CryptoSuite& suite, const crypto::KeyPair& caller, const std::string& group,
                             const NodeAddress& subject, bool revoke, std::uint64_t version) {
    GrantRecord g{group, subject, revoke, version, {}};
    return suite.sign(caller, g.signing_bytes());
}

}  // namespace fogledger::access
