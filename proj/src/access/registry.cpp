#include "fogledger/access/registry.hpp"

#include <limits>

#include "fogledger/crypto/hash.hpp"

namespace fogledger::access {

namespace {
constexpr std::int64_t kNeverExpires = std::numeric_limits<std::int64_t>::max();
}

Expected<chain::Transaction, AccessErrc> ContractRegistry::create_contract(const crypto::KeyPair& creator,
                                                                           std::string group_id,
                                                                           std::vector<std::string> tx_group,
                                                                           ContractScope scope,
                                                                           TokenTemplate token_template,
                                                                           std::int64_t now) {
    if (contracts_.count(group_id)) return unexpected(AccessErrc::IdCollision);
    if (tx_group.empty()) return unexpected(AccessErrc::EmptyGroup);
    AccessContract c;
    c.group_id = group_id;
    c.creator = creator.owner;
    c.token_template = token_template;
    c.scope = std::move(scope);
    c.tx_group = std::move(tx_group);
    c.access_list.insert(creator.owner.id);
    Encoder enc;
    c.encode(enc);
    chain::Transaction tx = chain::make_transaction(suite_, creator, "contract/" + group_id, enc.take(),
                                                    std::string(chain::system_group::kContract), now, kNeverExpires);
    contracts_.emplace(group_id, std::move(c));
    return tx;
}

Expected<GrantRecord, AccessErrc> ContractRegistry::change(const std::string& group_id,
                                                           const crypto::Signature& caller_sig,
                                                           const NodeAddress& subject, bool revoke) {
    auto it = contracts_.find(group_id);
    if (it == contracts_.end()) return unexpected(AccessErrc::UnknownGroup);
    AccessContract& c = it->second;
    if (caller_sig.signer != c.creator) return unexpected(AccessErrc::NotOwner);
    auto rec = suite_.registry().find(subject.id);
    if (!rec || rec->address.role != subject.role) return unexpected(AccessErrc::UnknownSubject);
    if (revoke && !c.access_list.count(subject.id)) return unexpected(AccessErrc::NotGranted);
    GrantRecord g{group_id, subject, revoke, c.version, caller_sig};
    if (!suite_.verify(g.signing_bytes(), caller_sig)) return unexpected(AccessErrc::NotOwner);
    apply_record(g);
    return g;
}

Expected<GrantRecord, AccessErrc> ContractRegistry::grant_access(const std::string& group_id,
                                                                 const crypto::Signature& caller_sig,
                                                                 const NodeAddress& subject) {
    return change(group_id, caller_sig, subject, false);
}

Expected<GrantRecord, AccessErrc> ContractRegistry::revoke_access(const std::string& group_id,
                                                                  const crypto::Signature& caller_sig,
                                                                  const NodeAddress& subject) {
    return change(group_id, caller_sig, subject, true);
}

chain::Transaction ContractRegistry::record_transaction(const GrantRecord& record, const crypto::KeyPair& relay,
                                                        std::int64_t now) const {
    Encoder enc;
    record.encode(enc);
    std::string id = (record.revoke ? "revoke/" : "grant/") + record.group_id + "/" + record.subject.id + "/" +
                     std::to_string(record.version);
    auto group = record.revoke ? chain::system_group::kRevoke : chain::system_group::kGrant;
    return chain::make_transaction(suite_, relay, std::move(id), enc.take(), std::string(group), now, kNeverExpires);
}

bool ContractRegistry::apply_record(const GrantRecord& record) {
    auto it = contracts_.find(record.group_id);
    if (it == contracts_.end()) return false;
    AccessContract& c = it->second;
    if (record.version < c.version) return true;  // already applied here
    if (record.version > c.version) return false;
    if (record.grantor_sig.signer != c.creator || !suite_.verify(record.signing_bytes(), record.grantor_sig))
        return false;
    if (record.revoke)
        c.access_list.erase(record.subject.id);
    else
        c.access_list.insert(record.subject.id);
    ++c.version;
    return true;
}

bool ContractRegistry::apply(const chain::Transaction& tx) {
    try {
        Decoder dec(tx.payload);
        if (tx.access_group == chain::system_group::kContract) {
            AccessContract c = AccessContract::decode(dec);
            dec.expect_done();
            if (c.creator != tx.creator) return false;
            auto it = contracts_.find(c.group_id);
            if (it != contracts_.end()) return it->second.creator == c.creator;
            if (keys_) c.token_template.key_material = keys_(c.group_id);
            contracts_.emplace(c.group_id, std::move(c));
            return true;
        }
        if (tx.access_group == chain::system_group::kGrant || tx.access_group == chain::system_group::kRevoke) {
            GrantRecord g = GrantRecord::decode(dec);
            dec.expect_done();
            if (g.revoke != (tx.access_group == chain::system_group::kRevoke)) return false;
            return apply_record(g);
        }
    } catch (const DecodeError&) {
        return false;
    }
    return false;
}

Expected<crypto::AccessToken, AccessErrc> ContractRegistry::check_access(const std::string& group_id,
                                                                         const NodeAddress& subject,
                                                                         const Evaluator& evaluator, std::int64_t now,
                                                                         std::vector<crypto::DataRef> data_address) {
    auto it = contracts_.find(group_id);
    if (it == contracts_.end()) return unexpected(AccessErrc::UnknownGroup);
    const AccessContract& c = it->second;
    if (evaluator.address.role != Role::CloudServer) {
        if (c.scope.kind != ContractScope::Kind::LocalChain || c.scope.cluster != evaluator.cluster)
            return unexpected(AccessErrc::WrongScope);
    }
    if (!c.access_list.count(subject.id)) return unexpected(AccessErrc::Denied);

    Encoder id_src;
    id_src.str(evaluator.address.id).u64(tokens_issued_++).str(group_id).str(subject.id).i64(now);
    Digest d = crypto::sha256(id_src.data());

    crypto::AccessToken t;
    t.token_id = to_hex(ByteView{d.data(), 16});
    t.uid = subject.id + "@" + group_id;
    t.group_id = group_id;
    t.subject = subject;
    t.data_address = std::move(data_address);
    t.issuer = evaluator.address;
    t.access_length = c.token_template.access_length;
    t.valid_until = now + c.token_template.validity_ms;
    t.key_material = c.token_template.key_material;
    return t;
}

const AccessContract* ContractRegistry::find(const std::string& group_id) const {
    auto it = contracts_.find(group_id);
    return it == contracts_.end() ? nullptr : &it->second;
}

void ContractRegistry::note_data_tx(const std::string& group_id, const std::string& tx_id) {
    auto it = contracts_.find(group_id);
    if (it != contracts_.end()) it->second.tx_group.push_back(tx_id);
}

}  // namespace fogledger::access
