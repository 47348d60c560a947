#pragma once

#include <functional>
#include <map>

#include "fogledger/access/contract.hpp"
#include "fogledger/common/expected.hpp"

namespace fogledger::access {

/// The node evaluating a contract. Gateways carry their cluster; cloud
/// servers evaluate from the full chain and carry none.
struct Evaluator {
    NodeAddress address;
    std::string cluster;
};

/// Contract state as seen by one node. Local operations apply immediately
/// and hand back the record to commit; records arriving through committed
/// blocks are applied with apply(), which ignores records already applied.
class ContractRegistry {
public:
    using KeyProvider = std::function<crypto::GroupKey(const std::string& group_id)>;

    // The key provider supplies group keys for contracts learned from the
    // chain, whose records never carry key material.
    explicit ContractRegistry(const crypto::CryptoSuite& suite, KeyProvider keys = {})
        : suite_(suite), keys_(std::move(keys)) {}

    // Fails with IdCollision if the group id exists and EmptyGroup if
    // tx_group is empty. The creator starts on the access list.
    Expected<chain::Transaction, AccessErrc> create_contract(const crypto::KeyPair& creator, std::string group_id,
                                                             std::vector<std::string> tx_group, ContractScope scope,
                                                             TokenTemplate token_template, std::int64_t now);

    // caller_sig must be the contract creator's signature over the record
    // (see sign_grant) at the contract's current version. Revoking a subject
    // that is not listed fails with NotGranted.
    Expected<GrantRecord, AccessErrc> grant_access(const std::string& group_id, const crypto::Signature& caller_sig,
                                                   const NodeAddress& subject);
    Expected<GrantRecord, AccessErrc> revoke_access(const std::string& group_id, const crypto::Signature& caller_sig,
                                                    const NodeAddress& subject);

    // Wraps a grant or revoke record in a transaction signed by the relaying node.
    chain::Transaction record_transaction(const GrantRecord& record, const crypto::KeyPair& relay,
                                          std::int64_t now) const;

    // Applies a committed contract, grant or revoke record. Returns false for
    // records that conflict with local state or fail verification.
    bool apply(const chain::Transaction& tx);

    // Gateways may evaluate only LocalChain contracts of their own cluster.
    // Cloud servers evaluate any contract.
    Expected<crypto::AccessToken, AccessErrc> check_access(const std::string& group_id, const NodeAddress& subject,
                                                           const Evaluator& evaluator, std::int64_t now,
                                                           std::vector<crypto::DataRef> data_address = {});

    const AccessContract* find(const std::string& group_id) const;
    void note_data_tx(const std::string& group_id, const std::string& tx_id);
    std::size_t size() const { return contracts_.size(); }
    std::uint64_t tokens_issued() const { return tokens_issued_; }

private:
    Expected<GrantRecord, AccessErrc> change(const std::string& group_id, const crypto::Signature& caller_sig,
                                             const NodeAddress& subject, bool revoke);
    bool apply_record(const GrantRecord& record);

    const crypto::CryptoSuite& suite_;
    KeyProvider keys_;
    std::map<std::string, AccessContract> contracts_;
    std::uint64_t tokens_issued_ = 0;
};

}  // namespace fogledger::access
