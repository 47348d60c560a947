#pragma once

#include <memory>
#include <string>

#include "fogledger/chain/merkle.hpp"
#include "fogledger/consensus/roster.hpp"
#include "fogledger/nodes/cloud_server.hpp"
#include "fogledger/nodes/gateway.hpp"
#include "fogledger/nodes/iot_device.hpp"

namespace fltest {

using namespace fogledger;

inline constexpr std::uint64_t kKeySeed = 11;

inline chain::Transaction tx_of(const crypto::CryptoSuite& suite, const crypto::KeyPair& key, const std::string& id,
                                std::int64_t expiry = 1'000, const std::string& group = "g") {
    return chain::make_transaction(suite, key, id, bytes_of("payload-" + id), group, 0, expiry);
}

// Block linking onto `prev` with correct body hash; no assembler stamp.
inline chain::Block block_on(const chain::BlockHeader& prev, std::vector<chain::Transaction> txs,
                             const NodeAddress& proposer, const std::string& cluster = "c0") {
    chain::Block b;
    b.transactions = std::move(txs);
    b.header.height = prev.height + 1;
    b.header.block_id = "b" + std::to_string(prev.height + 1);
    b.header.prev_hash = prev.digest();
    b.header.body_hash = chain::hash_block_body(b.transactions);
    b.header.proposer = proposer;
    b.header.origin_cluster = cluster;
    b.header.timestamp = static_cast<std::int64_t>(prev.height + 1) * 100;
    return b;
}

/// Two clusters sharing one cloud server. With a single server the quorum is
/// one, so a proposal commits at once and the test hands the result to both
/// gateways.
struct TwoClusters {
    crypto::CryptoSuite suite{crypto::SchemeId::KeyedDigest};
    crypto::KeyPair server_key;
    crypto::KeyPair gw_key[2];
    crypto::KeyPair prov_key[2];
    crypto::KeyPair dev_key[2];
    crypto::KeyPair doctor_key;
    consensus::ServerRoster roster;
    chain::Block genesis;
    std::unique_ptr<nodes::GatewayNode> gw[2];
    std::unique_ptr<nodes::CloudServerNode> cloud;

    TwoClusters() {
        NodeAddress server{"cs-00", Role::CloudServer};
        server_key = suite.enroll_derived(server, kKeySeed);
        roster = consensus::ServerRoster({server});
        genesis = consensus::make_genesis(roster, suite, server_key, 0);
        for (int g = 0; g < 2; ++g) {
            const std::string n = std::to_string(g);
            gw_key[g] = suite.enroll_derived({"gw-" + n, Role::Gateway}, kKeySeed);
            prov_key[g] = suite.enroll_derived({"prov-" + n, Role::User}, kKeySeed);
            dev_key[g] = suite.derive({"dev-" + n, Role::IoTDevice}, kKeySeed);
            nodes::GatewayConfig cfg;
            cfg.address = gw_key[g].owner;
            cfg.cluster = "c" + n;
            cfg.upstream = server;
            cfg.provisioner = prov_key[g].owner;
            gw[g] = std::make_unique<nodes::GatewayNode>(suite, gw_key[g], cfg, genesis, keys());
        }
        nodes::CloudConfig cc;
        cc.address = server;
        cc.served_gateways = {gw_key[0].owner, gw_key[1].owner};
        cloud = std::make_unique<nodes::CloudServerNode>(suite, server_key, cc, roster, genesis, keys());
        doctor_key = suite.enroll_derived({"doctor", Role::User}, kKeySeed);
    }

    static access::ContractRegistry::KeyProvider keys() {
        return [](const std::string& group) { return crypto::derive_group_key(kKeySeed, group); };
    }

    std::string group(int g) const { return "grp-c" + std::to_string(g); }

    // Flushes gateway g, runs the candidate through the server and applies
    // the committed block at both gateways.
    chain::BlockPtr commit_from(int g, std::int64_t now) {
        auto cand = gw[g]->flush(now);
        if (!cand || !cloud->accept_candidate(*cand, gw[g]->address())) return nullptr;
        nodes::CloudStep step = cloud->poll(now);
        if (step.step.committed.size() != 1) return nullptr;
        chain::BlockPtr block = step.step.committed.front();
        for (auto& node : gw) {
            auto r = node->on_new_block(block, now);
            if (!r) return nullptr;
        }
        return block;
    }

    // Registers dev-g at gateway g, sets up group(g) with a contract and
    // commits both records.
    void enroll_cluster(int g, std::int64_t now) {
        gw[g]->set_device_group(dev_key[g].owner.id, group(g));
        auto creds = nodes::make_credentials(suite, prov_key[g], dev_key[g], gw[g]->address());
        (void)gw[g]->register_device(dev_key[g].owner, creds, now);
        access::TokenTemplate tmpl;
        tmpl.key_material = crypto::derive_group_key(kKeySeed, group(g));
        auto tx = gw[g]->contracts().create_contract(gw_key[g], group(g), {"stream:c" + std::to_string(g)},
                                                     access::ContractScope::local("c" + std::to_string(g)), tmpl, now);
        gw[g]->submit(std::move(tx).value());
        commit_from(g, now);
    }

    void grant(int g, const NodeAddress& subject) {
        auto* c = gw[g]->contracts().find(group(g));
        auto sig = access::sign_grant(suite, gw_key[g], group(g), subject, false, c->version);
        auto rec = gw[g]->contracts().grant_access(group(g), sig, subject);
        gw[g]->submit(gw[g]->contracts().record_transaction(rec.value(), gw_key[g], 0));
    }
};

}  // namespace fltest
