#include <doctest.h>

#include "fixtures.hpp"
#include "fogledger/nodes/inspect.hpp"
#include "fogledger/nodes/node_config.hpp"

using namespace fogledger;
using namespace fogledger::nodes;
using fltest::TwoClusters;

namespace {

Sample reading(const NodeAddress& src, double value, std::int64_t t) {
    return Sample{src, "heart_rate", value, Bytes(16, 0x42), t};
}

DataRequest request_for(TwoClusters& f, int g, const crypto::KeyPair& who, const std::string& tx, std::int64_t now) {
    auto session = f.gw[g]->authenticate(who.owner, now);
    REQUIRE(session);
    return DataRequest{"r-" + tx, who.owner, {tx}, *session};
}

}  // namespace

TEST_SUITE("nodes") {

TEST_CASE("device registration completes once its record commits") {
    TwoClusters f;
    auto creds = make_credentials(f.suite, f.prov_key[0], f.dev_key[0], f.gw[0]->address());
    auto tx = f.gw[0]->register_device(f.dev_key[0].owner, creds, 0);
    REQUIRE(tx);
    CHECK_FALSE(f.gw[0]->is_member("dev-0"));
    CHECK(f.gw[0]->register_device(f.dev_key[0].owner, creds, 0).error() == NodeErrc::AlreadyRegistered);
    REQUIRE(f.commit_from(0, 0));
    CHECK(f.gw[0]->is_member("dev-0"));
    CHECK(f.suite.registry().contains("dev-0"));
    CHECK_FALSE(f.gw[1]->is_member("dev-0"));
    CHECK(f.gw[0]->register_device(f.dev_key[0].owner, creds, 200).error() == NodeErrc::AlreadyRegistered);
}

TEST_CASE("invalid credentials are refused without a transaction") {
    TwoClusters f;
    // Signed by the other cluster's provisioner.
    auto wrong_prov = make_credentials(f.suite, f.prov_key[1], f.dev_key[0], f.gw[0]->address());
    CHECK(f.gw[0]->register_device(f.dev_key[0].owner, wrong_prov, 0).error() == NodeErrc::BadCredentials);
    // Proof made for another gateway.
    auto wrong_gw = make_credentials(f.suite, f.prov_key[0], f.dev_key[0], f.gw[1]->address());
    CHECK(f.gw[0]->register_device(f.dev_key[0].owner, wrong_gw, 0).error() == NodeErrc::BadCredentials);
    CHECK(f.gw[0]->pool_size() == 0);
}

TEST_CASE("samples in one window aggregate into one transaction") {
    TwoClusters f;
    f.enroll_cluster(0, 0);
    const NodeAddress dev = f.dev_key[0].owner;
    for (int i = 0; i < 5; ++i) {
        auto out = f.gw[0]->ingest(reading(dev, 70 + i, 100 + 20 * i), f.dev_key[0], 100 + 20 * i);
        REQUIRE(out);
        CHECK(out->aggregated == (i > 0));
    }
    REQUIRE(f.gw[0]->pool_size() == 1);
    const chain::Transaction& tx = f.gw[0]->pool().front();
    CHECK(tx.access_group == f.group(0));
    CHECK(verify_transaction(f.suite, tx));
    auto plain = crypto::decrypt_with_key(tx.payload, crypto::derive_group_key(fltest::kKeySeed, f.group(0)));
    REQUIRE(plain);
    auto samples = decode_samples(*plain);
    REQUIRE(samples.size() == 5);
    CHECK(samples[4].value == 74);
}

TEST_CASE("samples from unregistered devices are refused and empty windows flush nothing") {
    TwoClusters f;
    f.enroll_cluster(0, 0);
    CHECK(f.gw[0]->ingest(reading(f.dev_key[1].owner, 70, 100), f.dev_key[1], 100).error() ==
          NodeErrc::NotRegistered);
    CHECK(f.gw[0]->pool_size() == 0);
    CHECK_FALSE(f.gw[0]->flush(1000).has_value());
}

TEST_CASE("flush emits one block per period with the whole pool") {
    TwoClusters f;
    for (int i = 0; i < 7; ++i)
        f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "t" + std::to_string(i), 10'000));
    auto b = f.gw[0]->flush(0);
    REQUIRE(b);
    CHECK(b->transactions.size() == 7);
    CHECK(b->assembler.has_value());
    CHECK(f.gw[0]->pool_size() == 0);

    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "late", 10'000));
    CHECK_FALSE(f.gw[0]->flush(50).has_value());  // period not over yet
    CHECK(f.gw[0]->flush(100).has_value());
}

TEST_CASE("two committed flushes get strictly increasing heights") {
    TwoClusters f;
    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "a", 10'000));
    auto b1 = f.commit_from(0, 0);
    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "b", 10'000));
    auto b2 = f.commit_from(0, 100);
    REQUIRE(b1);
    REQUIRE(b2);
    CHECK(b2->header.height == b1->header.height + 1);
    CHECK(b2->header.prev_hash == b1->header.digest());
    CHECK(b1->header.proposer.id == "cs-00");
}

TEST_CASE("own-cluster blocks keep their body, foreign ones only a header") {
    TwoClusters f;
    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "x1", 10'000));
    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "x2", 10'000));
    auto cand = f.gw[0]->flush(0);
    REQUIRE(f.cloud->accept_candidate(*cand, f.gw[0]->address()));
    chain::BlockPtr block = f.cloud->poll(0).step.committed.at(0);

    auto own = f.gw[0]->on_new_block(block, 0);
    REQUIRE(own);
    CHECK(own->applied.at(0).stored == StoredAs::Body);
    CHECK(own->acknowledged == std::vector<std::string>{block->header.block_id});
    CHECK(f.gw[0]->expiry_index().find("x1") != nullptr);
    CHECK(f.gw[0]->expiry_index().find("x2") != nullptr);
    CHECK(f.gw[0]->local_store().body(1) != nullptr);

    auto foreign = f.gw[1]->on_new_block(block, 0);
    REQUIRE(foreign);
    CHECK(foreign->applied.at(0).stored == StoredAs::HeaderOnly);
    CHECK(f.gw[1]->local_store().body_count() == 0);
    CHECK(f.gw[1]->header_store().header_count() == 2);
    CHECK(f.gw[1]->expiry_index().size() == 0);
}

TEST_CASE("a block whose body does not match its header is rejected") {
    TwoClusters f;
    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "x1", 10'000));
    auto cand = f.gw[0]->flush(0);
    REQUIRE(f.cloud->accept_candidate(*cand, f.gw[0]->address()));
    chain::Block tampered = *f.cloud->poll(0).step.committed.at(0);
    tampered.transactions[0].payload[0] ^= 1;
    auto r = f.gw[1]->on_new_block(std::make_shared<const chain::Block>(tampered), 0);
    CHECK(r.error() == NodeErrc::InvalidBlock);
    CHECK(f.gw[1]->header_store().header_count() == 1);
    CHECK(f.gw[1]->invalid_blocks() == 1);
}

TEST_CASE("blocks ahead of the tip wait until the gap closes") {
    TwoClusters f;
    std::vector<chain::BlockPtr> blocks;
    for (int i = 0; i < 3; ++i) {
        f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "s" + std::to_string(i), 10'000));
        auto cand = f.gw[0]->flush(i * 100);
        REQUIRE(f.cloud->accept_candidate(*cand, f.gw[0]->address()));
        blocks.push_back(f.cloud->poll(i * 100).step.committed.at(0));
    }
    CHECK(f.gw[1]->on_new_block(blocks[2], 0)->buffered);
    CHECK(f.gw[1]->on_new_block(blocks[1], 0)->buffered);
    auto r = f.gw[1]->on_new_block(blocks[0], 0);
    REQUIRE(r);
    CHECK(r->applied.size() == 3);
    CHECK(*f.gw[1]->header_store().tip_height() == 3);
    CHECK(f.gw[1]->on_new_block(blocks[0], 0)->applied.empty());  // stale
}

TEST_CASE("data requests: local hit, forward, denial, expired session") {
    TwoClusters f;
    f.enroll_cluster(0, 0);
    f.enroll_cluster(1, 100);
    f.gw[0]->add_user(f.doctor_key.owner);
    f.gw[1]->add_user(f.doctor_key.owner);
    REQUIRE(f.gw[0]->ingest(reading(f.dev_key[0].owner, 80, 150), f.dev_key[0], 150));
    f.grant(0, f.doctor_key.owner);
    auto b = f.commit_from(0, 200);
    REQUIRE(b);
    const std::string tx0 = b->transactions.front().tx_id;

    SUBCASE("granted doctor gets the record from the gateway") {
        auto out = f.gw[0]->handle_data_request(request_for(f, 0, f.doctor_key, tx0, 300), 300);
        REQUIRE(std::holds_alternative<DataResponse>(out));
        const auto& resp = std::get<DataResponse>(out);
        CHECK(resp.served_by == f.gw[0]->address());
        CHECK(resp.token.data_address.at(0).tx_id == tx0);
        CHECK(resp.block->header.block_id == b->header.block_id);
    }
    SUBCASE("a request at another cluster is forwarded to the cloud, which answers") {
        DataRequest req = request_for(f, 1, f.doctor_key, tx0, 300);
        auto out = f.gw[1]->handle_data_request(req, 300);
        REQUIRE(std::holds_alternative<Forwarded>(out));
        CHECK(std::get<Forwarded>(out).upstream.id == "cs-00");
        auto relayed = f.cloud->handle_data_request(std::get<Forwarded>(out).request, 310);
        REQUIRE(std::holds_alternative<DataResponse>(relayed));
        CHECK(std::get<DataResponse>(relayed).served_by.id == "cs-00");
    }
    SUBCASE("a user never granted is denied") {
        auto nurse = f.suite.enroll_derived({"nurse", Role::User}, 1);
        f.gw[0]->add_user(nurse.owner);
        auto out = f.gw[0]->handle_data_request(request_for(f, 0, nurse, tx0, 300), 300);
        REQUIRE(std::holds_alternative<Denied>(out));
        CHECK(std::get<Denied>(out).reason == DenyReason::NotListed);
    }
    SUBCASE("an expired session is refused") {
        DataRequest req = request_for(f, 0, f.doctor_key, tx0, 300);
        auto out = f.gw[0]->handle_data_request(req, 300 + f.gw[0]->config().session_lifetime_ms + 1);
        REQUIRE(std::holds_alternative<Denied>(out));
        CHECK(std::get<Denied>(out).reason == DenyReason::AuthExpired);
    }
    SUBCASE("unknown transactions are not found at the cloud") {
        DataRequest req = request_for(f, 0, f.doctor_key, "no-such-tx", 300);
        auto fwd = f.gw[0]->handle_data_request(req, 300);
        REQUIRE(std::holds_alternative<Forwarded>(fwd));
        auto out = f.cloud->handle_data_request(std::get<Forwarded>(fwd).request, 300);
        CHECK(std::get<Denied>(out).reason == DenyReason::NotFound);
    }
}

TEST_CASE("handover moves fan-out to the new gateway") {
    TwoClusters f;
    f.enroll_cluster(0, 0);
    auto tx = handover(f.dev_key[0].owner, *f.gw[0], *f.gw[1], 100);
    REQUIRE(tx);
    CHECK(f.gw[1]->connected_devices().count("dev-0"));
    CHECK_FALSE(f.gw[0]->connected_devices().count("dev-0"));
    auto b = f.commit_from(1, 200);
    REQUIRE(b);
    f.gw[1]->submit(fltest::tx_of(f.suite, f.gw_key[1], "after", 10'000));
    auto cand = f.gw[1]->flush(300);
    REQUIRE(f.cloud->accept_candidate(*cand, f.gw[1]->address()));
    auto next = f.cloud->poll(300).step.committed.at(0);
    auto at_new = f.gw[1]->on_new_block(next, 300);
    auto at_old = f.gw[0]->on_new_block(next, 300);
    auto names = [](const std::vector<NodeAddress>& v) {
        std::set<std::string> s;
        for (const auto& a : v) s.insert(a.id);
        return s;
    };
    CHECK(names(at_new->forward_to).count("dev-0"));
    CHECK_FALSE(names(at_old->forward_to).count("dev-0"));
    CHECK(handover({"ghost", Role::IoTDevice}, *f.gw[0], *f.gw[1], 400).error() == NodeErrc::NotAttached);
}

TEST_CASE("a dropped candidate is reported once after its due time") {
    TwoClusters f;
    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "lost", 10'000));
    auto cand = f.gw[0]->flush(0);
    REQUIRE(cand);
    const std::int64_t due = f.gw[0]->due_interval();
    CHECK(due == 450);
    CHECK(f.gw[0]->detect_missing_blocks(due).empty());
    auto reports = f.gw[0]->detect_missing_blocks(due + 1);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].block_id == cand->header.block_id);
    CHECK(reports[0].tx_ids == std::vector<std::string>{"lost"});
    CHECK(reports[0].upstream.id == "cs-00");
    CHECK(f.gw[0]->detect_missing_blocks(due + 1000).empty());
}

TEST_CASE("a block committed in time clears its timer") {
    TwoClusters f;
    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "ok", 10'000));
    REQUIRE(f.commit_from(0, 0));
    CHECK(f.gw[0]->pending_acks().empty());
    CHECK(f.gw[0]->detect_missing_blocks(10'000).empty());
}

TEST_CASE("a compromised server that drops candidates gets reported") {
    TwoClusters f;
    f.cloud->set_drop_candidates(true);
    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "gone", 10'000));
    auto cand = f.gw[0]->flush(0);
    CHECK(f.cloud->accept_candidate(*cand, f.gw[0]->address()));
    CHECK(f.cloud->queued() == 0);
    CHECK(f.cloud->dropped_candidates() == 1);
    CHECK(f.gw[0]->detect_missing_blocks(10'000).size() == 1);
}

TEST_CASE("the cloud refuses candidates from gateways it does not serve") {
    TwoClusters f;
    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "x", 10'000));
    auto cand = f.gw[0]->flush(0);
    CHECK_FALSE(f.cloud->accept_candidate(*cand, f.gw[1]->address()));
    chain::Block unstamped = *cand;
    unstamped.assembler.reset();
    CHECK_FALSE(f.cloud->accept_candidate(unstamped, f.gw[0]->address()));
}

TEST_CASE("pruning at the gateway drops expired own-cluster bodies") {
    TwoClusters f;
    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "short", 500));
    REQUIRE(f.commit_from(0, 0));
    CHECK(f.gw[0]->prune(400).empty());
    CHECK(f.gw[0]->prune(600).size() == 1);
    CHECK(f.gw[0]->local_store().body_count() == 0);
    CHECK(f.gw[0]->local_store().header_count() == 2);
}

TEST_CASE("devices keep headers and cache bodies briefly") {
    TwoClusters f;
    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "x", 10'000));
    auto b1 = f.commit_from(0, 0);
    REQUIRE(b1);
    IoTDeviceNode dev({f.dev_key[0].owner, f.gw[0]->address(), 5'000}, f.genesis);
    auto r = dev.on_block(b1, 1'000);
    CHECK(r.status == DeviceBlockStatus::Stored);
    CHECK(dev.header_store().header_count() == 2);
    CHECK(dev.cached(b1->header.block_id, 5'000) != nullptr);
    CHECK(dev.evict(6'001) == 1);
    CHECK(dev.cached(b1->header.block_id, 6'001) == nullptr);
    CHECK(dev.header_store().header_count() == 2);
    CHECK(dev.validate_retrieved(*b1, f.suite).valid());
    CHECK(dev.on_block(b1, 7'000).status == DeviceBlockStatus::Stale);
}

TEST_CASE("a tampered body raises an alarm and leaves the device chain alone") {
    TwoClusters f;
    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "x", 10'000));
    auto b1 = f.commit_from(0, 0);
    chain::Block bad = *b1;
    bad.transactions[0].payload[0] ^= 0x01;
    IoTDeviceNode dev({f.dev_key[0].owner, f.gw[0]->address(), 5'000}, f.genesis);
    auto r = dev.on_block(std::make_shared<const chain::Block>(bad), 0);
    CHECK(r.status == DeviceBlockStatus::Tampered);
    CHECK(dev.tamper_alarms() == 1);
    CHECK(dev.header_store().header_count() == 1);
    CHECK(dev.on_block(b1, 0).status == DeviceBlockStatus::Stored);
}

TEST_CASE("devices catch up headers from the gateway") {
    TwoClusters f;
    std::vector<chain::BlockPtr> blocks;
    for (int i = 0; i < 3; ++i) {
        f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "h" + std::to_string(i), 10'000));
        blocks.push_back(f.commit_from(0, 100 * i));
    }
    IoTDeviceNode dev({f.dev_key[0].owner, f.gw[0]->address(), 5'000}, f.genesis);
    CHECK(dev.on_block(blocks[2], 0).status == DeviceBlockStatus::Buffered);
    CHECK(dev.buffered() == 1);
    // Two headers come from the gateway, then the buffered block fits.
    CHECK(dev.sync_headers(f.gw[0]->header_store(), 0) >= 2);
    CHECK(*dev.header_store().tip_height() == 3);
    CHECK(dev.buffered() == 0);
}

TEST_CASE("samples held during handover are released afterwards") {
    IoTDeviceNode dev({{"dev-0", Role::IoTDevice}, {"gw-0", Role::Gateway}, 5'000}, chain::Block{});
    dev.begin_handover();
    CHECK(dev.in_handover());
    dev.hold(reading({"dev-0", Role::IoTDevice}, 1, 0));
    dev.hold(reading({"dev-0", Role::IoTDevice}, 2, 1));
    auto released = dev.complete_handover({"gw-1", Role::Gateway});
    CHECK(released.size() == 2);
    CHECK_FALSE(dev.in_handover());
    CHECK(dev.gateway().id == "gw-1");
}

TEST_CASE("records round-trip") {
    std::vector<Sample> s{reading({"d", Role::IoTDevice}, 1.5, 3), reading({"d", Role::IoTDevice}, 2.5, 4)};
    CHECK(decode_samples(encode_samples(s)) == s);
    HandoverRecord h{{"d", Role::IoTDevice}, {"a", Role::Gateway}, {"b", Role::Gateway}, 42};
    auto back = HandoverRecord::deserialize(h.serialize());
    CHECK(back.to.id == "b");
    CHECK(back.at == 42);
    DeviceRecord d{{"d", Role::IoTDevice}, Bytes{1, 2, 3}, "c0", {"a", Role::Gateway}};
    CHECK(DeviceRecord::deserialize(d.serialize()).public_key == Bytes{1, 2, 3});
}

TEST_CASE("inspect reports storage tiers") {
    TwoClusters f;
    f.gw[0]->submit(fltest::tx_of(f.suite, f.gw_key[0], "x", 10'000));
    REQUIRE(f.commit_from(0, 0));
    auto own = inspect(*f.gw[0]);
    auto other = inspect(*f.gw[1]);
    CHECK(own["local"]["tier"] == "local");
    CHECK(own["local"]["bodies"].size() == 1);
    CHECK(other["local"]["bodies"].empty());
    CHECK(other["headers"]["tip_height"] == 1);
    auto cs = inspect(*f.cloud);
    CHECK(cs["full"]["tier"] == "full");
    CHECK(cs["full"]["bodies"].size() == 2);
}

TEST_CASE("node configs parse with positioned diagnostics") {
    const std::string ok = R"(nodes:
  - {address: gw-00, role: gateway, cluster: c0, upstream: cs-00, provisioner: prov-00, block_period_ms: 150}
  - {address: dev-000, role: device, upstream: gw-00, cache_ttl_ms: 2000}
  - {address: cs-00, role: cloud, serves: [gw-00]}
)";
    auto cfgs = parse_node_configs(ok, "nodes.yaml");
    REQUIRE(cfgs.size() == 3);
    CHECK(to_gateway_config(cfgs[0]).block_period_ms == 150);
    CHECK(to_gateway_config(cfgs[0]).upstream.role == Role::CloudServer);
    CHECK(to_device_config(cfgs[1]).cache_ttl_ms == 2000);
    CHECK(to_cloud_config(cfgs[2]).served_gateways.at(0).id == "gw-00");
    CHECK(cfgs[1].line == 3);

    auto message_of = [](const std::string& text) {
        try {
            parse_node_configs(text, "bad.yaml");
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message_of("address: gw\nrole: gateway\nupstream: cs\n") == "bad.yaml:1:1: gateways require a 'cluster'");
    CHECK(message_of("address: d\nrole: device\ncolour: red\nupstream: g\n") == "bad.yaml:3:1: unknown key 'colour'");
    CHECK(message_of("address: d\nrole: device\nupstream: g\ncache_ttl_ms: -4\n") ==
          "bad.yaml:4:15: 'cache_ttl_ms' must be positive");
    CHECK(message_of("address: d\nrole: wizard\n") == "bad.yaml:2:7: unknown role 'wizard'");
    CHECK(message_of("nodes:\n  - {address: a, role: user}\n  - {address: a, role: user}\n") ==
          "bad.yaml:3: duplicate address 'a'");
    CHECK(message_of("a: [1, 2\n").rfind("bad.yaml:", 0) == 0);
}

TEST_CASE("node configs load from a file") {
    auto cfgs = load_node_configs(FOGLEDGER_TEST_DATA_DIR "/nodes.yaml");
    CHECK(cfgs.size() == 4);
    CHECK_THROWS_AS(load_node_configs(FOGLEDGER_TEST_DATA_DIR "/missing.yaml"), ConfigError);
}

}
