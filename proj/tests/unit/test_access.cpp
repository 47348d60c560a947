#include <doctest.h>

#include "fogledger/access/alerts.hpp"
#include "fogledger/access/registry.hpp"

using namespace fogledger;
using namespace fogledger::access;

namespace {

struct Ward {
    crypto::CryptoSuite suite{crypto::SchemeId::KeyedDigest};
    crypto::KeyPair patient = suite.enroll_derived({"patient", Role::User}, 2);
    crypto::KeyPair doctor = suite.enroll_derived({"doctor", Role::User}, 2);
    crypto::KeyPair nurse = suite.enroll_derived({"nurse", Role::User}, 2);
    crypto::KeyPair cloud = suite.enroll_derived({"cs-00", Role::CloudServer}, 2);
    ContractRegistry reg{suite};
    Evaluator at_cloud{cloud.owner, {}};

    Ward() {
        TokenTemplate t;
        t.access_length = 2;
        t.validity_ms = 1000;
        t.key_material = crypto::derive_group_key(2, "vitals");
        auto tx = reg.create_contract(patient, "vitals", {"tx-1", "tx-2"}, ContractScope::full(), t, 0);
        REQUIRE(tx);
    }

    Expected<GrantRecord, AccessErrc> grant(const crypto::KeyPair& caller, const NodeAddress& subject) {
        auto sig = sign_grant(suite, caller, "vitals", subject, false, reg.find("vitals")->version);
        return reg.grant_access("vitals", sig, subject);
    }
    Expected<GrantRecord, AccessErrc> revoke(const crypto::KeyPair& caller, const NodeAddress& subject) {
        auto sig = sign_grant(suite, caller, "vitals", subject, true, reg.find("vitals")->version);
        return reg.revoke_access("vitals", sig, subject);
    }
};

}  // namespace

TEST_SUITE("access") {

TEST_CASE("the creator can read their own contract's data") {
    Ward w;
    const AccessContract* c = w.reg.find("vitals");
    REQUIRE(c);
    CHECK(c->creator == w.patient.owner);
    CHECK(c->access_list.count("patient") == 1);
    CHECK(w.reg.check_access("vitals", w.patient.owner, w.at_cloud, 0));
}

TEST_CASE("contract creation errors") {
    Ward w;
    auto empty = w.reg.create_contract(w.patient, "labs", {}, ContractScope::full(), {}, 0);
    CHECK(empty.error() == AccessErrc::EmptyGroup);
    auto dup = w.reg.create_contract(w.patient, "vitals", {"tx-9"}, ContractScope::full(), {}, 0);
    CHECK(dup.error() == AccessErrc::IdCollision);
}

TEST_CASE("a granted doctor receives a populated token") {
    Ward w;
    REQUIRE(w.grant(w.patient, w.doctor.owner));
    auto tok = w.reg.check_access("vitals", w.doctor.owner, w.at_cloud, 500, {{"b7", "tx-1"}});
    REQUIRE(tok);
    CHECK_FALSE(tok->token_id.empty());
    CHECK(tok->uid == "doctor@vitals");
    CHECK(tok->subject == w.doctor.owner);
    CHECK(tok->issuer == w.cloud.owner);
    CHECK(tok->valid_until == 1500);
    CHECK(tok->access_length == 2);
    REQUIRE(tok->data_address.size() == 1);
    CHECK(tok->data_address[0].block_id == "b7");
    auto other = w.reg.check_access("vitals", w.doctor.owner, w.at_cloud, 500);
    CHECK(other->token_id != tok->token_id);
}

TEST_CASE("grant rules") {
    Ward w;
    CHECK(w.grant(w.nurse, w.doctor.owner).error() == AccessErrc::NotOwner);
    CHECK(w.grant(w.patient, {"stranger", Role::User}).error() == AccessErrc::UnknownSubject);
    CHECK(w.grant(w.patient, {"doctor", Role::Gateway}).error() == AccessErrc::UnknownSubject);
    // A signature for an older version cannot be replayed.
    auto stale = sign_grant(w.suite, w.patient, "vitals", w.doctor.owner, false, 0);
    REQUIRE(w.grant(w.patient, w.nurse.owner));
    CHECK(w.reg.grant_access("vitals", stale, w.doctor.owner).error() == AccessErrc::NotOwner);
    CHECK(w.reg.grant_access("nope", stale, w.doctor.owner).error() == AccessErrc::UnknownGroup);
}

TEST_CASE("a never-granted user is denied") {
    Ward w;
    CHECK(w.reg.check_access("vitals", w.nurse.owner, w.at_cloud, 0).error() == AccessErrc::Denied);
}

TEST_CASE("revocation denies future checks but outstanding tokens keep working") {
    Ward w;
    REQUIRE(w.grant(w.patient, w.doctor.owner));
    auto tok = w.reg.check_access("vitals", w.doctor.owner, w.at_cloud, 0);
    REQUIRE(tok);
    REQUIRE(w.revoke(w.patient, w.doctor.owner));
    CHECK(w.reg.check_access("vitals", w.doctor.owner, w.at_cloud, 10).error() == AccessErrc::Denied);

    Bytes cipher = crypto::encrypt_group_payload(bytes_of("hr=71"), crypto::derive_group_key(2, "vitals"));
    crypto::AccessToken held = *tok;
    auto plain = crypto::decrypt_group_payload(cipher, held, 900);
    REQUIRE(plain);
    CHECK(*plain == bytes_of("hr=71"));
    CHECK(crypto::decrypt_group_payload(cipher, held, 1001).error() == crypto::CryptoErrc::TokenExpired);
}

TEST_CASE("revoking a subject that was never granted fails") {
    Ward w;
    CHECK(w.revoke(w.patient, w.nurse.owner).error() == AccessErrc::NotGranted);
    CHECK(w.revoke(w.nurse, w.doctor.owner).error() == AccessErrc::NotOwner);
}

TEST_CASE("gateways evaluate only local contracts of their own cluster") {
    crypto::CryptoSuite suite(crypto::SchemeId::KeyedDigest);
    auto gw = suite.enroll_derived({"gw-00", Role::Gateway}, 1);
    ContractRegistry reg(suite);
    reg.create_contract(gw, "local", {"stream:c0"}, ContractScope::local("c0"), {}, 0);
    reg.create_contract(gw, "global", {"tx"}, ContractScope::full(), {}, 0);
    Evaluator own{gw.owner, "c0"}, other{{"gw-01", Role::Gateway}, "c1"};
    CHECK(reg.check_access("local", gw.owner, own, 0));
    CHECK(reg.check_access("local", gw.owner, other, 0).error() == AccessErrc::WrongScope);
    CHECK(reg.check_access("global", gw.owner, own, 0).error() == AccessErrc::WrongScope);
}

TEST_CASE("committed records bring a second registry to the same state") {
    Ward w;
    ContractRegistry replica(w.suite, [](const std::string& g) { return crypto::derive_group_key(2, g); });
    TokenTemplate t;
    auto contract_tx =
        w.reg.create_contract(w.patient, "labs", {"tx-5"}, ContractScope::full(), t, 0);
    REQUIRE(contract_tx);
    CHECK(replica.apply(*contract_tx));
    CHECK(replica.apply(*contract_tx));  // same record twice is harmless

    auto sig = sign_grant(w.suite, w.patient, "labs", w.doctor.owner, false, 0);
    auto rec = w.reg.grant_access("labs", sig, w.doctor.owner);
    REQUIRE(rec);
    auto rec_tx = w.reg.record_transaction(*rec, w.cloud, 0);
    CHECK(replica.apply(rec_tx));
    CHECK(replica.apply(rec_tx));
    CHECK(replica.find("labs")->access_list == w.reg.find("labs")->access_list);
    CHECK(replica.find("labs")->version == 1);
    CHECK(replica.find("labs")->token_template.key_material == crypto::derive_group_key(2, "labs"));

    // A fresh replica refuses a record whose grantor signature was altered.
    ContractRegistry fresh(w.suite);
    REQUIRE(fresh.apply(*contract_tx));
    chain::Transaction forged = rec_tx;
    forged.payload.back() ^= 1;
    CHECK_FALSE(fresh.apply(forged));
    CHECK(fresh.find("labs")->version == 0);
}

TEST_CASE("contracts and grant records encode losslessly") {
    Ward w;
    REQUIRE(w.grant(w.patient, w.doctor.owner));
    const AccessContract& c = *w.reg.find("vitals");
    Encoder e;
    c.encode(e);
    Decoder d(e.data());
    AccessContract back = AccessContract::decode(d);
    CHECK(back.token_template.key_material == crypto::GroupKey{});  // never serialized
    back.token_template.key_material = c.token_template.key_material;
    CHECK(back == c);

    GrantRecord g = *w.grant(w.patient, w.nurse.owner);
    Encoder ge;
    g.encode(ge);
    Decoder gd(ge.data());
    GrantRecord gb = GrantRecord::decode(gd);
    CHECK(gb.subject == g.subject);
    CHECK(gb.version == g.version);
    CHECK(gb.grantor_sig.bytes == g.grantor_sig.bytes);
}

TEST_CASE("alert rules fire on their comparator and source") {
    AlertEngine eng;
    eng.add_rule({"tachy", "heart_rate", Comparator::Greater, 120, {{"doctor", Role::User}}, std::nullopt});
    eng.add_rule({"low", "heart_rate", Comparator::LessEqual, 40, {}, std::string("dev-001")});
    CHECK(eng.evaluate("dev-000", "heart_rate", 121, 5).size() == 1);
    CHECK(eng.evaluate("dev-000", "heart_rate", 120, 5).empty());
    CHECK(eng.evaluate("dev-000", "heart_rate", 30, 5).empty());
    auto ev = eng.evaluate("dev-001", "heart_rate", 40, 9);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].rule_id == "low");
    CHECK(ev[0].timestamp == 9);
    CHECK(eng.evaluate("dev-000", "spo2", 200, 5).empty());
    CHECK(parse_comparator(">=") == Comparator::GreaterEqual);
    CHECK_FALSE(parse_comparator("~").has_value());
}

}
