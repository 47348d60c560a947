#include <doctest.h>

#include <filesystem>

#include "fogledger/crypto/group_cipher.hpp"
#include "fogledger/crypto/hash.hpp"
#include "fogledger/crypto/session.hpp"

using namespace fogledger;
using namespace fogledger::crypto;

TEST_SUITE("crypto") {

TEST_CASE("sha256 matches a published test vector") {
    CHECK(to_hex(sha256(bytes_of("abc"))) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    Sha256Stream s;
    s.update(bytes_of("a")).update(bytes_of("bc"));
    CHECK(s.finish() == sha256(bytes_of("abc")));
}

TEST_CASE("signatures verify only for the signed message and signer") {
    for (SchemeId scheme : {SchemeId::Ed25519, SchemeId::KeyedDigest}) {
        CAPTURE(scheme_name(scheme));
        CryptoSuite suite(scheme);
        KeyPair alice = suite.enroll_derived({"alice", Role::User}, 5);
        KeyPair bob = suite.enroll_derived({"bob", Role::User}, 5);
        Bytes msg = bytes_of("reading 72 bpm");
        Signature sig = suite.sign(alice, msg);
        CHECK(suite.verify(msg, sig));

        Bytes flipped = msg;
        flipped[0] ^= 0x01;
        CHECK_FALSE(suite.verify(flipped, sig));

        Signature as_bob = sig;
        as_bob.signer = bob.owner;
        CHECK_FALSE(suite.verify(msg, as_bob));
        CHECK_FALSE(suite.scheme().verify(msg, sig.bytes, bob.public_key));

        Signature wrong_role = sig;
        wrong_role.signer.role = Role::Gateway;
        CHECK_FALSE(suite.verify(msg, wrong_role));
    }
}

TEST_CASE("signing with an unregistered key fails with UnknownKey") {
    CryptoSuite suite(SchemeId::Ed25519);
    KeyPair stray = suite.derive({"stray", Role::User}, 9);
    try {
        suite.sign(stray, bytes_of("x"));
        FAIL("expected CryptoError");
    } catch (const CryptoError& e) {
        CHECK(e.code() == CryptoErrc::UnknownKey);
    }
}

TEST_CASE("enrolling an address twice fails with DuplicateAddress") {
    CryptoSuite suite(SchemeId::KeyedDigest);
    suite.enroll_derived({"x", Role::User}, 1);
    try {
        suite.enroll_derived({"x", Role::User}, 2);
        FAIL("expected CryptoError");
    } catch (const CryptoError& e) {
        CHECK(e.code() == CryptoErrc::DuplicateAddress);
    }
}

TEST_CASE("key derivation is deterministic per seed and id") {
    CryptoSuite a(SchemeId::Ed25519), b(SchemeId::Ed25519);
    CHECK(a.derive({"n", Role::User}, 3).public_key == b.derive({"n", Role::User}, 3).public_key);
    CHECK(a.derive({"n", Role::User}, 3).public_key != a.derive({"n", Role::User}, 4).public_key);
    CHECK(derive_seed(3, "n") != derive_seed(3, "m"));
}

TEST_CASE("key registry round-trips through a file") {
    CryptoSuite suite(SchemeId::Ed25519);
    suite.enroll_derived({"gw-00", Role::Gateway}, 1);
    suite.enroll_derived({"dev-000", Role::IoTDevice}, 1);
    auto path = std::filesystem::temp_directory_path() / "fogledger_registry_test.bin";
    suite.registry().save(path, suite.scheme_id());
    auto [scheme, loaded] = KeyRegistry::load(path);
    std::filesystem::remove(path);
    CHECK(scheme == SchemeId::Ed25519);
    CHECK(loaded.records() == suite.registry().records());
    CHECK(loaded.find("gw-00")->address.role == Role::Gateway);
    CHECK_FALSE(loaded.add({"gw-00", Role::Gateway}, Bytes{1}));
}

TEST_CASE("session keys expire after their lifetime") {
    CryptoSuite suite(SchemeId::KeyedDigest);
    KeyPair fog = suite.enroll_derived({"gw-00", Role::Gateway}, 1);
    suite.enroll_derived({"doctor", Role::User}, 1);
    SessionIssuer issuer(suite, fog);
    SessionVerifier verifier(suite);
    SessionKey k = issuer.issue_session_key({"doctor", Role::User}, 1000, 5000);
    CHECK(verifier.check(k, 5500) == SessionStatus::Live);
    CHECK(verifier.check(k, 6001) == SessionStatus::Expired);
    // Rejection sticks even if a stale clock is presented later.
    CHECK(verifier.check(k, 5500) == SessionStatus::Expired);
    CHECK(verifier.is_rejected(k.key_id));
}

TEST_CASE("session issuance yields distinct ids and checks its inputs") {
    CryptoSuite suite(SchemeId::KeyedDigest);
    KeyPair fog = suite.enroll_derived({"gw-00", Role::Gateway}, 1);
    suite.enroll_derived({"doctor", Role::User}, 1);
    SessionIssuer issuer(suite, fog);
    auto a = issuer.issue_session_key({"doctor", Role::User}, 1000, 0);
    auto b = issuer.issue_session_key({"doctor", Role::User}, 1000, 0);
    CHECK(a.key_id != b.key_id);

    auto code_of = [&](auto&& fn) {
        try {
            fn();
        } catch (const CryptoError& e) {
            return e.code();
        }
        return CryptoErrc::UnknownKey;
    };
    CHECK(code_of([&] { issuer.issue_session_key({"doctor", Role::User}, 0, 0); }) == CryptoErrc::BadLifetime);
    CHECK(code_of([&] { issuer.issue_session_key({"doctor", Role::User}, -5, 0); }) == CryptoErrc::BadLifetime);
    CHECK(code_of([&] { issuer.issue_session_key({"nobody", Role::User}, 10, 0); }) == CryptoErrc::UnknownHolder);
}

TEST_CASE("a forged session attestation is refused") {
    CryptoSuite suite(SchemeId::KeyedDigest);
    KeyPair fog = suite.enroll_derived({"gw-00", Role::Gateway}, 1);
    suite.enroll_derived({"doctor", Role::User}, 1);
    SessionIssuer issuer(suite, fog);
    SessionVerifier verifier(suite);
    SessionKey k = issuer.issue_session_key({"doctor", Role::User}, 1000, 0);
    k.lifetime = 1'000'000;
    CHECK(verifier.check(k, 10) == SessionStatus::BadAttestation);
}

TEST_CASE("session keys encode and decode") {
    CryptoSuite suite(SchemeId::KeyedDigest);
    KeyPair fog = suite.enroll_derived({"gw-00", Role::Gateway}, 1);
    suite.enroll_derived({"doctor", Role::User}, 1);
    SessionIssuer issuer(suite, fog);
    SessionKey k = issuer.issue_session_key({"doctor", Role::User}, 1000, 0);
    Encoder e;
    k.encode(e);
    Decoder d(e.data());
    SessionKey back = SessionKey::decode(d);
    CHECK(back.key_id == k.key_id);
    CHECK(back.attestation == k.attestation);
    CHECK(back.expires_at() == 1000);
}

namespace {
AccessToken token_for(const GroupKey& key, std::int64_t valid_until, std::uint32_t uses = 4) {
    AccessToken t;
    t.key_material = key;
    t.valid_until = valid_until;
    t.access_length = uses;
    return t;
}
}  // namespace

TEST_CASE("group payload round trip with a matching token") {
    GroupKey k = derive_group_key(7, "grp-a");
    Bytes plain = bytes_of("ecg window");
    Bytes cipher = encrypt_group_payload(plain, k);
    CHECK(cipher != plain);
    CHECK(encrypt_group_payload(plain, k) == cipher);  // deterministic
    AccessToken t = token_for(k, 100);
    auto out = decrypt_group_payload(cipher, t, 50);
    REQUIRE(out);
    CHECK(*out == plain);
    CHECK(t.access_length == 3);
}

TEST_CASE("a token from another group cannot decrypt") {
    Bytes cipher = encrypt_group_payload(bytes_of("vitals"), derive_group_key(7, "grp-a"));
    AccessToken other = token_for(derive_group_key(7, "grp-b"), 100);
    auto out = decrypt_group_payload(cipher, other, 0);
    REQUIRE_FALSE(out);
    CHECK(out.error() == CryptoErrc::DecryptFailed);
}

TEST_CASE("expired and exhausted tokens are refused") {
    GroupKey k = derive_group_key(7, "grp-a");
    Bytes cipher = encrypt_group_payload(bytes_of("vitals"), k);
    AccessToken late = token_for(k, 100);
    CHECK(decrypt_group_payload(cipher, late, 101).error() == CryptoErrc::TokenExpired);
    AccessToken once = token_for(k, 100, 1);
    CHECK(decrypt_group_payload(cipher, once, 0));
    CHECK(decrypt_group_payload(cipher, once, 0).error() == CryptoErrc::TokenExhausted);
}

TEST_CASE("truncated ciphertext fails cleanly") {
    GroupKey k = derive_group_key(7, "grp-a");
    Bytes cipher = encrypt_group_payload(bytes_of("vitals"), k);
    cipher.resize(10);
    CHECK(decrypt_with_key(cipher, k).error() == CryptoErrc::DecryptFailed);
}

}
