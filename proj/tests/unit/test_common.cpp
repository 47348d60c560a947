#include <doctest.h>

#include "fogledger/common/codec.hpp"
#include "fogledger/common/expected.hpp"
#include "fogledger/common/identity.hpp"
#include "fogledger/common/rng.hpp"

using namespace fogledger;

TEST_SUITE("common") {

TEST_CASE("hex round trip and rejects bad input") {
    Bytes b{0x00, 0x7f, 0xab, 0xff};
    CHECK(to_hex(b) == "007fabff");
    CHECK(from_hex("007FABff") == b);
    CHECK_THROWS_AS(from_hex("abc"), std::invalid_argument);
    CHECK_THROWS_AS(from_hex("zz"), std::invalid_argument);
}

TEST_CASE("encoder writes big-endian integers with length-prefixed strings") {
    Encoder e;
    e.u32(0x01020304).str("hi");
    CHECK(to_hex(e.data()) == "01020304" "00000002" "6869");
}

TEST_CASE("decoder reads back every field kind") {
    Digest d{};
    d[0] = 9;
    d[31] = 7;
    Encoder e;
    e.u8(5).u32(70000).u64(1ULL << 40).i64(-3).f64(2.5).boolean(true).bytes(Bytes{1, 2}).str("x").digest(d);
    Decoder dec(e.data());
    CHECK(dec.u8() == 5);
    CHECK(dec.u32() == 70000);
    CHECK(dec.u64() == (1ULL << 40));
    CHECK(dec.i64() == -3);
    CHECK(dec.f64() == 2.5);
    CHECK(dec.boolean());
    CHECK(dec.bytes() == Bytes{1, 2});
    CHECK(dec.str() == "x");
    CHECK(dec.digest() == d);
    CHECK(dec.done());
    CHECK_NOTHROW(dec.expect_done());
}

TEST_CASE("decoder refuses truncated and trailing input") {
    Encoder e;
    e.str("hello");
    Bytes cut(e.data().begin(), e.data().end() - 1);
    Decoder short_dec(cut);
    CHECK_THROWS_AS(short_dec.str(), DecodeError);

    Bytes extra = e.data();
    extra.push_back(0);
    Decoder long_dec(extra);
    long_dec.str();
    CHECK_THROWS_AS(long_dec.expect_done(), DecodeError);

    Bytes bad_bool{2};
    Decoder b(bad_bool);
    CHECK_THROWS_AS(b.boolean(), DecodeError);
}

TEST_CASE("node addresses encode, order and print") {
    NodeAddress a{"gw-01", Role::Gateway};
    Encoder e;
    a.encode(e);
    Decoder d(e.data());
    CHECK(NodeAddress::decode(d) == a);
    CHECK(NodeAddress{"a", Role::User} < NodeAddress{"b", Role::CloudServer});
    CHECK(to_string(a) == "gw-01(gateway)");
    CHECK(parse_role("device") == Role::IoTDevice);
    CHECK_FALSE(parse_role("robot").has_value());
}

TEST_CASE("expected carries a value or an error") {
    Expected<int, std::string> ok(4);
    Expected<int, std::string> bad(unexpected(std::string("nope")));
    CHECK(ok);
    CHECK(*ok == 4);
    CHECK_FALSE(bad);
    CHECK(bad.error() == "nope");
    CHECK_THROWS_AS(bad.value(), BadExpectedAccess);
}

TEST_CASE("rng is reproducible and stays in range") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng r(1);
    for (int i = 0; i < 1000; ++i) {
        CHECK(r.below(7) < 7);
        double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(r.below(0) == 0);
}

}
