#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "fogledger/chain/chain_file.hpp"
#include "fogledger/chain/expiry_index.hpp"
#include "fogledger/chain/validation.hpp"
#include "fogledger/crypto/hash.hpp"

using namespace fogledger;
using namespace fogledger::chain;
using fltest::block_on;
using fltest::tx_of;

namespace {

struct ChainFixture {
    CryptoSuite suite{crypto::SchemeId::KeyedDigest};
    KeyPair alice = suite.enroll_derived({"alice", Role::IoTDevice}, 1);
    KeyPair server = suite.enroll_derived({"cs-00", Role::CloudServer}, 1);
    Block genesis;

    ChainFixture() {
        genesis.transactions.push_back(tx_of(suite, server, "genesis/roster", 1'000'000, "@genesis"));
        genesis.header.block_id = "genesis";
        genesis.header.body_hash = hash_block_body(genesis.transactions);
        genesis.header.proposer = server.owner;
    }
};

}  // namespace

TEST_SUITE("chain") {

TEST_CASE("merkle root of one transaction is its hash rehashed") {
    ChainFixture f;
    Transaction t = tx_of(f.suite, f.alice, "t1");
    std::vector<Transaction> one{t};
    CHECK(hash_block_body(one) == crypto::sha256(view_of(crypto::sha256(t.serialize()))));
}

TEST_CASE("merkle root follows the pairing rule and depends on order") {
    ChainFixture f;
    Transaction t1 = tx_of(f.suite, f.alice, "t1");
    Transaction t2 = tx_of(f.suite, f.alice, "t2");
    Transaction t3 = tx_of(f.suite, f.alice, "t3");
    // Oracle computed directly from the leaf digests.
    Digest d1 = crypto::sha256(t1.serialize()), d2 = crypto::sha256(t2.serialize()),
           d3 = crypto::sha256(t3.serialize());
    auto pair = [](const Digest& a, const Digest& b) {
        crypto::Sha256Stream s;
        s.update(view_of(a)).update(view_of(b));
        return s.finish();
    };
    std::vector<Transaction> ab{t1, t2}, ba{t2, t1}, abc{t1, t2, t3};
    CHECK(hash_block_body(ab) == pair(d1, d2));
    CHECK(hash_block_body(ba) == pair(d2, d1));
    CHECK(hash_block_body(ab) != hash_block_body(ba));
    CHECK(hash_block_body(abc) == pair(pair(d1, d2), crypto::sha256(view_of(d3))));
    CHECK(hash_block_body(ab) == hash_block_body(std::vector<Transaction>{t1, t2}));
}

TEST_CASE("empty body is an EmptyBlock error") {
    std::vector<Transaction> none;
    try {
        hash_block_body(none);
        FAIL("expected ChainError");
    } catch (const ChainError& e) {
        CHECK(e.code() == ChainErrc::EmptyBlock);
    }
}

TEST_CASE("transactions need an expiry after creation") {
    ChainFixture f;
    CHECK_THROWS_AS(make_transaction(f.suite, f.alice, "t", {}, "g", 10, 10), ChainError);
    Transaction t = tx_of(f.suite, f.alice, "t");
    CHECK(verify_transaction(f.suite, t));
    t.payload.push_back(1);
    CHECK_FALSE(verify_transaction(f.suite, t));
}

TEST_CASE("blocks round-trip through serialization") {
    ChainFixture f;
    Block b = block_on(f.genesis.header, {tx_of(f.suite, f.alice, "t1"), tx_of(f.suite, f.alice, "t2")},
                       f.server.owner);
    Bytes wire = b.serialize();
    CHECK(Block::deserialize(wire) == b);
    CHECK(b.wire_size() == wire.size());
    wire.push_back(0);
    CHECK_THROWS_AS(Block::deserialize(wire), DecodeError);
}

TEST_CASE("untampered block validates") {
    ChainFixture f;
    Block b = block_on(f.genesis.header, {tx_of(f.suite, f.alice, "t1")}, f.server.owner);
    CHECK(validate_block(b, b.header, f.suite).valid());
    CHECK(validate_serialized_block(b.serialize(), b.header, f.suite).valid());
}

TEST_CASE("every single-bit flip of a payload is caught as BodyHashMismatch") {
    ChainFixture f;
    Block b = block_on(f.genesis.header, {tx_of(f.suite, f.alice, "t1"), tx_of(f.suite, f.alice, "t2")},
                       f.server.owner);
    const BlockHeader trusted = b.header;
    std::size_t flips = 0;
    for (std::size_t t = 0; t < b.transactions.size(); ++t) {
        for (std::size_t byte = 0; byte < b.transactions[t].payload.size(); ++byte) {
            for (int bit = 0; bit < 8; ++bit) {
                Block m = b;
                m.transactions[t].payload[byte] ^= static_cast<std::uint8_t>(1u << bit);
                CHECK(validate_block(m, trusted, f.suite).reason == InvalidReason::BodyHashMismatch);
                ++flips;
            }
        }
    }
    CHECK(flips == 8 * (b.transactions[0].payload.size() + b.transactions[1].payload.size()));
}

TEST_CASE("swapping in another transaction's signature is BadSignature") {
    ChainFixture f;
    Block b = block_on(f.genesis.header, {tx_of(f.suite, f.alice, "t1"), tx_of(f.suite, f.alice, "t2")},
                       f.server.owner);
    b.transactions[1].signature = b.transactions[0].signature;
    // The forger recomputes the body hash, so only the signature check can object.
    b.header.body_hash = hash_block_body(b.transactions);
    Validation v = validate_block(b, b.header, f.suite);
    CHECK(v.reason == InvalidReason::BadSignature);
    CHECK(v.tx_id == "t2");
}

TEST_CASE("structural validation failures") {
    ChainFixture f;
    Block b = block_on(f.genesis.header, {tx_of(f.suite, f.alice, "t1")}, f.server.owner);
    Block other = b;
    other.header.timestamp += 1;
    CHECK(validate_block(b, other.header, f.suite).reason == InvalidReason::HeaderMismatch);

    Block dup = b;
    dup.transactions.push_back(dup.transactions[0]);
    dup.header.body_hash = hash_block_body(dup.transactions);
    CHECK(validate_block(dup, dup.header, f.suite).reason == InvalidReason::DuplicateTx);

    Block empty = b;
    empty.transactions.clear();
    CHECK(validate_block(empty, empty.header, f.suite).reason == InvalidReason::EmptyBlock);

    Bytes junk{1, 2, 3};
    CHECK(validate_serialized_block(junk, b.header, f.suite).reason == InvalidReason::Malformed);
}

TEST_CASE("assembler stamp must come from a gateway over the body") {
    ChainFixture f;
    KeyPair gw = f.suite.enroll_derived({"gw-00", Role::Gateway}, 1);
    Block b = block_on(f.genesis.header, {tx_of(f.suite, f.alice, "t1")}, f.server.owner);
    b.assembler = AssemblerStamp{
        f.suite.sign(gw, assembler_message(b.header.block_id, b.header.origin_cluster, b.header.body_hash))};
    CHECK(validate_self_consistent(b, f.suite).valid());
    b.header.origin_cluster = "elsewhere";
    CHECK(validate_self_consistent(b, f.suite).reason == InvalidReason::BadAssemblerSignature);
}

TEST_CASE("header chain append rules") {
    ChainFixture f;
    ChainStore s(Tier::HeaderOnly);
    CHECK(s.append_header(f.genesis.header) == AppendResult::Ok);
    Block b1 = block_on(f.genesis.header, {tx_of(f.suite, f.alice, "t1")}, f.server.owner);

    BlockHeader zeroed = b1.header;
    zeroed.prev_hash = kZeroDigest;
    CHECK(s.append_header(zeroed) == AppendResult::BrokenLink);
    CHECK(s.append_header(b1.header) == AppendResult::Ok);

    Block b2 = block_on(b1.header, {tx_of(f.suite, f.alice, "t2")}, f.server.owner);
    Block b3 = block_on(b2.header, {tx_of(f.suite, f.alice, "t3")}, f.server.owner);
    ChainStore tip1(Tier::HeaderOnly);
    tip1.append_header(f.genesis.header);
    tip1.append_header(b1.header);
    CHECK(tip1.append_header(b3.header) == AppendResult::HeightGap);

    CHECK(*s.tip_height() == 1);
    CHECK(s.tip_digest() == b1.header.digest());
    CHECK(s.header_by_id("b1")->height == 1);
    CHECK(s.verify_header_chain());
}

TEST_CASE("body storage respects the tier") {
    ChainFixture f;
    Block b1 = block_on(f.genesis.header, {tx_of(f.suite, f.alice, "t1")}, f.server.owner);
    auto p = std::make_shared<const Block>(b1);

    ChainStore headers(Tier::HeaderOnly);
    headers.append_header(f.genesis.header);
    headers.append_header(b1.header);
    CHECK_THROWS_AS(headers.put_body(p), ChainError);

    ChainStore local(Tier::Local);
    local.append_header(f.genesis.header);
    CHECK_THROWS_AS(local.put_body(p), ChainError);  // header not stored yet
    local.append_header(b1.header);
    local.put_body(p);
    CHECK(local.body_by_id("b1") == p);
    CHECK(local.erase_body(1));
    CHECK(local.body(1) == nullptr);
    CHECK(local.header_count() == 2);
}

TEST_CASE("body cache honours its ttl") {
    ChainFixture f;
    Block b1 = block_on(f.genesis.header, {tx_of(f.suite, f.alice, "t1")}, f.server.owner);
    ChainStore s(Tier::HeaderOnly);
    s.cache_body(std::make_shared<const Block>(b1), 1000);
    CHECK(s.cached("b1", 1500, 1000) != nullptr);
    CHECK(s.cached("b1", 2500, 1000) == nullptr);
    CHECK(s.evict_cache(2500, 1000) == 1);
    CHECK(s.cache_size() == 0);
}

namespace {
// Local store with block i holding the given expiries.
struct PruneSetup {
    ChainFixture f;
    ChainStore store{Tier::Local};
    ExpiryIndex index;

    explicit PruneSetup(const std::vector<std::vector<std::int64_t>>& blocks) {
        store.append_header(f.genesis.header);
        BlockHeader prev = f.genesis.header;
        int n = 0;
        for (const auto& expiries : blocks) {
            std::vector<Transaction> txs;
            for (auto e : expiries) txs.push_back(tx_of(f.suite, f.alice, "t" + std::to_string(n++), e));
            Block b = block_on(prev, txs, f.server.owner);
            store.append_header(b.header);
            store.put_body(std::make_shared<const Block>(b));
            index.add_block(b);
            prev = b.header;
        }
    }
};
}  // namespace

TEST_CASE("pruning deletes bodies whose transactions all expired") {
    PruneSetup p({{100, 200}, {100, 5000}});
    CHECK(prune_expired(p.store, p.index, 0).empty());
    auto pruned = prune_expired(p.store, p.index, 1000);
    REQUIRE(pruned.size() == 1);
    CHECK(pruned[0] == "b1");
    CHECK(p.store.body(1) == nullptr);
    CHECK(p.store.body(2) != nullptr);  // one live transaction keeps the block
    CHECK(p.store.header_count() == 3);
    CHECK(p.store.verify_header_chain());
    CHECK(p.index.consistent_with(p.store));
    CHECK(p.index.find("t0") == nullptr);
    CHECK(p.index.find("t3")->expiry == 5000);
}

TEST_CASE("expiry must be strictly earlier than now") {
    PruneSetup p(std::vector<std::vector<std::int64_t>>{{100}});
    CHECK(prune_expired(p.store, p.index, 100).empty());
    CHECK(prune_expired(p.store, p.index, 101).size() == 1);
}

TEST_CASE("pruning a non-local store is refused") {
    ChainStore full(Tier::Full);
    ExpiryIndex idx;
    CHECK_THROWS_AS(prune_expired(full, idx, 0), ChainError);
}

TEST_CASE("chain files round-trip and detect corruption") {
    PruneSetup p({{100}, {200}, {300}});
    p.store.erase_body(2);
    auto path = std::filesystem::temp_directory_path() / "fogledger_chain_test.bin";
    save_chain(p.store, path);
    ChainStore back = load_chain(path, Tier::Local);
    CHECK(back.header_count() == 4);
    CHECK(back.body_count() == 2);
    CHECK(*back.body(3) == *p.store.body(3));
    CHECK(std::holds_alternative<BlockHeader>(read_record(path, 2)));
    CHECK(std::get<Block>(read_record(path, 3)).header.block_id == "b3");

    {
        std::fstream io(path, std::ios::in | std::ios::out | std::ios::binary);
        io.seekp(40);
        io.put('\x5a');
    }
    CHECK_THROWS_AS(load_chain(path, Tier::Local), ChainError);
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".idx");
}

}
