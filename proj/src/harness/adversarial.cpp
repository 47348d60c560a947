#include "fogledger/harness/adversarial.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <stdexcept>

#include "fogledger/chain/expiry_index.hpp"
#include "fogledger/chain/merkle.hpp"
#include "fogledger/chain/validation.hpp"
#include "fogledger/consensus/roster.hpp"
#include "fogledger/sim/world.hpp"

namespace fogledger::harness {

namespace {

void merge(Coverage* into, const std::map<std::string, std::uint64_t>& from) {
    if (!into) return;
    for (const auto& [k, v] : from) (*into)[k] += v;
}

// Test fixture: one gateway assembling signed blocks on a local chain.
struct BlockFactory {
    crypto::CryptoSuite suite;
    crypto::KeyPair gateway;
    std::vector<crypto::KeyPair> devices;
    chain::Block genesis;
    std::uint64_t tx_seq = 0;

    BlockFactory(crypto::SchemeId scheme, std::uint64_t seed) : suite(scheme) {
        auto server = suite.enroll_derived(NodeAddress{"cs-00", Role::CloudServer}, seed);
        gateway = suite.enroll_derived(NodeAddress{"gw-00", Role::Gateway}, seed);
        for (int i = 0; i < 4; ++i)
            devices.push_back(suite.enroll_derived(NodeAddress{"dev-" + std::to_string(i), Role::IoTDevice}, seed));
        genesis = consensus::make_genesis(consensus::ServerRoster({server.owner}), suite, server, 0);
    }

    chain::Block make(const chain::BlockHeader& prev, std::vector<std::int64_t> expiries, Rng& rng) {
        chain::Block b;
        for (std::int64_t expiry : expiries) {
            const auto& dev = devices[rng.below(devices.size())];
            Bytes payload(8 + rng.below(48));
            for (auto& byte : payload) byte = static_cast<std::uint8_t>(rng.below(256));
            b.transactions.push_back(chain::make_transaction(suite, dev, "tx-" + std::to_string(tx_seq++),
                                                             std::move(payload), "data/cluster-0", 0, expiry));
        }
        b.header.height = prev.height + 1;
        b.header.block_id = "blk-" + std::to_string(b.header.height);
        b.header.prev_hash = prev.digest();
        b.header.body_hash = chain::hash_block_body(b.transactions);
        b.header.proposer = NodeAddress{"cs-00", Role::CloudServer};
        b.header.origin_cluster = "cluster-0";
        b.header.timestamp = static_cast<std::int64_t>(b.header.height) * 100;
        b.assembler = chain::AssemblerStamp{
            suite.sign(gateway, chain::assembler_message(b.header.block_id, b.header.origin_cluster, b.header.body_hash))};
        return b;
    }
};

sim::Scenario no_expectations(const sim::Scenario& s) {
    sim::Scenario copy = s;
    copy.expectations.clear();
    return copy;
}

}  // namespace

SafetyResult safety_suite(std::size_t n, std::size_t schedules, std::uint64_t first_seed, double network_drop,
                          double network_duplicate, bool double_sign,
                          const std::optional<std::filesystem::path>& failure_dir) {
    consensus::ExplorerConfig cfg;
    cfg.n = n;
    cfg.faulty = n - consensus::quorum_size(n);
    cfg.network_drop = network_drop;
    cfg.network_duplicate = network_duplicate;
    cfg.adversary.double_sign = double_sign;
    SafetyResult r;
    r.n = n;
    r.faulty = cfg.faulty;
    r.double_sign = double_sign;
    r.summary = consensus::explore(cfg, first_seed, schedules, failure_dir);
    return r;
}

TamperResult tamper_suite(std::size_t cases, std::uint64_t seed, crypto::SchemeId scheme) {
    BlockFactory f(scheme, seed);
    Rng rng(seed);
    TamperResult r;
    chain::BlockHeader prev = f.genesis.header;
    for (std::size_t c = 0; c < 2 * cases; ++c) {
        std::vector<std::int64_t> expiries(1 + rng.below(6), 1'000'000);
        const chain::Block block = f.make(prev, expiries, rng);
        Bytes wire = block.serialize();
        if (c % 2 == 0) {
            const std::size_t pos = rng.below(wire.size());
            wire[pos] = static_cast<std::uint8_t>(wire[pos] ^ (1 + rng.below(255)));
            ++r.mutations;
            if (chain::validate_serialized_block(wire, block.header, f.suite).valid()) ++r.false_accepts;
        } else {
            ++r.controls;
            if (!chain::validate_serialized_block(wire, block.header, f.suite).valid()) ++r.false_rejects;
        }
        prev = block.header;
    }
    return r;
}

PruneResult pruning_suite(std::size_t blocks, std::uint64_t seed, crypto::SchemeId scheme) {
    BlockFactory f(scheme, seed);
    Rng rng(seed ^ 0x7072756eULL);
    chain::ChainStore store(chain::Tier::Local);
    chain::ExpiryIndex index;
    store.append_header(f.genesis.header);
    std::map<std::uint64_t, std::int64_t> max_expiry;
    chain::BlockHeader prev = f.genesis.header;
    constexpr std::int64_t horizon = 100'000;
    for (std::size_t i = 0; i < blocks; ++i) {
        std::vector<std::int64_t> expiries(1 + rng.below(5));
        for (auto& e : expiries) e = 1 + static_cast<std::int64_t>(rng.below(horizon));
        auto block = std::make_shared<const chain::Block>(f.make(prev, expiries, rng));
        store.append_header(block->header);
        store.put_body(block);
        index.add_block(*block);
        max_expiry[block->header.height] = block->max_expiry();
        prev = block->header;
    }

    PruneResult r;
    r.blocks = blocks;
    const std::size_t headers_before = store.header_count();
    std::int64_t now = 0;
    while (now <= horizon + 1) {
        now += 1 + static_cast<std::int64_t>(rng.below(horizon / 20));
        r.pruned += chain::prune_expired(store, index, now).size();
        ++r.rounds;
        for (const auto& [h, latest] : max_expiry) {
            const bool all_expired = latest < now;
            if (all_expired == (store.body(h) != nullptr)) ++r.violations;
        }
    }
    r.headers_retained = store.header_count() == headers_before;
    r.revalidates = store.verify_header_chain();
    for (const auto& [h, body] : store.bodies())
        if (!chain::validate_block(*body, *store.header_at(h), f.suite).valid()) r.revalidates = false;
    r.index_consistent = index.consistent_with(store);
    return r;
}

AccessResult access_suite(const sim::Scenario& scenario, std::size_t requests, std::uint64_t seed, Coverage* coverage) {
    const sim::Scenario sc = no_expectations(scenario);
    sim::World w(sc, sim::Placement::Fog, seed);
    w.bootstrap();
    AccessResult r;
    r.groups = w.gateway_count();

    struct Record {
        std::string tx_id;
        std::size_t cluster;
        Bytes cipher;
    };
    std::vector<Record> records;
    for (std::size_t g = 0; g < w.gateway_count(); ++g) {
        std::size_t dev = w.device_count();
        for (std::size_t i = 0; i < w.device_count() && dev == w.device_count(); ++i)
            if (w.cluster_of(i) == g) dev = i;
        if (dev == w.device_count()) continue;
        nodes::Sample s;
        s.source = w.device_key(dev).owner;
        s.metric = "record";
        s.data.assign(1000, static_cast<std::uint8_t>(g));
        s.timestamp = w.now_ms();
        std::string id;
        w.ingest_at_gateway(dev, std::move(s), [&id](const chain::Transaction& tx) { id = tx.tx_id; });
        w.settle();
        const chain::Transaction* tx = nullptr;
        for (const auto& [h, body] : w.gateway(g).local_store().bodies())
            if (const auto* t = body->find_tx(id)) tx = t;
        if (!tx) throw std::runtime_error("access suite: record " + id + " was not committed");
        records.push_back(Record{id, g, tx->payload});
    }
    if (records.size() < 2) throw std::runtime_error("access suite needs records in at least two clusters");

    // Ground truth, updated with every grant and revoke. Each change is
    // committed everywhere before the next request, so it also holds at
    // whichever node ends up checking.
    std::vector<std::set<std::size_t>> listed(w.gateway_count());
    for (std::size_t i = 0; i < w.device_count(); ++i) listed[w.cluster_of(i)].insert(i);

    Rng rng(seed ^ 0x61636365ULL);
    bool done = false;
    std::function<void()> step;
    std::function<void()> after_commit = [&] {
        w.clock().after(sim::from_ms(1), w.quiescent() ? step : after_commit);
    };
    step = [&] {
        if (r.requests == requests) {
            done = true;
            return;
        }
        if (rng.chance(0.2)) {
            const std::size_t g = rng.below(w.gateway_count());
            const std::size_t i = rng.below(w.device_count());
            const bool on = listed[g].count(i) > 0;
            if (on ? w.revoke(g, i) : w.grant(g, i)) {
                if (on)
                    listed[g].erase(i);
                else
                    listed[g].insert(i);
                ++r.mutations;
            }
            after_commit();
            return;
        }
        const std::size_t i = rng.below(w.device_count());
        const Record& rec = records[rng.below(records.size())];
        const bool allowed = listed[rec.cluster].count(i) > 0;
        ++r.requests;
        w.request(i, {rec.tx_id}, 256, [&, allowed, rec](const nodes::RequestOutcome& out, bool) {
            const std::int64_t now = w.now_ms();
            if (const auto* resp = std::get_if<nodes::DataResponse>(&out)) {
                ++r.responses;
                if (!allowed) ++r.violations;
                crypto::AccessToken own = resp->token;
                const chain::Transaction* tx = resp->block->find_tx(rec.tx_id);
                if (!tx || !crypto::decrypt_group_payload(tx->payload, own, now)) ++r.own_decrypt_failures;
                for (const Record& other : records) {
                    if (other.cluster == rec.cluster) continue;
                    crypto::AccessToken t = resp->token;
                    ++r.cross_attempts;
                    if (crypto::decrypt_group_payload(other.cipher, t, now)) ++r.cross_decryptions;
                }
            } else {
                ++r.denials;
                if (allowed) ++r.wrongful_denials;
            }
            w.clock().after(1, step);
        });
    };
    step();
    if (!w.clock().run_while_not([&] { return done; }, w.clock().now() + sim::from_ms(1e9)))
        throw std::runtime_error("access suite did not finish");

    // A session key presented after its lifetime is refused.
    const std::size_t dev = records.front().cluster;
    std::size_t holder = 0;
    for (std::size_t i = 0; i < w.device_count(); ++i)
        if (w.cluster_of(i) == dev) holder = i;
    auto session = w.gateway(dev).authenticate(w.device_key(holder).owner, w.now_ms());
    if (session) {
        nodes::DataRequest req{"late", w.device_key(holder).owner, {records.front().tx_id}, *session};
        auto out = w.gateway(dev).handle_data_request(req, session->expires_at() + 1);
        const auto* denied = std::get_if<nodes::Denied>(&out);
        r.expired_session_denied = denied && denied->reason == nodes::DenyReason::AuthExpired;
    }
    w.cover("access-control");
    merge(coverage, w.metrics().coverage);
    return r;
}

CompromiseResult compromise_check(const sim::Scenario& scenario, std::uint64_t seed, Coverage* coverage) {
    const sim::Scenario sc = no_expectations(scenario);
    CompromiseResult r;
    for (bool attack : {true, false}) {
        sim::World w(sc, sim::Placement::Fog, seed);
        w.bootstrap();
        if (attack) w.set_compromised(0, true);
        const double period = static_cast<double>(sc.blockchain.block_period_ms);
        Rng rng(seed ^ 0x636f6d70ULL);
        for (std::size_t i = 0; i < w.device_count(); ++i)
            for (int k = 0; k < 20; ++k)
                w.clock().after(sim::from_ms(period * k + rng.uniform(0, period)), [&w, i] {
                    nodes::Sample s;
                    s.source = w.device_key(i).owner;
                    s.metric = w.scenario().app.metric;
                    s.value = w.scenario().app.value_mean;
                    s.timestamp = w.now_ms();
                    w.send_sample(i, std::move(s), 256);
                });
        // Long enough for every due-time window to lapse.
        const double rtt = 200;
        w.clock().run_until(w.clock().now() +
                            sim::from_ms(period * 20 + 4 * sc.blockchain.due_time_multiplier * (period + rtt)));
        sim::Metrics m = w.finish();
        if (attack) {
            r.reports_under_attack = m.missing_block_reports;
            r.dropped_tx = m.tx.dropped;
            r.conserved = m.tx.conserved();
        } else {
            r.reports_honest = m.missing_block_reports;
            r.conserved = r.conserved && m.tx.conserved();
        }
        merge(coverage, m.coverage);
    }
    return r;
}

sim::CsvTable run_adversarial(const sim::Scenario& scenario, std::uint64_t seed,
                              const std::optional<std::filesystem::path>& out_dir, Coverage& coverage) {
    const sim::AdversarialSpec& a = scenario.adversarial;
    sim::CsvTable t;
    std::optional<std::filesystem::path> failures;
    if (out_dir) failures = *out_dir / "failures";

    std::size_t violations = 0, invalid = 0;
    for (std::size_t n : a.server_counts) {
        const bool ds = std::find(a.double_sign_at.begin(), a.double_sign_at.end(), n) != a.double_sign_at.end();
        SafetyResult s = safety_suite(n, a.schedules, seed, a.network_drop, a.network_duplicate, ds, failures);
        const std::string e = "n" + std::to_string(n);
        t.row("safety_schedules", e, static_cast<double>(s.summary.schedules));
        t.row("safety_faulty_servers", e, static_cast<double>(s.faulty));
        t.row("safety_violations", e, static_cast<double>(s.summary.violations));
        t.row("safety_invalid_accepts", e, static_cast<double>(s.summary.invalid_accepts));
        t.row("safety_schedules_with_progress", e, static_cast<double>(s.summary.schedules_with_progress));
        violations += s.summary.violations;
        invalid += s.summary.invalid_accepts;
        if (out_dir) {
            consensus::ExplorerConfig cfg;
            cfg.n = n;
            cfg.faulty = s.faulty;
            cfg.network_drop = a.network_drop;
            cfg.network_duplicate = a.network_duplicate;
            cfg.adversary.double_sign = ds;
            consensus::RecordedSchedule rec;
            consensus::ScheduleExplorer(cfg).run(seed, &rec);
            std::filesystem::create_directories(*out_dir);
            rec.save(*out_dir / ("schedule-" + e + ".bin"));
        }
    }
    coverage["consensus"] += a.server_counts.size();
    coverage["crypto-suite"] += 1;

    const TamperResult tr = tamper_suite(a.tamper_cases, seed, scenario.blockchain.scheme);
    t.row("tamper_mutations", "blocks", static_cast<double>(tr.mutations));
    t.row("tamper_false_accepts", "blocks", static_cast<double>(tr.false_accepts));
    t.row("tamper_controls", "blocks", static_cast<double>(tr.controls));
    t.row("tamper_false_rejects", "blocks", static_cast<double>(tr.false_rejects));
    coverage["chain-core"] += 1;

    const PruneResult pr = pruning_suite(a.prune_blocks, seed, scenario.blockchain.scheme);
    t.row("prune_blocks", "local", static_cast<double>(pr.blocks));
    t.row("prune_rounds", "local", static_cast<double>(pr.rounds));
    t.row("prune_pruned", "local", static_cast<double>(pr.pruned));
    t.row("prune_violations", "local", static_cast<double>(pr.violations));
    coverage["chain-core"] += 1;

    const AccessResult ar = access_suite(scenario, a.access_requests, seed, &coverage);
    t.row("access_groups", "deployment", static_cast<double>(ar.groups));
    t.row("access_requests", "deployment", static_cast<double>(ar.requests));
    t.row("access_mutations", "deployment", static_cast<double>(ar.mutations));
    t.row("access_responses", "deployment", static_cast<double>(ar.responses));
    t.row("access_denials", "deployment", static_cast<double>(ar.denials));
    t.row("access_violations", "deployment", static_cast<double>(ar.violations));
    t.row("access_wrongful_denials", "deployment", static_cast<double>(ar.wrongful_denials));
    t.row("access_cross_attempts", "deployment", static_cast<double>(ar.cross_attempts));
    t.row("access_cross_decryptions", "deployment", static_cast<double>(ar.cross_decryptions));

    const CompromiseResult cr = compromise_check(scenario, seed, &coverage);
    t.row("missing_block_reports", "attacked", static_cast<double>(cr.reports_under_attack));
    t.row("missing_block_reports", "honest", static_cast<double>(cr.reports_honest));
    t.row("dropped_tx", "attacked", static_cast<double>(cr.dropped_tx));

    t.summary("safety_violations", static_cast<double>(violations));
    t.summary("safety_invalid_accepts", static_cast<double>(invalid));
    t.summary("tamper_false_accepts", static_cast<double>(tr.false_accepts));
    t.summary("tamper_false_rejects", static_cast<double>(tr.false_rejects));
    t.summary("prune_violations", static_cast<double>(pr.violations));
    t.summary("prune_headers_retained", pr.headers_retained ? 1 : 0);
    t.summary("prune_revalidates", pr.revalidates && pr.index_consistent ? 1 : 0);
    t.summary("access_violations", static_cast<double>(ar.violations));
    t.summary("access_wrongful_denials", static_cast<double>(ar.wrongful_denials));
    t.summary("access_cross_decryptions", static_cast<double>(ar.cross_decryptions));
    t.summary("access_own_decrypt_failures", static_cast<double>(ar.own_decrypt_failures));
    t.summary("session_expiry_enforced", ar.expired_session_denied ? 1 : 0);
    t.summary("compromise_detected", cr.reports_under_attack > 0 ? 1 : 0);
    t.summary("compromise_false_reports", static_cast<double>(cr.reports_honest));
    t.summary("tx_conserved", cr.conserved ? 1 : 0);
    return t;
}

}  // namespace fogledger::harness
