// Acceptance run: one PASS/FAIL line per primary criterion. Everything runs
// sequentially in one process; each preset runs twice to check that the
// second run writes byte-identical CSV.

#include <chrono>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "fogledger/chain/merkle.hpp"
#include "fogledger/consensus/explorer.hpp"
#include "fogledger/harness/presets.hpp"
#include "fogledger/harness/runner.hpp"

using namespace fogledger;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct PresetPair {
    std::string first_csv;
    std::string second_csv;
    std::map<std::string, double> summary;
    double seconds = 0;
};

PresetPair run_twice(const std::string& preset) {
    const auto t0 = Clock::now();
    const sim::Scenario sc = sim::load_scenario(harness::scenario_dir() + "/" + harness::default_scenario_file(preset));
    const harness::PresetResult ra = harness::run_preset(preset, sc, sc.seed);
    const harness::PresetResult rb = harness::run_preset(preset, sc, sc.seed);
    PresetPair p;
    p.first_csv = ra.table.str();
    p.second_csv = rb.table.str();
    for (const auto& [k, v] : ra.table.summaries()) p.summary[k] = v;
    p.seconds = seconds_since(t0);
    return p;
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

double get(const std::map<std::string, double>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
}

std::string num(double v, int prec = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

bool within(double v, double target, double tol) { return v >= target - tol && v <= target + tol; }

Verdict check_safety(const sim::Scenario& adv) {
    constexpr std::size_t kSchedules = 10'000;
    const auto t0 = Clock::now();
    Verdict v{true, ""};
    for (std::size_t n : {4u, 5u, 7u}) {
        const bool ds = n == 4;  // colluding double signers cannot reach quorum at n = 4 either
        const harness::SafetyResult r = harness::safety_suite(n, kSchedules, adv.seed, adv.adversarial.network_drop,
                                                              adv.adversarial.network_duplicate, ds);
        const bool ok = r.summary.schedules >= kSchedules && r.summary.violations == 0 &&
                        r.summary.invalid_accepts == 0 && r.faulty == r.n - consensus::quorum_size(r.n);
        v.pass = v.pass && ok;
        v.detail += "n=" + std::to_string(r.n) + " f=" + std::to_string(r.faulty) + " schedules=" +
                    std::to_string(r.summary.schedules) + " violations=" + std::to_string(r.summary.violations) +
                    " progress=" + std::to_string(r.summary.schedules_with_progress) + "; ";
    }
    const double secs = seconds_since(t0);
    v.pass = v.pass && secs <= 300.0;
    v.detail += "runtime " + num(secs, 1) + " s (limit 300)";
    return v;
}

Verdict check_quorum() {
    Verdict v{consensus::quorum_size(5) == 3 && consensus::quorum_size(4) == 3 && consensus::quorum_size(1) == 1, ""};
    std::size_t below = 0, below_accepted = 0, at = 0, at_rejected = 0;
    for (std::size_t n = 1; n <= 9; ++n) {
        auto w = consensus::build_explorer_world(crypto::SchemeId::KeyedDigest, 5, consensus::numbered_roster(n),
                                                 {{"client", Role::User}});
        const consensus::ConsensusState st = consensus::initial_state(w->genesis.header);
        chain::Block b;
        b.transactions.push_back(chain::make_transaction(*w->suite, w->clients[0], "q", bytes_of("q"), "g", 0, 1000));
        b.header.height = 1;
        b.header.block_id = "q1";
        b.header.prev_hash = w->genesis.header.digest();
        b.header.body_hash = chain::hash_block_body(b.transactions);
        b.header.proposer = consensus::proposer_for_height(w->roster, 1);
        const Bytes msg = consensus::confirm_message(1, b.header.digest());
        // An outsider's signature pads short bundles to full length; it must not count.
        const auto outsider = w->suite->enroll_derived({"intruder", Role::CloudServer}, 5);
        const std::size_t q = consensus::quorum_size(n);
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            const auto k = static_cast<std::size_t>(__builtin_popcount(mask));
            if (k > q) continue;
            consensus::BlockAdd add{1, b.header.block_id, b.header.digest(), {}};
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) add.bundle.push_back(w->suite->sign(w->server_keys.at(w->roster.at(i).id), msg));
            const bool full = k == q;
            if (!full) {
                while (add.bundle.size() < q) add.bundle.push_back(w->suite->sign(outsider, msg));
                ++below;
            } else {
                ++at;
            }
            const bool accepted = consensus::on_block_add(st, w->roster, *w->suite, add, &b).accepted;
            if (!full && accepted) ++below_accepted;
            if (full && !accepted) ++at_rejected;
        }
    }
    v.pass = v.pass && below_accepted == 0 && at_rejected == 0;
    v.detail = "q(5)=" + std::to_string(consensus::quorum_size(5)) + " q(4)=" + std::to_string(consensus::quorum_size(4)) +
               " q(1)=" + std::to_string(consensus::quorum_size(1)) + "; " + std::to_string(below) +
               " short bundles over N<=9, accepted " + std::to_string(below_accepted) + "; " + std::to_string(at) +
               " quorum bundles, rejected " + std::to_string(at_rejected);
    return v;
}

Verdict check_tamper(const sim::Scenario& adv) {
    const harness::TamperResult r = harness::tamper_suite(2'000, adv.seed, adv.blockchain.scheme);
    return {r.mutations >= 1'000 && r.false_accepts == 0 && r.false_rejects == 0 && r.controls > 0,
            std::to_string(r.mutations) + " mutations, " + std::to_string(r.false_accepts) + " false accepts; " +
                std::to_string(r.controls) + " controls, " + std::to_string(r.false_rejects) + " false rejects"};
}

Verdict check_pruning(const sim::Scenario& adv) {
    const harness::PruneResult r = harness::pruning_suite(200, adv.seed, adv.blockchain.scheme);
    return {r.blocks >= 100 && r.violations == 0 && r.headers_retained && r.revalidates && r.index_consistent &&
                r.pruned > 0,
            std::to_string(r.blocks) + " blocks, " + std::to_string(r.rounds) + " rounds, " + std::to_string(r.pruned) +
                " pruned, " + std::to_string(r.violations) + " violations, headers " +
                (r.headers_retained ? "kept" : "lost") + ", revalidation " + (r.revalidates ? "ok" : "failed")};
}

Verdict check_access(const sim::Scenario& adv) {
    const harness::AccessResult r = harness::access_suite(adv, 10'000, adv.seed);
    return {r.requests >= 10'000 && r.violations == 0 && r.cross_decryptions == 0 && r.cross_attempts > 0 &&
                r.wrongful_denials == 0 && r.expired_session_denied,
            std::to_string(r.requests) + " requests over " + std::to_string(r.groups) + " groups (" +
                std::to_string(r.responses) + " served, " + std::to_string(r.denials) + " denied, " +
                std::to_string(r.mutations) + " grant/revoke), " + std::to_string(r.violations) +
                " unlisted responses, " + std::to_string(r.cross_decryptions) + "/" + std::to_string(r.cross_attempts) +
                " cross-group decryptions"};
}

Verdict check_loop(const PresetPair& p) {
    const double red = get(p.summary, "loop_delay_reduction_pct");
    const double runs = get(p.summary, "runs");
    return {within(red, 40, 15) && runs >= 20 && get(p.summary, "loop_delay_fog_lower_all_seeds") == 1,
            "fog " + num(get(p.summary, "loop_delay_fog_ms")) + " ms vs cloud " +
                num(get(p.summary, "loop_delay_cloud_ms")) + " ms, reduction " + num(red) + "% over " + num(runs, 0) +
                " seeds (target 40 +/- 15)"};
}

Verdict check_energy(const PresetPair& p) {
    const double fog = get(p.summary, "energy_fog"), cloud = get(p.summary, "energy_cloud");
    const double red = get(p.summary, "energy_reduction_pct");
    return {fog <= cloud && within(red, 36, 15) && get(p.summary, "energy_fog_not_above_cloud") == 1,
            "fog " + num(fog, 1) + " vs cloud " + num(cloud, 1) + ", reduction " + num(red) + "% (target 36 +/- 15)"};
}

Verdict check_retrieval(const PresetPair& p) {
    const double red = get(p.summary, "retrieval_reduction_pct");
    const double gap = get(p.summary, "retrieval_hit0_gap_ms");
    constexpr double kOneHopMs = 2.0;  // device to gateway link latency in the shipped topology
    const bool lower = get(p.summary, "retrieval_fog_ms_500kb") < get(p.summary, "retrieval_cloud_ms_500kb") &&
                       get(p.summary, "retrieval_fog_ms_2000kb") < get(p.summary, "retrieval_cloud_ms_2000kb");
    return {lower && within(red, 55, 15) && gap <= kOneHopMs,
            "500 KB " + num(get(p.summary, "retrieval_reduction_pct_500kb")) + "%, 2000 KB " +
                num(get(p.summary, "retrieval_reduction_pct_2000kb")) + "%, average " + num(red) +
                "% (target 55 +/- 15); hit ratio 0 gap " + num(gap, 3) + " ms (bound " + num(kOneHopMs, 0) + ")"};
}

Verdict check_scaling(const PresetPair& p) {
    const double lo = get(p.summary, "consensus_mean_ms_150"), hi = get(p.summary, "consensus_mean_ms_500");
    const double delta = 100.0 * (hi - lo) / lo;
    return {lo > 0 && delta < 15.0,
            "150 devices " + num(lo) + " ms, 300 devices " + num(get(p.summary, "consensus_mean_ms_300")) +
                " ms, 500 devices " + num(hi) + " ms, delta " + num(delta) + "% (limit 15)"};
}

Verdict check_determinism(const std::map<std::string, PresetPair>& all) {
    Verdict v{true, ""};
    for (const auto& [name, p] : all) {
        const bool same = !p.first_csv.empty() && p.first_csv == p.second_csv;
        v.pass = v.pass && same;
        v.detail += name + (same ? " identical" : " DIFFERS") + " (" + std::to_string(p.first_csv.size()) + " B, 2 runs in " +
                    num(p.seconds, 1) + " s); ";
    }
    v.detail.resize(v.detail.size() - 2);
    return v;
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    std::vector<std::pair<std::string, Verdict>> results;
    try {
        const sim::Scenario adv = sim::load_scenario(harness::scenario_dir() + "/adversarial.yaml");

        results.emplace_back("consensus-safety", check_safety(adv));
        results.emplace_back("quorum-arithmetic", check_quorum());
        results.emplace_back("tamper-evidence", check_tamper(adv));
        results.emplace_back("pruning", check_pruning(adv));
        results.emplace_back("access-soundness", check_access(adv));

        std::map<std::string, PresetPair> presets;
        for (const auto& name : harness::preset_names()) presets.emplace(name, run_twice(name));

        results.emplace_back("loop-delay", check_loop(presets.at("loop-delay")));
        results.emplace_back("energy", check_energy(presets.at("energy")));
        results.emplace_back("retrieval-delay", check_retrieval(presets.at("retrieval-delay")));
        results.emplace_back("consensus-scaling", check_scaling(presets.at("consensus-scaling")));
        results.emplace_back("determinism", check_determinism(presets));
    } catch (const std::exception& e) {
        std::printf("FAIL setup: %s\n", e.what());
        return 1;
    }

    int failed = 0;
    for (const auto& [name, v] : results) {
        std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
        failed += v.pass ? 0 : 1;
    }
    std::printf("%zu/%zu criteria passed in %.1f s\n", results.size() - static_cast<std::size_t>(failed),
                results.size(), seconds_since(t0));
    return failed == 0 ? 0 : 1;
}
