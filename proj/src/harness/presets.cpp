#include "fogledger/harness/presets.hpp"

#include <algorithm>
#include <cmath>

#include "fogledger/sim/experiments.hpp"

namespace fogledger::harness {

namespace {

using sim::CsvTable;
using sim::Metrics;
using sim::Placement;

const std::vector<std::string> kInfraTiers = {"FLS", "FRS", "Cloud"};

void absorb(Coverage& into, const Metrics& m) {
    for (const auto& [k, v] : m.coverage) into[k] += v;
}

std::string seed_entity(std::uint64_t s) { return "seed-" + std::to_string(s); }

// busy + idle = duration per host, and energy matches the closed form.
bool energy_closes(const Metrics& m) {
    for (const auto& h : m.hosts) {
        if (std::abs(h.busy_ms + h.idle_ms - m.duration_ms) > 1e-6) return false;
        const double expect = (h.busy_power * h.busy_ms + h.idle_power * h.idle_ms) / 1000.0;
        if (std::abs(expect - h.energy) > 1e-9 * std::max(1.0, expect)) return false;
    }
    return true;
}

struct LoopPair {
    Metrics fog;
    Metrics cloud;
};

std::vector<LoopPair> loop_runs(const sim::Scenario& sc, std::uint64_t seed, Coverage& cov) {
    std::vector<LoopPair> out;
    for (std::size_t r = 0; r < sc.runs; ++r) {
        LoopPair p{sim::run_loop(sc, Placement::Fog, seed + r), sim::run_loop(sc, Placement::Cloud, seed + r)};
        absorb(cov, p.fog);
        absorb(cov, p.cloud);
        out.push_back(std::move(p));
    }
    return out;
}

PresetResult loop_delay(const sim::Scenario& sc, std::uint64_t seed) {
    PresetResult res;
    CsvTable& t = res.table;
    std::vector<double> fog, cloud, red;
    bool all_lower = true, conserved = true;
    std::size_t loops = 0;
    const auto runs = loop_runs(sc, seed, res.coverage);
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& [f, c] = runs[r];
        const std::string e = seed_entity(seed + r);
        const double mf = sim::mean(f.loop_delays_ms), mc = sim::mean(c.loop_delays_ms);
        t.row("loop_delay_mean_ms", "fog/" + e, mf);
        t.row("loop_delay_mean_ms", "cloud/" + e, mc);
        t.row("loop_delay_min_ms", "fog/" + e, sim::min_of(f.loop_delays_ms));
        t.row("loop_delay_max_ms", "fog/" + e, sim::max_of(f.loop_delays_ms));
        t.row("loop_delay_min_ms", "cloud/" + e, sim::min_of(c.loop_delays_ms));
        t.row("loop_delay_max_ms", "cloud/" + e, sim::max_of(c.loop_delays_ms));
        t.row("loops", "fog/" + e, static_cast<double>(f.loop_delays_ms.size()));
        t.row("loops", "cloud/" + e, static_cast<double>(c.loop_delays_ms.size()));
        t.row("loop_delay_reduction_pct", e, sim::reduction_pct(mc, mf));
        fog.push_back(mf);
        cloud.push_back(mc);
        red.push_back(sim::reduction_pct(mc, mf));
        all_lower = all_lower && mf < mc;
        conserved = conserved && f.tx.conserved() && c.tx.conserved();
        loops += f.loop_delays_ms.size() + c.loop_delays_ms.size();
    }
    t.summary("runs", static_cast<double>(runs.size()));
    t.summary("loop_delay_fog_ms", sim::mean(fog));
    t.summary("loop_delay_cloud_ms", sim::mean(cloud));
    t.summary("loop_delay_reduction_pct", sim::mean(red));
    t.summary("loop_delay_min_reduction_pct", sim::min_of(red));
    t.summary("loop_delay_max_reduction_pct", sim::max_of(red));
    t.summary("loop_delay_fog_lower_all_seeds", all_lower ? 1 : 0);
    t.summary("loops_measured", static_cast<double>(loops));
    t.summary("tx_conserved", conserved ? 1 : 0);
    return res;
}

PresetResult energy(const sim::Scenario& sc, std::uint64_t seed) {
    PresetResult res;
    CsvTable& t = res.table;
    const std::vector<std::string> all_tiers = [&] {
        std::vector<std::string> v;
        for (const auto& tier : sc.tiers) v.push_back(tier.name);
        return v;
    }();
    std::vector<double> fog, cloud, red, red_all;
    bool not_above = true, closes = true, conserved = true;
    const auto runs = loop_runs(sc, seed, res.coverage);
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& [f, c] = runs[r];
        const std::string e = seed_entity(seed + r);
        for (const auto& tier : all_tiers) {
            t.row("energy", "fog/" + tier + "/" + e, f.tier_energy({tier}));
            t.row("energy", "cloud/" + tier + "/" + e, c.tier_energy({tier}));
        }
        const double ef = f.tier_energy(kInfraTiers), ec = c.tier_energy(kInfraTiers);
        t.row("energy_infrastructure", "fog/" + e, ef);
        t.row("energy_infrastructure", "cloud/" + e, ec);
        t.row("energy_reduction_pct", e, sim::reduction_pct(ec, ef));
        fog.push_back(ef);
        cloud.push_back(ec);
        red.push_back(sim::reduction_pct(ec, ef));
        red_all.push_back(sim::reduction_pct(c.tier_energy(all_tiers), f.tier_energy(all_tiers)));
        not_above = not_above && ef <= ec;
        closes = closes && energy_closes(f) && energy_closes(c);
        conserved = conserved && f.tx.conserved() && c.tx.conserved();
    }
    t.summary("runs", static_cast<double>(runs.size()));
    t.summary("energy_fog", sim::mean(fog));
    t.summary("energy_cloud", sim::mean(cloud));
    t.summary("energy_reduction_pct", sim::mean(red));
    t.summary("energy_min_reduction_pct", sim::min_of(red));
    t.summary("energy_max_reduction_pct", sim::max_of(red));
    t.summary("energy_all_tiers_reduction_pct", sim::mean(red_all));
    t.summary("energy_fog_not_above_cloud", not_above ? 1 : 0);
    t.summary("energy_accounting_closes", closes ? 1 : 0);
    t.summary("tx_conserved", conserved ? 1 : 0);
    return res;
}

std::vector<double> delays_for(const Metrics& m, double size_kb) {
    std::vector<double> out;
    for (const auto& r : m.retrievals)
        if (r.size_kb == size_kb) out.push_back(r.delay_ms);
    return out;
}

PresetResult retrieval(const sim::Scenario& sc, std::uint64_t seed) {
    PresetResult res;
    CsvTable& t = res.table;
    const Metrics f = sim::run_retrieval(sc, Placement::Fog, seed);
    const Metrics c = sim::run_retrieval(sc, Placement::Cloud, seed);
    const Metrics f0 = sim::run_retrieval(sc, Placement::Fog, seed, 0.0);
    const Metrics c0 = sim::run_retrieval(sc, Placement::Cloud, seed, 0.0);
    for (const Metrics* m : {&f, &c, &f0, &c0}) absorb(res.coverage, *m);

    std::vector<double> red;
    bool all_lower = true;
    double gap0 = 0;
    std::size_t ok = 0, total = 0, local_served = 0;
    for (double size : sc.retrieval.sizes_kb) {
        const std::string e = sim::fmt(size).substr(0, sim::fmt(size).find('.')) + "kb";
        const double mf = sim::mean(delays_for(f, size)), mc = sim::mean(delays_for(c, size));
        const double mf0 = sim::mean(delays_for(f0, size)), mc0 = sim::mean(delays_for(c0, size));
        t.row("retrieval_mean_ms", "fog/" + e, mf);
        t.row("retrieval_mean_ms", "cloud/" + e, mc);
        t.row("retrieval_reduction_pct", e, sim::reduction_pct(mc, mf));
        t.row("retrieval_mean_ms", "fog/hit0/" + e, mf0);
        t.row("retrieval_mean_ms", "cloud/hit0/" + e, mc0);
        t.summary("retrieval_fog_ms_" + e, mf);
        t.summary("retrieval_cloud_ms_" + e, mc);
        t.summary("retrieval_reduction_pct_" + e, sim::reduction_pct(mc, mf));
        red.push_back(sim::reduction_pct(mc, mf));
        all_lower = all_lower && mf < mc;
        gap0 = std::max(gap0, std::abs(mf0 - mc0));
    }
    for (const Metrics* m : {&f, &c})
        for (const auto& r : m->retrievals) {
            ++total;
            ok += r.ok;
            local_served += r.served_locally;
        }
    t.summary("retrieval_reduction_pct", sim::mean(red));
    t.summary("retrieval_fog_lower_all_sizes", all_lower ? 1 : 0);
    t.summary("retrieval_hit0_gap_ms", gap0);
    t.summary("retrieval_validated_pct", total ? 100.0 * static_cast<double>(ok) / static_cast<double>(total) : 0);
    t.summary("retrieval_hit_ratio", sc.retrieval.hit_ratio);
    t.summary("tx_conserved", f.tx.conserved() && c.tx.conserved() && f0.tx.conserved() && c0.tx.conserved() ? 1 : 0);
    return res;
}

PresetResult scaling(const sim::Scenario& sc, std::uint64_t seed) {
    PresetResult res;
    CsvTable& t = res.table;
    std::vector<double> means;
    bool conserved = true;
    for (std::size_t n : sc.scaling.device_counts) {
        const Metrics m = sim::run_scaling(sc, seed, n);
        absorb(res.coverage, m);
        const std::string e = std::to_string(n) + "-devices";
        t.row("consensus_delay_min_ms", e, sim::min_of(m.consensus_delays_ms));
        t.row("consensus_delay_avg_ms", e, sim::mean(m.consensus_delays_ms));
        t.row("consensus_delay_max_ms", e, sim::max_of(m.consensus_delays_ms));
        t.row("consensus_rounds", e, static_cast<double>(m.consensus_delays_ms.size()));
        t.row("commit_delay_avg_ms", e, sim::mean(m.commit_delays_ms));
        t.row("blocks_committed", e, static_cast<double>(m.blocks_committed));
        t.row("transactions_committed", e, static_cast<double>(m.tx.committed));
        t.summary("consensus_mean_ms_" + std::to_string(n), sim::mean(m.consensus_delays_ms));
        means.push_back(sim::mean(m.consensus_delays_ms));
        conserved = conserved && m.tx.conserved();
    }
    // Growth from the smallest to the largest configured scale.
    t.summary("consensus_delta_pct", means.front() > 0 ? 100.0 * (means.back() - means.front()) / means.front() : 0);
    t.summary("tx_conserved", conserved ? 1 : 0);
    return res;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"consensus-scaling", "retrieval-delay", "loop-delay", "energy",
                                                   "adversarial"};
    return names;
}

bool is_preset(const std::string& name) {
    const auto& n = preset_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

std::string default_scenario_file(const std::string& preset) {
    if (preset == "consensus-scaling") return "scaling.yaml";
    if (preset == "adversarial") return "adversarial.yaml";
    if (is_preset(preset)) return "patient-monitoring.yaml";
    throw UnknownPreset("unknown preset '" + preset + "'");
}

PresetResult run_preset(const std::string& name, const sim::Scenario& scenario, std::uint64_t seed,
                        const std::optional<std::filesystem::path>& out_dir) {
    if (name == "loop-delay") return loop_delay(scenario, seed);
    if (name == "energy") return energy(scenario, seed);
    if (name == "retrieval-delay") return retrieval(scenario, seed);
    if (name == "consensus-scaling") return scaling(scenario, seed);
    if (name == "adversarial") {
        PresetResult res;
        res.table = run_adversarial(scenario, seed, out_dir, res.coverage);
        return res;
    }
    throw UnknownPreset("unknown preset '" + name + "'");
}

}  // namespace fogledger::harness
