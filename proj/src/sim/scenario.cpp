#include "fogledger/sim/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace fogledger::sim {

std::string_view placement_name(Placement p) { return p == Placement::Fog ? "fog" : "cloud"; }

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& at, const std::string& path, const std::string& msg) const {
        std::ostringstream os;
        os << source_;
        if (at.IsDefined() && !at.Mark().is_null()) os << ':' << at.Mark().line + 1 << ':' << at.Mark().column + 1;
        os << ": " << path << ": " << msg;
        throw ScenarioError(os.str());
    }

    std::string where(const YAML::Node& at) const {
        if (!at.IsDefined() || at.Mark().is_null()) return source_;
        return source_ + ":" + std::to_string(at.Mark().line + 1);
    }

    void keys(const YAML::Node& map, const std::string& path, std::initializer_list<const char*> allowed) const {
        if (!map.IsMap()) fail(map, path, "expected a mapping");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& kv : map) {
            const auto k = kv.first.as<std::string>();
            if (!ok.count(k)) fail(kv.first, join(path, k), "unknown key");
        }
    }

    template <typename T>
    T get(const YAML::Node& n, const std::string& path) const {
        if (!n.IsScalar()) fail(n, path, "expected a scalar value");
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, path, "invalid value '" + n.Scalar() + "'");
        }
    }

    template <typename T>
    void opt(const YAML::Node& map, const std::string& path, const char* key, T& out) const {
        if (const YAML::Node n = map[key]) out = get<T>(n, join(path, key));
    }

    double positive(const YAML::Node& map, const std::string& path, const char* key, double current) const {
        const YAML::Node n = map[key];
        if (!n) return current;
        const double v = get<double>(n, join(path, key));
        if (!(v > 0)) fail(n, join(path, key), "must be positive");
        return v;
    }

    double non_negative(const YAML::Node& map, const std::string& path, const char* key, double current) const {
        const YAML::Node n = map[key];
        if (!n) return current;
        const double v = get<double>(n, join(path, key));
        if (v < 0) fail(n, join(path, key), "must not be negative");
        return v;
    }

    std::size_t count(const YAML::Node& map, const std::string& path, const char* key, std::size_t current,
                      std::size_t min = 1) const {
        const YAML::Node n = map[key];
        if (!n) return current;
        const auto v = get<long long>(n, join(path, key));
        if (v < static_cast<long long>(min)) fail(n, join(path, key), "must be at least " + std::to_string(min));
        return static_cast<std::size_t>(v);
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

private:
    std::string source_;
};

void apply_override(YAML::Node root, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw ScenarioError("override '" + spec + "': expected KEY=VALUE");
    const std::string path = spec.substr(0, eq);
    YAML::Node value;
    try {
        value = YAML::Load(spec.substr(eq + 1));
    } catch (const YAML::Exception& e) {
        throw ScenarioError("override '" + spec + "': " + e.msg);
    }
    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string p; std::getline(ss, p, '.');) {
        if (p.empty()) throw ScenarioError("override '" + spec + "': empty path component");
        parts.push_back(p);
    }
    // yaml-cpp nodes are handles; walking with operator[] on a copy edits the tree.
    YAML::Node cur = root;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const bool last = i + 1 == parts.size();
        if (cur.IsSequence()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(parts[i]);
            } catch (const std::exception&) {
                throw ScenarioError("override '" + spec + "': '" + parts[i] + "' is not a list index");
            }
            if (idx >= cur.size()) throw ScenarioError("override '" + spec + "': index " + parts[i] + " out of range");
            if (last) {
                cur[idx] = value;
                return;
            }
            YAML::Node next = cur[idx];
            cur.reset(next);
        } else if (cur.IsMap() || cur.IsNull() || !cur.IsDefined()) {
            if (last) {
                cur[parts[i]] = value;
                return;
            }
            YAML::Node next = cur[parts[i]];
            cur.reset(next);
        } else {
            throw ScenarioError("override '" + spec + "': '" + parts[i - 1] + "' is a scalar");
        }
    }
}

DeviceProfile read_profile(const Reader& r, const YAML::Node& n, const std::string& path, const std::string& name) {
    r.keys(n, path, {"mips", "downlink_mb", "uplink_mb", "memory_gb", "busy_power", "idle_power"});
    DeviceProfile p;
    p.name = name;
    for (const char* k : {"mips", "downlink_mb", "uplink_mb", "memory_gb", "busy_power", "idle_power"})
        if (!n[k]) r.fail(n, path, std::string("missing '") + k + "'");
    p.mips = r.positive(n, path, "mips", 0);
    p.downlink_mb = r.positive(n, path, "downlink_mb", 0);
    p.uplink_mb = r.positive(n, path, "uplink_mb", 0);
    p.memory_gb = r.positive(n, path, "memory_gb", 0);
    p.busy_power = r.positive(n, path, "busy_power", 0);
    p.idle_power = r.positive(n, path, "idle_power", 0);
    if (p.busy_power < p.idle_power) r.fail(n["busy_power"], path + ".busy_power", "must be at least idle_power");
    return p;
}

AppModuleSpec read_module(const Reader& r, const YAML::Node& n, const std::string& path, const std::string& name) {
    r.keys(n, path, {"program_size_mb", "packet_size_kb", "ram_gb", "instructions"});
    for (const char* k : {"program_size_mb", "packet_size_kb", "ram_gb"})
        if (!n[k]) r.fail(n, path, std::string("missing '") + k + "'");
    AppModuleSpec m;
    m.name = name;
    m.program_size_mb = r.positive(n, path, "program_size_mb", 0);
    m.packet_size_kb = r.positive(n, path, "packet_size_kb", 0);
    m.ram_gb = r.positive(n, path, "ram_gb", 0);
    m.instructions = r.non_negative(n, path, "instructions", 0);
    return m;
}

Attach read_attach(const Reader& r, const YAML::Node& n, const std::string& path) {
    const auto s = r.get<std::string>(n, path);
    if (s == "random") return Attach::Random;
    if (s == "round_robin") return Attach::RoundRobin;
    if (s == "all") return Attach::All;
    if (s == "mesh") return Attach::Mesh;
    r.fail(n, path, "unknown attach mode '" + s + "' (random, round_robin, all, mesh)");
}

std::vector<Expectation> read_expectations(const Reader& r, const YAML::Node& list, const std::string& path) {
    if (!list.IsSequence()) r.fail(list, path, "expected a list");
    std::vector<Expectation> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const YAML::Node e = list[i];
        const std::string p = path + "." + std::to_string(i);
        r.keys(e, p, {"metric", "min", "max"});
        if (!e["metric"]) r.fail(e, p, "missing 'metric'");
        Expectation x;
        x.metric = r.get<std::string>(e["metric"], p + ".metric");
        if (e["min"]) x.min = r.get<double>(e["min"], p + ".min");
        if (e["max"]) x.max = r.get<double>(e["max"], p + ".max");
        if (!x.min && !x.max) r.fail(e, p, "needs 'min' or 'max'");
        if (x.min && x.max && *x.min > *x.max) r.fail(e, p, "'min' exceeds 'max'");
        x.where = r.where(e);
        out.push_back(std::move(x));
    }
    return out;
}

template <typename T>
std::vector<T> read_list(const Reader& r, const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence() || n.size() == 0) r.fail(n, path, "expected a non-empty list");
    std::vector<T> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(r.get<T>(n[i], path + "." + std::to_string(i)));
    return out;
}

Scenario interpret(const YAML::Node& root, const Reader& r, const std::string& source) {
    Scenario s;
    s.source = source;
    r.keys(root, "", {"name", "seed", "runs", "duration_ms", "profiles", "topology", "roles", "placement", "modules",
                      "app", "blockchain", "retrieval", "scaling", "adversarial", "alerts", "expectations"});
    if (!root["name"]) r.fail(root, "name", "missing");
    s.name = r.get<std::string>(root["name"], "name");
    r.opt(root, "", "seed", s.seed);
    s.runs = r.count(root, "", "runs", s.runs);
    s.duration_ms = r.positive(root, "", "duration_ms", s.duration_ms);

    if (const YAML::Node n = root["profiles"]) {
        if (!n.IsMap()) r.fail(n, "profiles", "expected a mapping");
        for (const auto& kv : n) {
            const auto name = kv.first.as<std::string>();
            s.profiles[name] = read_profile(r, kv.second, "profiles." + name, name);
        }
    }
    if (const YAML::Node n = root["topology"]) {
        r.keys(n, "topology", {"tiers", "links"});
        if (const YAML::Node tiers = n["tiers"]) {
            if (!tiers.IsSequence()) r.fail(tiers, "topology.tiers", "expected a list");
            for (std::size_t i = 0; i < tiers.size(); ++i) {
                const std::string p = "topology.tiers." + std::to_string(i);
                const YAML::Node t = tiers[i];
                r.keys(t, p, {"name", "profile", "count"});
                if (!t["name"]) r.fail(t, p, "missing 'name'");
                TierSpec ts;
                ts.name = r.get<std::string>(t["name"], p + ".name");
                ts.profile = ts.name;
                r.opt(t, p, "profile", ts.profile);
                ts.count = r.count(t, p, "count", 1);
                for (const auto& other : s.tiers)
                    if (other.name == ts.name) r.fail(t["name"], p + ".name", "duplicate tier '" + ts.name + "'");
                s.tiers.push_back(std::move(ts));
            }
        }
        if (const YAML::Node links = n["links"]) {
            if (!links.IsSequence()) r.fail(links, "topology.links", "expected a list");
            for (std::size_t i = 0; i < links.size(); ++i) {
                const std::string p = "topology.links." + std::to_string(i);
                const YAML::Node l = links[i];
                r.keys(l, p, {"from", "to", "latency_ms", "attach"});
                if (!l["from"] || !l["to"] || !l["latency_ms"]) r.fail(l, p, "needs 'from', 'to' and 'latency_ms'");
                LinkSpec ls;
                ls.from = r.get<std::string>(l["from"], p + ".from");
                ls.to = r.get<std::string>(l["to"], p + ".to");
                ls.latency_ms = r.non_negative(l, p, "latency_ms", 0);
                if (l["attach"]) ls.attach = read_attach(r, l["attach"], p + ".attach");
                s.links.push_back(std::move(ls));
            }
        }
    }
    if (const YAML::Node n = root["roles"]) {
        r.keys(n, "roles", {"devices", "gateways", "servers", "servers_per_host"});
        r.opt(n, "roles", "devices", s.roles.devices);
        r.opt(n, "roles", "gateways", s.roles.gateways);
        r.opt(n, "roles", "servers", s.roles.servers);
        s.roles.servers_per_host = r.count(n, "roles", "servers_per_host", s.roles.servers_per_host);
    }
    if (const YAML::Node n = root["placement"]) {
        r.keys(n, "placement", {"fog", "cloud"});
        for (auto [key, p] : {std::pair{"fog", Placement::Fog}, std::pair{"cloud", Placement::Cloud}}) {
            const YAML::Node m = n[key];
            if (!m) continue;
            const std::string path = std::string("placement.") + key;
            if (!m.IsMap()) r.fail(m, path, "expected a mapping of module to tier");
            for (const auto& kv : m)
                s.placement[p][kv.first.as<std::string>()] =
                    r.get<std::string>(kv.second, path + "." + kv.first.as<std::string>());
        }
    }
    if (const YAML::Node n = root["modules"]) {
        if (!n.IsMap()) r.fail(n, "modules", "expected a mapping");
        for (const auto& kv : n) {
            const auto name = kv.first.as<std::string>();
            s.modules[name] = read_module(r, kv.second, "modules." + name, name);
        }
    }
    if (const YAML::Node n = root["app"]) {
        const std::string p = "app";
        r.keys(n, p, {"sensing_rate_hz", "client_batch", "filter_instructions", "storage_sync_ms", "metric",
                      "value_mean", "value_stddev"});
        AppSpec& a = s.app;
        a.sensing_rate_hz = r.positive(n, p, "sensing_rate_hz", a.sensing_rate_hz);
        a.client_batch = r.count(n, p, "client_batch", a.client_batch);
        a.filter_instructions = r.non_negative(n, p, "filter_instructions", a.filter_instructions);
        a.storage_sync_ms = r.positive(n, p, "storage_sync_ms", a.storage_sync_ms);
        r.opt(n, p, "metric", a.metric);
        r.opt(n, p, "value_mean", a.value_mean);
        a.value_stddev = r.non_negative(n, p, "value_stddev", a.value_stddev);
    }
    if (const YAML::Node n = root["blockchain"]) {
        const std::string p = "blockchain";
        r.keys(n, p, {"scheme", "key_seed", "block_period_ms", "skip_wait_ms", "cache_ttl_ms", "due_time_multiplier",
                      "tx_lifetime_ms", "session_lifetime_ms", "sign_instructions", "verify_instructions",
                      "hash_instructions_per_kb", "lookup_instructions"});
        BlockchainSpec& b = s.blockchain;
        if (const YAML::Node sc = n["scheme"]) {
            const auto name = r.get<std::string>(sc, p + ".scheme");
            const auto id = crypto::parse_scheme(name);
            if (!id) r.fail(sc, p + ".scheme", "unknown scheme '" + name + "' (ed25519, keyed-digest)");
            b.scheme = *id;
        }
        r.opt(n, p, "key_seed", b.key_seed);
        b.block_period_ms = static_cast<std::int64_t>(r.positive(n, p, "block_period_ms", b.block_period_ms));
        b.skip_wait_ms = static_cast<std::int64_t>(r.positive(n, p, "skip_wait_ms", b.skip_wait_ms));
        b.cache_ttl_ms = static_cast<std::int64_t>(r.positive(n, p, "cache_ttl_ms", b.cache_ttl_ms));
        b.due_time_multiplier = r.positive(n, p, "due_time_multiplier", b.due_time_multiplier);
        b.tx_lifetime_ms = static_cast<std::int64_t>(r.positive(n, p, "tx_lifetime_ms", b.tx_lifetime_ms));
        b.session_lifetime_ms =
            static_cast<std::int64_t>(r.positive(n, p, "session_lifetime_ms", b.session_lifetime_ms));
        b.sign_instructions = r.non_negative(n, p, "sign_instructions", b.sign_instructions);
        b.verify_instructions = r.non_negative(n, p, "verify_instructions", b.verify_instructions);
        b.hash_instructions_per_kb = r.non_negative(n, p, "hash_instructions_per_kb", b.hash_instructions_per_kb);
        b.lookup_instructions = r.non_negative(n, p, "lookup_instructions", b.lookup_instructions);
    }
    if (const YAML::Node n = root["retrieval"]) {
        const std::string p = "retrieval";
        r.keys(n, p, {"sizes_kb", "trials", "hit_ratio", "records_per_size", "gap_ms", "request_bytes"});
        RetrievalSpec& q = s.retrieval;
        if (n["sizes_kb"]) {
            q.sizes_kb = read_list<double>(r, n["sizes_kb"], p + ".sizes_kb");
            for (std::size_t i = 0; i < q.sizes_kb.size(); ++i)
                if (!(q.sizes_kb[i] > 0)) r.fail(n["sizes_kb"][i], p + ".sizes_kb", "sizes must be positive");
        }
        q.trials = r.count(n, p, "trials", q.trials);
        if (const YAML::Node h = n["hit_ratio"]) {
            q.hit_ratio = r.get<double>(h, p + ".hit_ratio");
            if (q.hit_ratio < 0 || q.hit_ratio > 1) r.fail(h, p + ".hit_ratio", "must lie in [0, 1]");
        }
        q.records_per_size = r.count(n, p, "records_per_size", q.records_per_size);
        q.gap_ms = r.non_negative(n, p, "gap_ms", q.gap_ms);
        q.request_bytes = r.positive(n, p, "request_bytes", q.request_bytes);
    }
    if (const YAML::Node n = root["scaling"]) {
        const std::string p = "scaling";
        r.keys(n, p, {"device_counts", "sample_interval_ms", "sample_bytes", "duration_ms"});
        ScalingSpec& c = s.scaling;
        if (n["device_counts"]) {
            c.device_counts = read_list<std::size_t>(r, n["device_counts"], p + ".device_counts");
            for (std::size_t i = 0; i < c.device_counts.size(); ++i)
                if (c.device_counts[i] == 0) r.fail(n["device_counts"][i], p + ".device_counts", "must be positive");
        }
        c.sample_interval_ms = r.positive(n, p, "sample_interval_ms", c.sample_interval_ms);
        c.sample_bytes = r.positive(n, p, "sample_bytes", c.sample_bytes);
        c.duration_ms = r.positive(n, p, "duration_ms", c.duration_ms);
    }
    if (const YAML::Node n = root["adversarial"]) {
        const std::string p = "adversarial";
        r.keys(n, p, {"server_counts", "schedules", "tamper_cases", "access_requests", "prune_blocks",
                      "network_drop", "network_duplicate", "double_sign_at"});
        AdversarialSpec& a = s.adversarial;
        if (n["server_counts"]) a.server_counts = read_list<std::size_t>(r, n["server_counts"], p + ".server_counts");
        for (std::size_t i = 0; i < a.server_counts.size(); ++i)
            if (a.server_counts[i] == 0 || a.server_counts[i] > 64)
                r.fail(n["server_counts"][i], p + ".server_counts", "server counts must lie in [1, 64]");
        a.schedules = r.count(n, p, "schedules", a.schedules);
        a.tamper_cases = r.count(n, p, "tamper_cases", a.tamper_cases);
        a.access_requests = r.count(n, p, "access_requests", a.access_requests);
        a.prune_blocks = r.count(n, p, "prune_blocks", a.prune_blocks);
        for (auto [key, out] : {std::pair{"network_drop", &a.network_drop},
                                std::pair{"network_duplicate", &a.network_duplicate}}) {
            if (const YAML::Node v = n[key]) {
                *out = r.get<double>(v, p + "." + key);
                if (*out < 0 || *out >= 1) r.fail(v, p + "." + key, "must lie in [0, 1)");
            }
        }
        if (const YAML::Node d = n["double_sign_at"]) {
            a.double_sign_at.clear();
            if (!d.IsSequence()) r.fail(d, p + ".double_sign_at", "expected a list");
            for (std::size_t i = 0; i < d.size(); ++i)
                a.double_sign_at.push_back(r.get<std::size_t>(d[i], p + ".double_sign_at." + std::to_string(i)));
        }
    }
    if (const YAML::Node n = root["alerts"]) {
        if (!n.IsSequence()) r.fail(n, "alerts", "expected a list");
        for (std::size_t i = 0; i < n.size(); ++i) {
            const std::string p = "alerts." + std::to_string(i);
            const YAML::Node a = n[i];
            r.keys(a, p, {"metric", "comparator", "threshold", "notify"});
            if (!a["metric"] || !a["threshold"]) r.fail(a, p, "needs 'metric' and 'threshold'");
            AlertSpec as;
            as.metric = r.get<std::string>(a["metric"], p + ".metric");
            as.threshold = r.get<double>(a["threshold"], p + ".threshold");
            if (const YAML::Node c = a["comparator"]) {
                const auto text = r.get<std::string>(c, p + ".comparator");
                const auto cmp = access::parse_comparator(text);
                if (!cmp) r.fail(c, p + ".comparator", "unknown comparator '" + text + "'");
                as.comparator = *cmp;
            }
            if (a["notify"]) as.notify = read_list<std::string>(r, a["notify"], p + ".notify");
            s.alerts.push_back(std::move(as));
        }
    }
    if (const YAML::Node n = root["expectations"]) {
        if (n.IsSequence()) {
            s.expectations["*"] = read_expectations(r, n, "expectations");
        } else if (n.IsMap()) {
            for (const auto& kv : n) {
                const auto preset = kv.first.as<std::string>();
                s.expectations[preset] = read_expectations(r, kv.second, "expectations." + preset);
            }
        } else {
            r.fail(n, "expectations", "expected a list or a mapping of preset to list");
        }
    }
    return s;
}

}  // namespace

const TierSpec& Scenario::tier(const std::string& name) const {
    for (const auto& t : tiers)
        if (t.name == name) return t;
    throw ScenarioError(source + ": unknown tier '" + name + "'");
}

const AppModuleSpec& Scenario::module(const std::string& name) const {
    auto it = modules.find(name);
    if (it == modules.end()) throw ScenarioError(source + ": modules: missing module '" + name + "'");
    return it->second;
}

const std::string& Scenario::host_tier(Placement p, const std::string& mod) const {
    auto pit = placement.find(p);
    if (pit == placement.end())
        throw ScenarioError(source + ": placement: missing '" + std::string(placement_name(p)) + "'");
    auto it = pit->second.find(mod);
    if (it == pit->second.end())
        throw ScenarioError(source + ": placement." + std::string(placement_name(p)) + ": module '" + mod +
                            "' is not placed");
    return it->second;
}

std::vector<Expectation> Scenario::expectations_for(const std::string& preset) const {
    std::vector<Expectation> out;
    if (auto it = expectations.find("*"); it != expectations.end()) out = it->second;
    if (auto it = expectations.find(preset); it != expectations.end())
        out.insert(out.end(), it->second.begin(), it->second.end());
    return out;
}

void Scenario::validate_topology() const {
    if (tiers.empty()) throw ScenarioError(source + ": topology.tiers: at least one tier is required");
    for (const auto& t : tiers)
        if (!profiles.count(t.profile))
            throw ScenarioError(source + ": topology.tiers: tier '" + t.name + "' uses unknown profile '" +
                                t.profile + "'");
    auto tier_exists = [&](const std::string& n) {
        for (const auto& t : tiers)
            if (t.name == n) return true;
        return false;
    };
    for (const auto& l : links)
        if (!tier_exists(l.from) || !tier_exists(l.to))
            throw ScenarioError(source + ": topology.links: link " + l.from + " -> " + l.to + " names an unknown tier");
    for (const auto* role : {&roles.devices, &roles.gateways, &roles.servers})
        if (!tier_exists(*role)) throw ScenarioError(source + ": roles: unknown tier '" + *role + "'");
    for (const auto& [p, table] : placement) {
        std::map<std::string, double> ram;
        for (const auto& [mod, tier_name] : table) {
            if (!tier_exists(tier_name))
                throw ScenarioError(source + ": placement." + std::string(placement_name(p)) + "." + mod +
                                    ": unknown tier '" + tier_name + "'");
            ram[tier_name] += module(mod).ram_gb;
        }
        for (const auto& [tier_name, gb] : ram) {
            const double cap = profiles.at(tier(tier_name).profile).memory_gb;
            if (gb > cap)
                throw ScenarioError(source + ": placement." + std::string(placement_name(p)) + ": modules on '" +
                                    tier_name + "' need " + std::to_string(gb) + " GB but the profile has " +
                                    std::to_string(cap) + " GB");
        }
    }
}

Scenario parse_scenario(const std::string& text, const std::string& source, const std::vector<std::string>& overrides) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        std::ostringstream os;
        os << source << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
        throw ScenarioError(os.str());
    }
    if (!root.IsMap()) throw ScenarioError(source + ": top level must be a mapping");
    for (const auto& o : overrides) apply_override(root, o);
    return interpret(root, Reader(source), source);
}

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path + ": cannot open scenario file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path, overrides);
}

}  // namespace fogledger::sim
