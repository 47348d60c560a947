#include <memory>
#include <stdexcept>

#include "fogledger/sim/experiments.hpp"
#include "fogledger/sim/world.hpp"

namespace fogledger::sim {

namespace {

struct Record {
    std::string tx_id;
    std::size_t cluster = 0;
    double size_kb = 0;
};

struct Trials {
    World& w;
    const RetrievalSpec& spec;
    double hit_ratio;
    Rng rng;
    std::vector<Record> records;
    std::vector<std::vector<std::size_t>> members;  // devices per cluster
    std::size_t size_index = 0;
    std::size_t trial = 0;
    bool done = false;

    Trials(World& world, double hit, std::uint64_t seed)
        : w(world), spec(world.scenario().retrieval), hit_ratio(hit), rng(seed ^ 0x72657472ULL) {
        members.resize(w.gateway_count());
        for (std::size_t i = 0; i < w.device_count(); ++i) members[w.cluster_of(i)].push_back(i);
    }

    std::vector<std::size_t> clusters_with(double size_kb, std::optional<std::size_t> exclude) const {
        std::vector<std::size_t> out;
        for (const Record& r : records)
            if (r.size_kb == size_kb && r.cluster != exclude && (out.empty() || out.back() != r.cluster))
                out.push_back(r.cluster);
        return out;
    }

    const Record& pick(double size_kb, std::size_t cluster) {
        std::vector<const Record*> hits;
        for (const Record& r : records)
            if (r.size_kb == size_kb && r.cluster == cluster) hits.push_back(&r);
        return *hits[rng.below(hits.size())];
    }

    void next() {
        if (trial == spec.trials) {
            trial = 0;
            ++size_index;
        }
        if (size_index == spec.sizes_kb.size()) {
            done = true;
            return;
        }
        const double size = spec.sizes_kb[size_index];
        const std::size_t requester = rng.below(w.device_count());
        const std::size_t home = w.cluster_of(requester);
        const bool local = rng.chance(hit_ratio);
        std::size_t cluster = home;
        if (!local) {
            auto foreign = clusters_with(size, home);
            if (foreign.empty()) throw std::runtime_error("retrieval needs records in at least two clusters");
            cluster = foreign[rng.below(foreign.size())];
        }
        const Record& rec = pick(size, cluster);
        const SimTime start = w.clock().now();
        ++trial;
        w.request(requester, {rec.tx_id}, spec.request_bytes,
                  [this, size, local, start](const nodes::RequestOutcome& out, bool ok) {
                      RetrievalSample s;
                      s.size_kb = size;
                      s.delay_ms = to_ms(w.clock().now() - start);
                      s.local = local;
                      if (const auto* r = std::get_if<nodes::DataResponse>(&out))
                          s.served_locally = r->served_by.role == Role::Gateway;
                      s.ok = ok;
                      w.metrics().retrievals.push_back(s);
                      w.clock().after(from_ms(spec.gap_ms), [this] { next(); });
                  });
    }
};

}  // namespace

Metrics run_retrieval(const Scenario& scenario, Placement placement, std::uint64_t seed,
                      std::optional<double> hit_ratio) {
    World w(scenario, placement, seed);
    w.bootstrap();
    const RetrievalSpec& spec = scenario.retrieval;
    auto trials = std::make_unique<Trials>(w, hit_ratio.value_or(spec.hit_ratio), seed);

    // Foreign records are read through the cloud servers' full chain, so every
    // device is granted on every cluster's contract.
    for (std::size_t g = 0; g < w.gateway_count(); ++g)
        for (std::size_t i = 0; i < w.device_count(); ++i)
            if (w.cluster_of(i) != g && !w.grant(g, i))
                throw std::runtime_error("cross-cluster grant failed for device " + std::to_string(i));
    w.settle();

    // One record per block: each is ingested alone and committed before the next.
    for (double size : spec.sizes_kb)
        for (std::size_t g = 0; g < w.gateway_count(); ++g) {
            if (trials->members[g].empty()) continue;
            for (std::size_t r = 0; r < spec.records_per_size; ++r) {
                const std::size_t dev = trials->members[g][r % trials->members[g].size()];
                nodes::Sample s;
                s.source = w.device_key(dev).owner;
                s.metric = "record";
                s.data.assign(static_cast<std::size_t>(size * 1000.0), static_cast<std::uint8_t>(r + g));
                s.timestamp = w.now_ms();
                Trials* t = trials.get();
                w.ingest_at_gateway(dev, std::move(s), [t, g, size](const chain::Transaction& tx) {
                    t->records.push_back(Record{tx.tx_id, g, size});
                });
                w.settle();
            }
        }

    w.mark_measurement_start();
    trials->next();
    const SimTime limit = w.clock().now() + from_ms(3'600'000);
    if (!w.clock().run_while_not([&] { return trials->done; }, limit))
        throw std::runtime_error("retrieval trials did not finish");
    w.cover("simnet");
    return w.finish();
}

}  // namespace fogledger::sim
