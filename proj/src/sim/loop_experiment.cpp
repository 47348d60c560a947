#include <cmath>
#include <memory>

#include "fogledger/sim/experiments.hpp"
#include "fogledger/sim/world.hpp"

namespace fogledger::sim {

namespace {

double normal(Rng& rng, double mu, double sigma) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    return mu + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

struct LoopRun {
    World& w;
    const Scenario& sc;
    Rng rng;
    double client_instr, analytic_instr, aggregator_instr;
    double client_bytes, analytic_bytes;

    LoopRun(World& world, std::uint64_t seed)
        : w(world),
          sc(world.scenario()),
          rng(seed ^ 0x6c6f6f70ULL),
          client_instr(sc.module("client").instructions),
          analytic_instr(sc.module("analytic").instructions),
          aggregator_instr(sc.module("aggregator").instructions),
          client_bytes(sc.module("client").packet_bytes()),
          analytic_bytes(sc.module("analytic").packet_bytes()) {}

    void reading(std::size_t i, std::uint64_t k, std::uint64_t offset) {
        const HostId em = w.device_host(i);
        w.net().compute(em, sc.app.filter_instructions, [this, i, k, offset] {
            if ((k + offset + 1) % sc.app.client_batch == 0) window(i);
        });
    }

    void window(std::size_t i) {
        const SimTime start = w.clock().now();
        const HostId em = w.device_host(i);
        const std::size_t cluster = w.cluster_of(i);
        const HostId analytic = w.module_host("analytic", cluster);
        const double value = normal(rng, sc.app.value_mean, sc.app.value_stddev);
        w.net().compute(em, client_instr, [this, i, em, analytic, start, value] {
            w.net().send(em, analytic, client_bytes, [this, i, em, analytic, start, value] {
                w.net().compute(analytic, analytic_instr, [this, i, em, analytic, start, value] {
                    w.net().compute(analytic, aggregator_instr, [this, i, analytic, value] { aggregate(i, analytic, value); });
                    w.net().send(analytic, em, analytic_bytes, [this, em, start] {
                        w.net().compute(em, client_instr, [this, start] {
                            if (start >= w.measurement_start())
                                w.metrics().loop_delays_ms.push_back(to_ms(w.clock().now() - start));
                        });
                    });
                });
            });
        });
    }

    void aggregate(std::size_t i, HostId from, double value) {
        nodes::Sample s;
        s.source = w.device_key(i).owner;
        s.metric = sc.app.metric;
        s.value = value;
        s.timestamp = w.now_ms();
        const HostId gw = w.gateway_host(w.cluster_of(i));
        if (gw == from) {
            w.ingest_at_gateway(i, std::move(s));
            return;
        }
        w.net().send(from, gw, sc.module("aggregator").packet_bytes(),
                     [this, i, s = std::move(s)]() mutable { w.ingest_at_gateway(i, std::move(s)); });
    }
};

void schedule_storage_sync(World& w, Rng& rng, SimTime end) {
    const Scenario& sc = w.scenario();
    const double bytes = sc.module("storage").packet_bytes();
    const SimTime period = from_ms(sc.app.storage_sync_ms);
    for (std::size_t g = 0; g < w.gateway_count(); ++g) {
        const HostId chain_host = w.gateway_host(g);
        const HostId store_host = w.module_host("storage", g);
        if (chain_host == store_host) continue;
        for (SimTime t = w.clock().now() + from_ms(rng.uniform(0, sc.app.storage_sync_ms)); t < end; t += period)
            w.clock().schedule(t, [&w, chain_host, store_host, bytes] { w.net().send(chain_host, store_host, bytes, [] {}); });
    }
}

}  // namespace

Metrics run_loop(const Scenario& scenario, Placement placement, std::uint64_t seed) {
    World w(scenario, placement, seed);
    w.bootstrap();
    w.mark_measurement_start();
    const SimTime t0 = w.clock().now();
    const SimTime end = t0 + from_ms(scenario.duration_ms);
    const double period_ms = 1000.0 / scenario.app.sensing_rate_hz;

    auto run = std::make_unique<LoopRun>(w, seed);
    Rng phases(seed ^ 0x70686173ULL);
    for (std::size_t i = 0; i < w.device_count(); ++i) {
        const double phase = phases.uniform(0, period_ms);
        const std::uint64_t offset = phases.below(scenario.app.client_batch);
        for (std::uint64_t k = 0;; ++k) {
            const SimTime t = t0 + from_ms(phase + period_ms * static_cast<double>(k));
            if (t >= end) break;
            w.clock().schedule(t, [r = run.get(), i, k, offset] { r->reading(i, k, offset); });
        }
    }
    schedule_storage_sync(w, phases, end);
    w.clock().run_until(end);
    w.cover("simnet");
    return w.finish();
}

}  // namespace fogledger::sim
