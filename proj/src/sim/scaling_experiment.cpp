#include "fogledger/sim/experiments.hpp"
#include "fogledger/sim/world.hpp"

namespace fogledger::sim {

Metrics run_scaling(const Scenario& scenario, std::uint64_t seed, std::size_t devices) {
    World w(scenario, Placement::Fog, seed, devices);
    w.bootstrap();
    w.mark_measurement_start();

    const ScalingSpec& spec = scenario.scaling;
    const SimTime t0 = w.clock().now();
    const SimTime end = t0 + from_ms(spec.duration_ms);
    Rng rng(seed ^ 0x7363616cULL);
    for (std::size_t i = 0; i < w.device_count(); ++i) {
        const double phase = rng.uniform(0, spec.sample_interval_ms);
        for (double at = phase;; at += spec.sample_interval_ms) {
            const SimTime t = t0 + from_ms(at);
            if (t >= end) break;
            const double value = rng.uniform(scenario.app.value_mean - scenario.app.value_stddev,
                                              scenario.app.value_mean + scenario.app.value_stddev);
            w.clock().schedule(t, [&w, i, value, bytes = spec.sample_bytes] {
                nodes::Sample s;
                s.source = w.device_key(i).owner;
                s.metric = w.scenario().app.metric;
                s.value = value;
                s.timestamp = w.now_ms();
                w.send_sample(i, std::move(s), bytes);
            });
        }
    }
    w.clock().run_until(end);
    w.cover("simnet");
    return w.finish();
}

}  // namespace fogledger::sim
