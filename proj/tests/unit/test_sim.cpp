#include <doctest.h>

#include <cmath>

#include "fogledger/sim/experiments.hpp"
#include "fogledger/sim/world.hpp"

using namespace fogledger;
using namespace fogledger::sim;

namespace {

const std::string kScenarioDir = FOGLEDGER_SCENARIO_DIR_FOR_TESTS;

DeviceProfile profile(std::string name, double mips, double down, double up) {
    return DeviceProfile{std::move(name), mips, down, up, 8, 1.0, 0.5};
}

const DeviceProfile kEM = profile("EM", 1000, 10, 5);
const DeviceProfile kFLS = profile("FLS", 7000, 8, 3);
const DeviceProfile kCloud = profile("Cloud", 40000, 3, 4);

Scenario small_rpm(std::vector<std::string> extra = {}) {
    extra.push_back("duration_ms=30000");
    return load_scenario(kScenarioDir + "/patient-monitoring.yaml", extra);
}

std::string diagnostic(const std::string& text) {
    try {
        parse_scenario(text, "s.yaml");
    } catch (const ScenarioError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("transfer time is latency plus size over the slower end") {
    LinkProfile one{"a", "b", 0, 1.0};
    CHECK(transfer_time_ms(1e6, one) == doctest::Approx(1000.0));

    LinkProfile em_fls = make_link("em", kEM, "fls", kFLS, 2.0);
    CHECK(em_fls.bandwidth_mb == 5.0);  // EM uplink below FLS downlink
    CHECK(transfer_time_ms(500'000, em_fls) == doctest::Approx(102.0));
    LinkProfile fls_cloud = make_link("fls", kFLS, "cloud", kCloud, 0);
    CHECK(fls_cloud.bandwidth_mb == 3.0);

    for (double bytes : {1e3, 5e4, 7.5e5}) {
        CHECK(serialization_ms(2 * bytes, em_fls) == doctest::Approx(2 * serialization_ms(bytes, em_fls)));
    }
}

TEST_CASE("compute time scales with instructions over MIPS") {
    CHECK(compute_time_ms(4e7, kCloud) == doctest::Approx(1.0));
    CHECK(compute_time_ms(4e7, kEM) == doctest::Approx(40.0));
    CHECK(compute_time_ms(0, kEM) == 0.0);
    CHECK(energy(kEM, 1000, 1000) == doctest::Approx(1.5));
}

TEST_CASE("profiles reject non-positive fields") {
    DeviceProfile p = kEM;
    p.mips = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = kEM;
    p.busy_power = 0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_NOTHROW(kEM.validate());
}

TEST_CASE("events run in time order, ties first-in first-out") {
    EventQueue q;
    std::vector<int> order;
    q.schedule(300, [&] { order.push_back(3); });
    q.schedule(100, [&] { order.push_back(1); });
    q.schedule(200, [&] { order.push_back(20); });
    q.schedule(200, [&] { order.push_back(21); });
    q.schedule(100, [&] {
        q.after(50, [&] { order.push_back(15); });
    });
    q.run_until(1000);
    CHECK(order == std::vector<int>{1, 15, 20, 21, 3});
    CHECK(q.now() == 1000);
    CHECK_THROWS_AS(q.schedule(999, [] {}), std::logic_error);
    CHECK(from_ms(1.5) == 1500);
    CHECK(to_ms(2500) == 2.5);
}

TEST_CASE("run_while_not stops at the predicate or the limit") {
    EventQueue q;
    int n = 0;
    for (int i = 1; i <= 10; ++i) q.schedule(i * 10, [&] { ++n; });
    CHECK(q.run_while_not([&] { return n == 4; }, 1000));
    CHECK(q.now() == 40);
    CHECK_FALSE(q.run_while_not([&] { return n == 100; }, 60));
}

TEST_CASE("network timing is store and forward per hop") {
    EventQueue q;
    Network net(q);
    HostId em = net.add_host("em", "EM", kEM);
    HostId fls = net.add_host("fls", "FLS", kFLS);
    HostId cloud = net.add_host("cloud", "Cloud", kCloud);
    net.add_link(em, fls, 2);
    net.add_link(fls, cloud, 20);
    CHECK(net.route(em, cloud) == std::vector<HostId>{em, fls, cloud});
    // 300 KB: 60 ms at 5 MB/s, then 100 ms at 3 MB/s.
    CHECK(to_ms(net.delivery_delay(em, cloud, 300'000)) == doctest::Approx(182.0));

    SimTime arrived = -1;
    net.send(em, cloud, 300'000, [&] { arrived = q.now(); });
    q.run_until(from_ms(1000));
    CHECK(to_ms(arrived) == doctest::Approx(182.0));
    CHECK(to_ms(net.busy_time(fls, 0, from_ms(1000))) == doctest::Approx(160.0));
    CHECK(net.traffic().messages == 1);
    CHECK(net.traffic().hop_bytes == 600'000);
}

TEST_CASE("host CPUs serve work in arrival order") {
    EventQueue q;
    Network net(q);
    HostId em = net.add_host("em", "EM", kEM);
    std::vector<double> done;
    net.compute(em, 4e7, [&] { done.push_back(to_ms(q.now())); });
    net.compute(em, 4e7, [&] { done.push_back(to_ms(q.now())); });
    net.compute(em, 0, [&] { done.push_back(to_ms(q.now())); });
    q.run_until(from_ms(500));
    CHECK(done == std::vector<double>{40, 80, 80});
    CHECK(to_ms(net.busy_time(em, 0, from_ms(500))) == doctest::Approx(80.0));
    CHECK(to_ms(net.busy_time(em, from_ms(60), from_ms(70))) == doctest::Approx(10.0));
}

TEST_CASE("topology errors") {
    EventQueue q;
    Network net(q);
    HostId a = net.add_host("a", "EM", kEM);
    HostId b = net.add_host("b", "EM", kEM);
    CHECK_THROWS_AS(net.add_host("a", "EM", kEM), TopologyError);
    CHECK_THROWS_AS(net.add_link(a, a, 1), TopologyError);
    CHECK_THROWS_AS(net.add_link(a, b, -1), TopologyError);
    CHECK_THROWS_AS(net.route(a, b), TopologyError);
    CHECK_THROWS_AS(net.require_reachable({a}, {b}), TopologyError);
    CHECK_THROWS_AS(net.find("zz"), TopologyError);
}

TEST_CASE("scenarios report the position and path of bad input") {
    const Scenario s = load_scenario(kScenarioDir + "/patient-monitoring.yaml");
    CHECK(s.tier("EM").count == 24);
    CHECK(s.module("analytic").instructions == 1.5e9);
    CHECK(s.host_tier(Placement::Fog, "analytic") == "FLS");
    CHECK(s.host_tier(Placement::Cloud, "analytic") == "Cloud");
    CHECK_NOTHROW(s.validate_topology());

    CHECK(diagnostic("name: x\nbogus: 1\n") == "s.yaml:2:1: bogus: unknown key");
    CHECK(diagnostic("name: x\nprofiles:\n  EM: {mips: 1}\n").rfind("s.yaml:3:7: profiles.EM: missing", 0) == 0);
    CHECK(diagnostic("name: x\nblockchain:\n  block_period_ms: -5\n").rfind("s.yaml:3:20: blockchain.block_period_ms:", 0) == 0);
    CHECK(diagnostic("seed: [1\n").rfind("s.yaml:", 0) == 0);
    CHECK(diagnostic("name: x\nexpectations:\n  energy:\n    - {metric: m}\n") ==
          "s.yaml:4:7: expectations.energy.0: needs 'min' or 'max'");
}

TEST_CASE("overrides edit the document before interpretation") {
    Scenario s = small_rpm({"blockchain.block_period_ms=250", "retrieval.sizes_kb.1=900",
                              "expectations.energy.0.max=99"});
    CHECK(s.duration_ms == 30000);
    CHECK(s.blockchain.block_period_ms == 250);
    CHECK(s.retrieval.sizes_kb == std::vector<double>{500, 900});
    CHECK(*s.expectations.at("energy").at(0).max == 99);
    CHECK(s.expectations_for("energy").size() == 3);  // two own plus the shared one

    CHECK_THROWS_WITH_AS(small_rpm({"retrieval.sizes_kb.7=1"}), doctest::Contains("out of range"), ScenarioError);
    CHECK_THROWS_WITH_AS(small_rpm({"seed"}), doctest::Contains("expected KEY=VALUE"), ScenarioError);
    CHECK_THROWS_WITH_AS(small_rpm({"seed.x=1"}), doctest::Contains("is a scalar"), ScenarioError);
    CHECK_THROWS_AS(load_scenario(kScenarioDir + "/none.yaml"), ScenarioError);
}

TEST_CASE("cross-field checks catch broken topology references") {
    CHECK_THROWS_WITH_AS(small_rpm({"topology.tiers.0.profile=XX"}).validate_topology(),
                         doctest::Contains("unknown profile"), ScenarioError);
    CHECK_THROWS_WITH_AS(small_rpm({"roles.gateways=Mars"}).validate_topology(), doctest::Contains("unknown tier"),
                         ScenarioError);
    CHECK_THROWS_WITH_AS(small_rpm({"placement.fog.analytic=EM", "placement.fog.aggregator=EM"}).validate_topology(),
                         doctest::Contains("placement.fog"), ScenarioError);
}

TEST_CASE("the same seed gives the same loop run") {
    const Scenario s = small_rpm();
    Metrics a = run_loop(s, Placement::Fog, 3);
    Metrics b = run_loop(s, Placement::Fog, 3);
    REQUIRE_FALSE(a.loop_delays_ms.empty());
    CHECK(a.loop_delays_ms == b.loop_delays_ms);
    CHECK(a.events == b.events);
    CHECK(a.bytes == b.bytes);
    CHECK(a.tx.conserved());
    Metrics c = run_loop(s, Placement::Fog, 4);
    CHECK(c.loop_delays_ms != a.loop_delays_ms);

    Metrics cloud = run_loop(s, Placement::Cloud, 3);
    CHECK(mean(a.loop_delays_ms) < mean(cloud.loop_delays_ms));
}

TEST_CASE("with no local hits retrieval costs the same under both placements") {
    const Scenario s = small_rpm({"retrieval.trials=30"});
    Metrics fog = run_retrieval(s, Placement::Fog, 5, 0.0);
    Metrics cloud = run_retrieval(s, Placement::Cloud, 5, 0.0);
    REQUIRE(fog.retrievals.size() == 60);
    auto avg = [](const Metrics& m) {
        double sum = 0;
        for (const auto& r : m.retrievals) {
            CHECK(r.ok);
            CHECK_FALSE(r.served_locally);
            sum += r.delay_ms;
        }
        return sum / static_cast<double>(m.retrievals.size());
    };
    CHECK(std::fabs(avg(fog) - avg(cloud)) <= 2.0);
}

TEST_CASE("samples produced during a handover all end up committed") {
    const Scenario s = small_rpm();
    World w(s, Placement::Fog, 9);
    w.bootstrap();
    REQUIRE(w.gateway_count() >= 2);
    const std::size_t dev = 0;
    const std::size_t from = w.cluster_of(dev);
    const std::size_t to = (from + 1) % w.gateway_count();
    const auto before = w.metrics().tx.created;

    w.start_handover(dev, to, 400);
    for (int k = 0; k < 5; ++k) {
        w.send_sample(dev, nodes::Sample{w.device_key(dev).owner, "heart_rate", 70.0 + k, {}, w.now_ms()}, 256);
        w.clock().run_until(w.clock().now() + from_ms(50));
    }
    CHECK(w.device(dev).in_handover());
    w.settle();
    CHECK_FALSE(w.device(dev).in_handover());
    CHECK(w.cluster_of(dev) == to);
    CHECK(w.gateway(to).connected_devices().count(w.device_key(dev).owner.id));
    CHECK_FALSE(w.gateway(from).connected_devices().count(w.device_key(dev).owner.id));

    Metrics m = w.finish();
    CHECK(m.tx.created > before);
    CHECK(m.tx.conserved());
    CHECK(m.tx.committed == m.tx.created);
    CHECK(m.samples_rejected == 0);
}

}
