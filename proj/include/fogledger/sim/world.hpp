#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "fogledger/common/rng.hpp"
#include "fogledger/nodes/cloud_server.hpp"
#include "fogledger/nodes/gateway.hpp"
#include "fogledger/nodes/iot_device.hpp"
#include "fogledger/sim/metrics.hpp"
#include "fogledger/sim/network.hpp"
#include "fogledger/sim/scenario.hpp"

namespace fogledger::sim {

/// A scenario's topology populated with node state machines. The world
/// carries candidate blocks from gateways to their upstream servers,
/// consensus traffic between servers, committed blocks back to gateways and
/// on to devices, and data requests along the placement's path. Every
/// transfer and every protocol step is charged to the hosts involved.
class World {
public:
    World(const Scenario& scenario, Placement placement, std::uint64_t seed,
          std::optional<std::size_t> device_count = std::nullopt);
    ~World();

    World(const World&) = delete;
    World& operator=(const World&) = delete;

    EventQueue& clock() { return clock_; }
    Network& net() { return net_; }
    Rng& rng() { return rng_; }
    const Scenario& scenario() const { return scenario_; }
    Placement placement() const { return placement_; }
    crypto::CryptoSuite& suite() { return *suite_; }
    std::int64_t now_ms() const { return node_ms(clock_.now()); }

    std::size_t device_count() const { return devices_.size(); }
    std::size_t gateway_count() const { return gateways_.size(); }
    std::size_t server_count() const { return servers_.size(); }
    nodes::IoTDeviceNode& device(std::size_t i) { return *devices_.at(i).node; }
    nodes::GatewayNode& gateway(std::size_t g) { return *gateways_.at(g).node; }
    nodes::CloudServerNode& server(std::size_t k) { return *servers_.at(k).node; }
    HostId device_host(std::size_t i) const { return devices_.at(i).host; }
    HostId gateway_host(std::size_t g) const { return gateways_.at(g).host; }
    HostId server_host(std::size_t k) const { return servers_.at(k).host; }
    std::size_t upstream_of(std::size_t g) const { return g % servers_.size(); }
    std::size_t cluster_of(std::size_t device) const { return devices_.at(device).gateway; }
    std::string cluster_name(std::size_t g) const;
    std::string group_of(std::size_t g) const;
    const crypto::KeyPair& device_key(std::size_t i) const { return devices_.at(i).key; }
    const crypto::KeyPair& gateway_key(std::size_t g) const { return gateways_.at(g).key; }
    // Host that runs `module` for a cluster under this world's placement.
    HostId module_host(const std::string& module, std::size_t cluster) const;

    // Registers every device, creates one contract per cluster and grants each
    // device access to its own cluster's data, running the simulation until
    // all of it is committed and fanned out.
    void bootstrap();
    // Grant or revoke on cluster g's contract for a device. The gateway applies
    // it at once and queues the record for commitment.
    bool grant(std::size_t g, std::size_t device);
    bool revoke(std::size_t g, std::size_t device);
    // No pooled or in-flight transactions, no samples or block deliveries pending
    // and no handover still holding samples.
    bool quiescent() const;
    // Runs until quiescent; throws std::runtime_error after `limit_ms` of simulated time.
    void settle(double limit_ms = 600'000);

    // Transfers a sample from the device to its gateway and ingests it there.
    void send_sample(std::size_t device, nodes::Sample sample, double bytes);
    // Ingests a sample that is already at the host running the cluster's
    // gateway. on_tx sees the pooled transaction when ingestion succeeds.
    using TxSeen = std::function<void(const chain::Transaction&)>;
    void ingest_at_gateway(std::size_t device, nodes::Sample sample, TxSeen on_tx = {});
    void submit(std::size_t g, chain::Transaction tx);

    using RequestDone = std::function<void(const nodes::RequestOutcome&, bool validated)>;
    void request(std::size_t device, std::vector<std::string> tx_ids, double request_bytes, RequestDone done);

    // Moves a device to another gateway; samples it produces in the next
    // `duration_ms` are held at the device and delivered afterwards.
    void start_handover(std::size_t device, std::size_t to_gateway, double duration_ms);

    // Makes a server silently drop the candidates its gateways send.
    void set_compromised(std::size_t k, bool drop) { server(k).set_drop_candidates(drop); }

    void mark_measurement_start() { t0_ = clock_.now(); }
    SimTime measurement_start() const { return t0_; }
    Metrics& metrics() { return metrics_; }
    void cover(const char* module) { ++metrics_.coverage[module]; }
    // Fills host statistics over [measurement start, now] and the transaction tally.
    Metrics finish();

    std::size_t height() const { return global_height_; }

private:
    struct DeviceSlot {
        NodeAddress address;
        crypto::KeyPair key;
        HostId host = 0;
        std::size_t gateway = 0;
        std::unique_ptr<nodes::IoTDeviceNode> node;
        std::optional<crypto::SessionKey> session;
        bool handing_over = false;
    };
    struct GatewaySlot {
        NodeAddress address;
        crypto::KeyPair key;
        crypto::KeyPair provisioner;
        HostId host = 0;
        std::unique_ptr<nodes::GatewayNode> node;
        std::uint64_t ticks = 0;
    };
    struct ServerSlot {
        NodeAddress address;
        crypto::KeyPair key;
        HostId host = 0;
        std::unique_ptr<nodes::CloudServerNode> node;
        std::optional<SimTime> wake_at;
        std::size_t dropped_seen = 0;
    };

    void build_topology(std::optional<std::size_t> device_count);
    void build_nodes();
    std::vector<HostId> tier_hosts(const std::string& tier) const;

    void gateway_tick(std::size_t g);
    void deliver_candidate(std::size_t g, chain::Block block);
    void poll_server(std::size_t k);
    void schedule_wake(std::size_t k);
    void absorb(std::size_t k, nodes::CloudStep&& step);
    void send_consensus(std::size_t from, std::size_t to, const consensus::ConsensusMsg& msg);
    void deliver_block_to_gateway(std::size_t k, std::size_t g, const chain::BlockPtr& block);
    void deliver_block_to_device(std::size_t g, std::size_t i, const chain::BlockPtr& block);
    void finish_request(std::size_t device, HostId from, const nodes::RequestOutcome& outcome,
                        std::shared_ptr<RequestDone> done);
    // Catches a device's header chain up to its gateway's; `charged` sends
    // the headers over the network first.
    void sync_device(std::size_t device, bool charged);
    bool change_access(std::size_t g, std::size_t device, bool revoke);
    void note_created(std::uint64_t n = 1) { metrics_.tx.created += n; }

    double verify_cost(std::size_t signatures, double bytes) const;

    const Scenario& scenario_;
    Placement placement_;
    Rng rng_;
    EventQueue clock_;
    Network net_;
    std::unique_ptr<crypto::CryptoSuite> suite_;
    consensus::ServerRoster roster_;
    chain::Block genesis_;

    std::map<std::string, std::vector<HostId>> tiers_;
    std::vector<DeviceSlot> devices_;
    std::vector<GatewaySlot> gateways_;
    std::vector<ServerSlot> servers_;
    std::map<std::string, std::size_t> device_index_;
    std::map<std::string, std::size_t> server_index_;

    std::map<std::string, std::uint64_t> in_flight_;  // candidate block id -> transaction count
    std::map<std::string, SimTime> flushed_at_;
    std::map<std::pair<std::size_t, std::uint64_t>, SimTime> proposed_at_;
    std::uint64_t global_height_ = 0;
    std::size_t pending_deliveries_ = 0;
    std::uint64_t request_seq_ = 0;
    SimTime t0_ = 0;
    Metrics metrics_;
};

}  // namespace fogledger::sim
