#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogledger/sim/event_queue.hpp"
#include "fogledger/sim/profiles.hpp"

namespace fogledger::sim {

class TopologyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using HostId = std::size_t;

struct Host {
    std::string name;
    std::string tier;
    DeviceProfile profile;
    SimTime cpu_free = 0;
    std::vector<std::pair<SimTime, SimTime>> busy;
};

struct TrafficCounters {
    std::uint64_t messages = 0;
    std::uint64_t bytes = 0;
    std::uint64_t hop_bytes = 0;
};

/// Hosts joined by latency-weighted links. Messages follow the lowest-latency
/// path and are stored and forwarded hop by hop; links do not contend, so a
/// message's timing depends only on its size and path. Each host has one CPU
/// serving compute requests first come, first served.
class Network {
public:
    explicit Network(EventQueue& clock) : clock_(clock) {}

    HostId add_host(std::string name, std::string tier, DeviceProfile profile);
    // Links both directions; a negative reverse latency reuses forward latency.
    void add_link(HostId a, HostId b, double latency_ms, double reverse_latency_ms = -1);

    std::size_t host_count() const { return hosts_.size(); }
    const Host& host(HostId id) const { return hosts_.at(id); }
    HostId find(const std::string& name) const;

    // Host sequence from a to b inclusive. Throws TopologyError if unreachable.
    const std::vector<HostId>& route(HostId from, HostId to);
    // Throws TopologyError unless every host reaches every host in `targets`.
    void require_reachable(const std::vector<HostId>& sources, const std::vector<HostId>& targets);

    // Delivery time of `bytes` sent now, without side effects.
    SimTime delivery_delay(HostId from, HostId to, double bytes);
    // Sends and marks both ends of every hop busy while the bytes are on the
    // wire. on_arrival runs at the destination at delivery time.
    void send(HostId from, HostId to, double bytes, std::function<void()> on_arrival);
    // Queues work on the host CPU; done runs when it finishes.
    void compute(HostId host, double instructions, std::function<void()> done);

    const TrafficCounters& traffic() const { return traffic_; }
    // Busy time within [start, end], overlapping intervals counted once.
    SimTime busy_time(HostId id, SimTime start, SimTime end) const;

private:
    struct Edge {
        HostId to;
        double latency_ms;
    };
    SimTime plan(HostId from, HostId to, double bytes, bool mark);

    EventQueue& clock_;
    std::vector<Host> hosts_;
    std::vector<std::vector<Edge>> adj_;
    std::map<std::string, HostId> by_name_;
    std::map<std::pair<HostId, HostId>, std::vector<HostId>> routes_;
    TrafficCounters traffic_;
};

}  // namespace fogledger::sim
