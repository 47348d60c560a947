#include "fogledger/sim/network.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace fogledger::sim {

HostId Network::add_host(std::string name, std::string tier, DeviceProfile profile) {
    if (by_name_.count(name)) throw TopologyError("duplicate host '" + name + "'");
    const HostId id = hosts_.size();
    by_name_.emplace(name, id);
    hosts_.push_back(Host{std::move(name), std::move(tier), std::move(profile), 0, {}});
    adj_.emplace_back();
    routes_.clear();
    return id;
}

void Network::add_link(HostId a, HostId b, double latency_ms, double reverse_latency_ms) {
    if (a >= hosts_.size() || b >= hosts_.size() || a == b) throw TopologyError("invalid link endpoints");
    if (latency_ms < 0) throw TopologyError("negative link latency");
    adj_[a].push_back({b, latency_ms});
    adj_[b].push_back({a, reverse_latency_ms < 0 ? latency_ms : reverse_latency_ms});
    routes_.clear();
}

HostId Network::find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw TopologyError("unknown host '" + name + "'");
    return it->second;
}

const std::vector<HostId>& Network::route(HostId from, HostId to) {
    auto key = std::make_pair(from, to);
    if (auto it = routes_.find(key); it != routes_.end()) return it->second;

    // Dijkstra on latency. Ties prefer fewer hops and then lower host ids so
    // routes never depend on container iteration order.
    const std::size_t n = hosts_.size();
    using Cost = std::tuple<double, std::size_t, HostId>;
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> hops(n, 0);
    std::vector<HostId> prev(n, n);
    std::priority_queue<Cost, std::vector<Cost>, std::greater<>> pq;
    dist[from] = 0;
    pq.emplace(0.0, 0, from);
    while (!pq.empty()) {
        auto [d, h, u] = pq.top();
        pq.pop();
        if (d > dist[u] || (d == dist[u] && h > hops[u])) continue;
        for (const Edge& e : adj_[u]) {
            const double nd = d + e.latency_ms;
            const std::size_t nh = h + 1;
            const bool better = nd < dist[e.to] || (nd == dist[e.to] && (nh < hops[e.to] ||
                                                                         (nh == hops[e.to] && u < prev[e.to])));
            if (better) {
                dist[e.to] = nd;
                hops[e.to] = nh;
                prev[e.to] = u;
                pq.emplace(nd, nh, e.to);
            }
        }
    }
    if (from != to && prev[to] == n)
        throw TopologyError("no route from '" + hosts_[from].name + "' to '" + hosts_[to].name + "'");
    std::vector<HostId> path;
    for (HostId at = to; at != from; at = prev[at]) path.push_back(at);
    path.push_back(from);
    std::reverse(path.begin(), path.end());
    return routes_.emplace(key, std::move(path)).first->second;
}

void Network::require_reachable(const std::vector<HostId>& sources, const std::vector<HostId>& targets) {
    for (HostId s : sources)
        for (HostId t : targets) route(s, t);
}

SimTime Network::plan(HostId from, HostId to, double bytes, bool mark) {
    SimTime t = clock_.now();
    if (from == to) return t;
    const std::vector<HostId>& path = route(from, to);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        Host& a = hosts_[path[i]];
        Host& b = hosts_[path[i + 1]];
        double latency = 0;
        for (const Edge& e : adj_[path[i]])
            if (e.to == path[i + 1]) {
                latency = e.latency_ms;
                break;
            }
        const LinkProfile link = make_link(a.name, a.profile, b.name, b.profile, latency);
        const SimTime ser = std::max<SimTime>(1, from_ms(serialization_ms(bytes, link)));
        const SimTime lat = from_ms(latency);
        if (mark) {
            a.busy.emplace_back(t, t + ser);
            b.busy.emplace_back(t + lat, t + lat + ser);
            traffic_.hop_bytes += static_cast<std::uint64_t>(bytes);
        }
        t += lat + ser;
    }
    return t;
}

SimTime Network::delivery_delay(HostId from, HostId to, double bytes) { return plan(from, to, bytes, false) - clock_.now(); }

void Network::send(HostId from, HostId to, double bytes, std::function<void()> on_arrival) {
    ++traffic_.messages;
    traffic_.bytes += static_cast<std::uint64_t>(bytes);
    clock_.schedule(plan(from, to, bytes, true), std::move(on_arrival));
}

void Network::compute(HostId id, double instructions, std::function<void()> done) {
    Host& h = hosts_.at(id);
    const SimTime start = std::max(clock_.now(), h.cpu_free);
    const SimTime end = start + from_ms(compute_time_ms(instructions, h.profile));
    if (end > start) h.busy.emplace_back(start, end);
    h.cpu_free = end;
    clock_.schedule(end, std::move(done));
}

SimTime Network::busy_time(HostId id, SimTime start, SimTime end) const {
    std::vector<std::pair<SimTime, SimTime>> iv;
    iv.reserve(hosts_.at(id).busy.size());
    for (auto [a, b] : hosts_[id].busy) {
        a = std::max(a, start);
        b = std::min(b, end);
        if (a < b) iv.emplace_back(a, b);
    }
    std::sort(iv.begin(), iv.end());
    SimTime total = 0, cs = 0, ce = -1;
    bool open = false;
    for (auto [a, b] : iv) {
        if (!open) {
            cs = a, ce = b, open = true;
        } else if (a <= ce) {
            ce = std::max(ce, b);
        } else {
            total += ce - cs;
            cs = a, ce = b;
        }
    }
    if (open) total += ce - cs;
    return total;
}

}  // namespace fogledger::sim
