#include "fogledger/sim/world.hpp"

#include <cstdio>
#include <stdexcept>

#include "fogledger/access/contract.hpp"
#include "fogledger/consensus/roster.hpp"

namespace fogledger::sim {

namespace {

std::string numbered(const char* prefix, std::size_t i, int width) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s-%0*zu", prefix, width, i);
    return buf;
}

constexpr double kTokenBytes = 256;
constexpr double kDenyBytes = 64;
constexpr double kBundleBytesPerSig = 100;
constexpr double kHeaderBytes = 200;

std::size_t signature_count(const consensus::ConsensusMsg& msg) {
    return std::visit(
        [](const auto& body) -> std::size_t {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, consensus::Propose>)
                return 2 + (body.block ? body.block->transactions.size() : 0);
            else if constexpr (std::is_same_v<T, consensus::BlockAdd>)
                return 1 + body.bundle.size();
            else
                return 1;
        },
        msg.body);
}

}  // namespace

World::World(const Scenario& scenario, Placement placement, std::uint64_t seed,
             std::optional<std::size_t> device_count)
    : scenario_(scenario), placement_(placement), rng_(seed), net_(clock_) {
    metrics_.placement = std::string(placement_name(placement));
    metrics_.seed = seed;
    scenario_.validate_topology();
    build_topology(device_count);
    build_nodes();
    cover("simnet");
}

World::~World() = default;

std::string World::cluster_name(std::size_t g) const { return "cluster-" + std::to_string(g); }
std::string World::group_of(std::size_t g) const { return "data/" + cluster_name(g); }

std::vector<HostId> World::tier_hosts(const std::string& tier) const {
    auto it = tiers_.find(tier);
    if (it == tiers_.end()) throw TopologyError("unknown tier '" + tier + "'");
    return it->second;
}

HostId World::module_host(const std::string& module, std::size_t cluster) const {
    std::string tier = scenario_.roles.gateways;
    if (auto p = scenario_.placement.find(placement_); p != scenario_.placement.end())
        if (auto m = p->second.find(module); m != p->second.end()) tier = m->second;
    const auto& hosts = tiers_.at(tier);
    return hosts[cluster % hosts.size()];
}

void World::build_topology(std::optional<std::size_t> device_count) {
    // Attachment draws come from their own stream so both placements of one
    // seed share the same topology.
    Rng topo(metrics_.seed * 0x2545F4914F6CDD1DULL + 17);
    for (const auto& t : scenario_.tiers) {
        std::size_t count = t.count;
        if (device_count && t.name == scenario_.roles.devices) count = *device_count;
        auto& hosts = tiers_[t.name];
        for (std::size_t i = 0; i < count; ++i)
            hosts.push_back(net_.add_host(t.name + "-" + std::to_string(i), t.name, scenario_.profiles.at(t.profile)));
    }
    const auto& device_hosts = tiers_.at(scenario_.roles.devices);
    const auto& gateway_hosts = tiers_.at(scenario_.roles.gateways);
    std::vector<std::optional<std::size_t>> parent(device_hosts.size());

    for (const auto& l : scenario_.links) {
        const auto& from = tiers_.at(l.from);
        const auto& to = tiers_.at(l.to);
        const bool device_uplink = l.from == scenario_.roles.devices && l.to == scenario_.roles.gateways;
        auto link = [&](std::size_t i, std::size_t j) {
            net_.add_link(from[i], to[j], l.latency_ms);
            if (device_uplink && !parent[i]) parent[i] = j;
        };
        switch (l.attach) {
            case Attach::Random:
                for (std::size_t i = 0; i < from.size(); ++i) link(i, topo.below(to.size()));
                break;
            case Attach::RoundRobin:
                for (std::size_t i = 0; i < from.size(); ++i) link(i, i % to.size());
                break;
            case Attach::All:
                for (std::size_t i = 0; i < from.size(); ++i)
                    for (std::size_t j = 0; j < to.size(); ++j) link(i, j);
                break;
            case Attach::Mesh:
                if (l.from != l.to) throw TopologyError("mesh links need the same tier at both ends");
                for (std::size_t i = 0; i < from.size(); ++i)
                    for (std::size_t j = i + 1; j < from.size(); ++j) net_.add_link(from[i], from[j], l.latency_ms);
                break;
        }
    }
    devices_.resize(device_hosts.size());
    for (std::size_t i = 0; i < device_hosts.size(); ++i) {
        devices_[i].host = device_hosts[i];
        devices_[i].gateway = parent[i].value_or(i % gateway_hosts.size());
    }
}

void World::build_nodes() {
    const BlockchainSpec& bc = scenario_.blockchain;
    suite_ = std::make_unique<crypto::CryptoSuite>(bc.scheme);
    const std::uint64_t master = bc.key_seed;
    auto keys = [master](const std::string& group) { return crypto::derive_group_key(master, group); };

    const auto& server_hosts = tiers_.at(scenario_.roles.servers);
    const std::size_t per_host = scenario_.roles.servers_per_host;
    const std::size_t n_servers = server_hosts.size() * per_host;
    std::vector<NodeAddress> addrs;
    servers_.resize(n_servers);
    for (std::size_t k = 0; k < n_servers; ++k) {
        ServerSlot& s = servers_[k];
        s.address = NodeAddress{numbered("cs", k, 2), Role::CloudServer};
        s.key = suite_->enroll_derived(s.address, master);
        s.host = server_hosts[k / per_host];
        server_index_[s.address.id] = k;
        addrs.push_back(s.address);
    }
    roster_ = consensus::ServerRoster(addrs);
    genesis_ = consensus::make_genesis(roster_, *suite_, servers_[0].key, 0);

    const std::size_t n_gateways = tiers_.at(scenario_.roles.gateways).size();
    gateways_.resize(n_gateways);
    for (std::size_t g = 0; g < n_gateways; ++g) {
        GatewaySlot& gw = gateways_[g];
        gw.address = NodeAddress{numbered("gw", g, 2), Role::Gateway};
        gw.key = suite_->enroll_derived(gw.address, master);
        gw.provisioner = suite_->enroll_derived(NodeAddress{numbered("prov", g, 2), Role::User}, master);
        gw.host = module_host("blockchain", g);
    }
    for (std::size_t i = 0; i < devices_.size(); ++i) {
        DeviceSlot& d = devices_[i];
        d.address = NodeAddress{numbered("dev", i, 3), Role::IoTDevice};
        d.key = suite_->derive(d.address, master);
        device_index_[d.address.id] = i;
    }

    // Every route the protocol uses must exist before anything is scheduled.
    for (const auto& d : devices_) net_.route(d.host, gateways_[d.gateway].host);
    for (std::size_t g = 0; g < n_gateways; ++g) {
        net_.route(gateways_[g].host, servers_[upstream_of(g)].host);
        net_.route(servers_[upstream_of(g)].host, gateways_[g].host);
    }
    for (const auto& a : servers_)
        for (const auto& b : servers_) net_.route(a.host, b.host);

    for (std::size_t g = 0; g < n_gateways; ++g) {
        GatewaySlot& gw = gateways_[g];
        nodes::GatewayConfig cfg;
        cfg.address = gw.address;
        cfg.cluster = cluster_name(g);
        cfg.upstream = servers_[upstream_of(g)].address;
        cfg.provisioner = gw.provisioner.owner;
        cfg.block_period_ms = bc.block_period_ms;
        const HostId up = servers_[upstream_of(g)].host;
        const double rtt = to_ms(net_.delivery_delay(gw.host, up, 1000) + net_.delivery_delay(up, gw.host, 1000));
        cfg.mean_rtt_ms = std::max<std::int64_t>(1, static_cast<std::int64_t>(rtt + 0.5));
        cfg.due_time_multiplier = bc.due_time_multiplier;
        cfg.tx_lifetime_ms = bc.tx_lifetime_ms;
        cfg.session_lifetime_ms = bc.session_lifetime_ms;
        gw.node = std::make_unique<nodes::GatewayNode>(*suite_, gw.key, cfg, genesis_, keys);
        for (std::size_t a = 0; a < scenario_.alerts.size(); ++a) {
            const AlertSpec& spec = scenario_.alerts[a];
            access::AlertRule rule;
            rule.rule_id = "alert-" + std::to_string(a);
            rule.metric = spec.metric;
            rule.comparator = spec.comparator;
            rule.threshold = spec.threshold;
            for (const auto& who : spec.notify) rule.notify.push_back(NodeAddress{who, Role::User});
            gw.node->alerts().add_rule(std::move(rule));
        }
    }
    for (std::size_t k = 0; k < n_servers; ++k) {
        nodes::CloudConfig cfg;
        cfg.address = servers_[k].address;
        for (std::size_t g = 0; g < n_gateways; ++g)
            if (upstream_of(g) == k) cfg.served_gateways.push_back(gateways_[g].address);
        cfg.skip_wait_ms = bc.skip_wait_ms;
        servers_[k].node =
            std::make_unique<nodes::CloudServerNode>(*suite_, servers_[k].key, cfg, roster_, genesis_, keys);
    }
    for (auto& d : devices_) {
        d.node = std::make_unique<nodes::IoTDeviceNode>(
            nodes::DeviceConfig{d.address, gateways_[d.gateway].address, bc.cache_ttl_ms}, genesis_);
    }

    const SimTime period = from_ms(static_cast<double>(bc.block_period_ms));
    for (std::size_t g = 0; g < n_gateways; ++g)
        clock_.schedule(period + period * static_cast<SimTime>(g) / static_cast<SimTime>(n_gateways),
                        [this, g] { gateway_tick(g); });
    for (std::size_t k = 0; k < n_servers; ++k) clock_.schedule(0, [this, k] { poll_server(k); });
}

double World::verify_cost(std::size_t signatures, double bytes) const {
    const BlockchainSpec& bc = scenario_.blockchain;
    return bc.verify_instructions * static_cast<double>(signatures) + bc.hash_instructions_per_kb * bytes / 1000.0;
}

void World::gateway_tick(std::size_t g) {
    GatewaySlot& gw = gateways_[g];
    const std::int64_t now = now_ms();
    if (auto block = gw.node->flush(now)) {
        cover("nodes");
        in_flight_[block->header.block_id] = block->transactions.size();
        flushed_at_[block->header.block_id] = clock_.now();
        net_.compute(gw.host, scenario_.blockchain.sign_instructions,
                     [this, g, b = std::move(*block)]() mutable { deliver_candidate(g, std::move(b)); });
    }
    metrics_.missing_block_reports += gw.node->detect_missing_blocks(now).size();
    if (++gw.ticks % 10 == 0) {
        metrics_.pruned_blocks += gw.node->prune(now).size();
        cover("chain-core");
    }
    clock_.after(from_ms(static_cast<double>(scenario_.blockchain.block_period_ms)), [this, g] { gateway_tick(g); });
}

void World::deliver_candidate(std::size_t g, chain::Block block) {
    const std::size_t k = upstream_of(g);
    const double bytes = static_cast<double>(block.wire_size());
    auto shared = std::make_shared<chain::Block>(std::move(block));
    net_.send(gateways_[g].host, servers_[k].host, bytes, [this, g, k, shared, bytes] {
        net_.compute(servers_[k].host, verify_cost(shared->transactions.size() + 1, bytes), [this, g, k, shared] {
            ServerSlot& s = servers_[k];
            const std::string id = shared->header.block_id;
            const bool accepted = s.node->accept_candidate(*shared, gateways_[g].address);
            const bool dropped = s.node->dropped_candidates() > s.dropped_seen;
            s.dropped_seen = s.node->dropped_candidates();
            if (!accepted || dropped) {
                auto it = in_flight_.find(id);
                if (it != in_flight_.end()) {
                    metrics_.tx.dropped += it->second;
                    in_flight_.erase(it);
                }
            }
            poll_server(k);
        });
    });
}

void World::poll_server(std::size_t k) {
    nodes::CloudStep st = servers_[k].node->poll(now_ms());
    if (st.proposed_height) {
        proposed_at_[{k, *st.proposed_height}] = clock_.now();
        cover("consensus");
    }
    absorb(k, std::move(st));
    schedule_wake(k);
}

void World::schedule_wake(std::size_t k) {
    ServerSlot& s = servers_[k];
    const auto deadline = s.node->next_deadline();
    if (!deadline) return;
    const SimTime at = std::max(clock_.now() + 1, *deadline * 1000);
    if (s.wake_at && *s.wake_at >= clock_.now() && *s.wake_at <= at) return;
    s.wake_at = at;
    clock_.schedule(at, [this, k, at] {
        if (servers_[k].wake_at == at) servers_[k].wake_at.reset();
        poll_server(k);
    });
}

void World::absorb(std::size_t k, nodes::CloudStep&& st) {
    const SimTime now = clock_.now();
    for (const auto& o : st.step.out) {
        if (o.to) {
            auto it = server_index_.find(o.to->id);
            if (it != server_index_.end() && it->second != k) send_consensus(k, it->second, o.msg);
        } else {
            for (std::size_t t = 0; t < servers_.size(); ++t)
                if (t != k) send_consensus(k, t, o.msg);
        }
    }
    for (const auto& b : st.step.committed) {
        if (b->header.height > global_height_) {
            global_height_ = b->header.height;
            ++metrics_.blocks_committed;
            metrics_.tx.committed += b->transactions.size();
            in_flight_.erase(b->header.block_id);
            cover("consensus");
        }
    }
    for (std::uint64_t h : st.own_commits) {
        auto it = proposed_at_.find({k, h});
        if (it != proposed_at_.end()) {
            if (it->second >= t0_) metrics_.consensus_delays_ms.push_back(to_ms(now - it->second));
            proposed_at_.erase(it);
        }
    }
    for (const auto& gw_addr : st.fan_out)
        for (std::size_t g = 0; g < gateways_.size(); ++g)
            if (gateways_[g].address == gw_addr)
                for (const auto& b : st.step.committed) deliver_block_to_gateway(k, g, b);
}

void World::send_consensus(std::size_t from, std::size_t to, const consensus::ConsensusMsg& msg) {
    const double bytes = static_cast<double>(msg.wire_size());
    const double cost = verify_cost(signature_count(msg), bytes);
    net_.send(servers_[from].host, servers_[to].host, bytes, [this, to, msg, cost] {
        net_.compute(servers_[to].host, cost, [this, to, msg] {
            nodes::CloudStep st = servers_[to].node->on_message(msg, now_ms());
            absorb(to, std::move(st));
            poll_server(to);
        });
    });
}

void World::deliver_block_to_gateway(std::size_t k, std::size_t g, const chain::BlockPtr& block) {
    ++pending_deliveries_;
    const double wire = static_cast<double>(block->wire_size());
    const double bytes = wire + kBundleBytesPerSig * static_cast<double>(consensus::quorum_size(servers_.size()));
    net_.send(servers_[k].host, gateways_[g].host, bytes, [this, g, block, wire] {
        net_.compute(gateways_[g].host, verify_cost(block->transactions.size() + 1, wire), [this, g, block] {
            --pending_deliveries_;
            auto out = gateways_[g].node->on_new_block(block, now_ms());
            cover("chain-core");
            if (!out) return;
            for (const auto& id : out->acknowledged) {
                auto it = flushed_at_.find(id);
                if (it != flushed_at_.end()) {
                    if (it->second >= t0_) metrics_.commit_delays_ms.push_back(to_ms(clock_.now() - it->second));
                    flushed_at_.erase(it);
                }
            }
            for (const auto& applied : out->applied)
                for (const auto& dev : out->forward_to) {
                    auto it = device_index_.find(dev.id);
                    if (it != device_index_.end()) deliver_block_to_device(g, it->second, applied.block);
                }
        });
    });
}

void World::deliver_block_to_device(std::size_t g, std::size_t i, const chain::BlockPtr& block) {
    ++pending_deliveries_;
    const double bytes = static_cast<double>(block->wire_size());
    net_.send(gateways_[g].host, devices_[i].host, bytes, [this, i, block, bytes] {
        const double cost = scenario_.blockchain.hash_instructions_per_kb * bytes / 1000.0;
        net_.compute(devices_[i].host, cost, [this, i, block] {
            --pending_deliveries_;
            auto& dev = *devices_[i].node;
            const auto r = dev.on_block(block, now_ms());
            if (r.status == nodes::DeviceBlockStatus::Tampered) ++metrics_.tamper_alarms;
            if (r.status == nodes::DeviceBlockStatus::Buffered) sync_device(i, true);
            dev.evict(now_ms());
        });
    });
}

void World::sync_device(std::size_t i, bool charged) {
    DeviceSlot& d = devices_.at(i);
    const chain::ChainStore& source = gateways_[d.gateway].node->header_store();
    if (!charged) {
        d.node->sync_headers(source, now_ms());
        return;
    }
    const std::uint64_t gap = source.tip_height().value_or(0) - d.node->header_store().tip_height().value_or(0);
    ++pending_deliveries_;
    net_.send(gateways_[d.gateway].host, d.host, kHeaderBytes * static_cast<double>(gap), [this, i] {
        --pending_deliveries_;
        DeviceSlot& dev = devices_[i];
        dev.node->sync_headers(gateways_[dev.gateway].node->header_store(), now_ms());
    });
}

void World::submit(std::size_t g, chain::Transaction tx) {
    gateways_.at(g).node->submit(std::move(tx));
    note_created();
}

bool World::grant(std::size_t g, std::size_t i) { return change_access(g, i, false); }
bool World::revoke(std::size_t g, std::size_t i) { return change_access(g, i, true); }

bool World::change_access(std::size_t g, std::size_t i, bool revoke) {
    GatewaySlot& gw = gateways_.at(g);
    const std::string group = group_of(g);
    const access::AccessContract* c = gw.node->contracts().find(group);
    if (!c) return false;
    const NodeAddress& subject = devices_.at(i).address;
    auto sig = access::sign_grant(*suite_, gw.key, group, subject, revoke, c->version);
    auto rec = revoke ? gw.node->contracts().revoke_access(group, sig, subject)
                      : gw.node->contracts().grant_access(group, sig, subject);
    if (!rec) return false;
    gw.node->submit(gw.node->contracts().record_transaction(*rec, gw.key, now_ms()));
    note_created();
    cover("access-control");
    return true;
}

void World::bootstrap() {
    const std::int64_t now = now_ms();
    for (std::size_t g = 0; g < gateways_.size(); ++g) {
        GatewaySlot& gw = gateways_[g];
        access::TokenTemplate tmpl;
        tmpl.key_material = crypto::derive_group_key(scenario_.blockchain.key_seed, group_of(g));
        auto tx = gw.node->contracts().create_contract(gw.key, group_of(g), {"stream:" + cluster_name(g)},
                                                        access::ContractScope::local(cluster_name(g)), tmpl, now);
        if (!tx) throw std::runtime_error("contract creation failed for " + group_of(g));
        submit(g, std::move(tx).value());
    }
    for (std::size_t i = 0; i < devices_.size(); ++i) {
        DeviceSlot& d = devices_[i];
        GatewaySlot& gw = gateways_[d.gateway];
        gw.node->set_device_group(d.address.id, group_of(d.gateway));
        auto creds = nodes::make_credentials(*suite_, gw.provisioner, d.key, gw.address);
        auto tx = gw.node->register_device(d.address, creds, now);
        if (!tx) throw std::runtime_error("registration failed for " + d.address.id);
        note_created();
    }
    cover("crypto-suite");
    cover("nodes");
    cover("access-control");
    settle();
    for (std::size_t i = 0; i < devices_.size(); ++i)
        if (!grant(devices_[i].gateway, i)) throw std::runtime_error("grant failed for " + devices_[i].address.id);
    settle();
    // Devices were attached after the first blocks went out; bring their
    // header chains up to their gateway's.
    for (std::size_t i = 0; i < devices_.size(); ++i) sync_device(i, false);
}

bool World::quiescent() const {
    if (!in_flight_.empty() || pending_deliveries_ != 0) return false;
    for (const auto& gw : gateways_)
        if (gw.node->pool_size() != 0) return false;
    for (const auto& s : servers_)
        if (s.node->queued() != 0) return false;
    for (const auto& d : devices_)
        if (d.handing_over || !gateways_[d.gateway].node->connected_devices().count(d.address.id)) return false;
    return true;
}

void World::settle(double limit_ms) {
    if (!clock_.run_while_not([this] { return quiescent(); }, clock_.now() + from_ms(limit_ms)))
        throw std::runtime_error("simulation did not settle within " + fmt(limit_ms) + " ms");
}

void World::send_sample(std::size_t i, nodes::Sample sample, double bytes) {
    DeviceSlot& d = devices_.at(i);
    if (d.handing_over) {
        d.node->hold(std::move(sample));
        return;
    }
    const std::size_t g = d.gateway;
    ++pending_deliveries_;
    net_.send(d.host, gateways_[g].host, bytes, [this, i, g, bytes, s = std::move(sample)]() mutable {
        const std::size_t now_g = devices_[i].gateway;
        if (now_g != g) {
            // Device moved while the sample was on its way; the old gateway relays it.
            net_.send(gateways_[g].host, gateways_[now_g].host, bytes, [this, i, s = std::move(s)]() mutable {
                --pending_deliveries_;
                ingest_at_gateway(i, std::move(s));
            });
            return;
        }
        --pending_deliveries_;
        ingest_at_gateway(i, std::move(s));
    });
}

void World::ingest_at_gateway(std::size_t i, nodes::Sample sample, TxSeen on_tx) {
    const std::size_t g = devices_.at(i).gateway;
    ++pending_deliveries_;
    net_.compute(gateways_[g].host, scenario_.blockchain.sign_instructions,
                 [this, i, g, s = std::move(sample), on_tx = std::move(on_tx)] {
                     --pending_deliveries_;
                     auto r = gateways_[g].node->ingest(s, devices_[i].key, now_ms());
                     cover("nodes");
                     if (!r) {
                         ++metrics_.samples_rejected;
                         return;
                     }
                     if (!r->aggregated) note_created();
                     if (on_tx) on_tx(r->tx);
                     if (!r->alerts.empty()) cover("access-control");
                     metrics_.alerts += r->alerts.size();
                 });
}

void World::request(std::size_t i, std::vector<std::string> tx_ids, double request_bytes, RequestDone done) {
    DeviceSlot& d = devices_.at(i);
    const std::size_t g = d.gateway;
    const std::int64_t now = now_ms();
    auto cb = std::make_shared<RequestDone>(std::move(done));
    if (!d.session || d.session->expires_at() <= now) {
        auto s = gateways_[g].node->authenticate(d.address, now);
        cover("crypto-suite");
        if (!s) {
            (*cb)(nodes::Denied{"", nodes::DenyReason::AuthExpired}, false);
            return;
        }
        d.session = std::move(s).value();
    }
    nodes::DataRequest req{"req-" + std::to_string(request_seq_++), d.address, std::move(tx_ids), *d.session};
    const double lookup = scenario_.blockchain.lookup_instructions;
    net_.send(d.host, gateways_[g].host, request_bytes, [this, i, g, req, cb, lookup, request_bytes] {
        net_.compute(gateways_[g].host, lookup, [this, i, g, req, cb, lookup, request_bytes] {
            nodes::RequestOutcome out = gateways_[g].node->handle_data_request(req, now_ms());
            cover("access-control");
            if (std::holds_alternative<nodes::Forwarded>(out)) {
                const std::size_t k = upstream_of(g);
                net_.send(gateways_[g].host, servers_[k].host, request_bytes, [this, i, k, req, cb, lookup] {
                    net_.compute(servers_[k].host, lookup, [this, i, k, req, cb] {
                        finish_request(i, servers_[k].host, servers_[k].node->handle_data_request(req, now_ms()), cb);
                    });
                });
                return;
            }
            finish_request(i, gateways_[g].host, out, cb);
        });
    });
}

void World::finish_request(std::size_t i, HostId from, const nodes::RequestOutcome& outcome,
                           std::shared_ptr<RequestDone> done) {
    const auto* resp = std::get_if<nodes::DataResponse>(&outcome);
    const double bytes = resp ? static_cast<double>(resp->block->wire_size()) + kTokenBytes : kDenyBytes;
    net_.send(from, devices_[i].host, bytes, [this, i, outcome, done, bytes] {
        const auto* r = std::get_if<nodes::DataResponse>(&outcome);
        if (!r) {
            (*done)(outcome, false);
            return;
        }
        net_.compute(devices_[i].host, verify_cost(r->block->transactions.size() + 1, bytes), [this, i, outcome, done] {
            const auto& resp = std::get<nodes::DataResponse>(outcome);
            const bool ok = devices_[i].node->validate_retrieved(*resp.block, *suite_).valid();
            cover("chain-core");
            (*done)(outcome, ok);
        });
    });
}

void World::start_handover(std::size_t i, std::size_t to, double duration_ms) {
    DeviceSlot& d = devices_.at(i);
    const std::size_t from = d.gateway;
    if (from == to || d.handing_over) return;
    auto tx = nodes::handover(d.address, *gateways_[from].node, *gateways_.at(to).node, now_ms());
    if (!tx) return;
    note_created();
    cover("nodes");
    d.gateway = to;
    d.handing_over = true;
    d.node->begin_handover();
    clock_.after(from_ms(duration_ms), [this, i, to] {
        DeviceSlot& dev = devices_[i];
        dev.handing_over = false;
        for (auto& s : dev.node->complete_handover(gateways_[to].address)) send_sample(i, std::move(s), 256);
    });
}

Metrics World::finish() {
    Metrics m = metrics_;
    const SimTime end = clock_.now();
    m.duration_ms = to_ms(end - t0_);
    m.hosts.clear();
    for (HostId h = 0; h < net_.host_count(); ++h) {
        const Host& host = net_.host(h);
        HostStats st;
        st.host = host.name;
        st.tier = host.tier;
        st.busy_ms = to_ms(net_.busy_time(h, t0_, end));
        st.idle_ms = m.duration_ms - st.busy_ms;
        st.busy_power = host.profile.busy_power;
        st.idle_power = host.profile.idle_power;
        st.energy = energy(host.profile, st.busy_ms, st.idle_ms);
        m.hosts.push_back(std::move(st));
    }
    m.messages = net_.traffic().messages;
    m.bytes = net_.traffic().bytes;
    m.events = clock_.processed();
    m.tx.pooled = 0;
    for (const auto& gw : gateways_) m.tx.pooled += gw.node->pool_size();
    m.tx.in_flight = 0;
    for (const auto& [id, n] : in_flight_) m.tx.in_flight += n;
    return m;
}

}  // namespace fogledger::sim
