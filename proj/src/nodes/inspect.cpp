#include "fogledger/nodes/inspect.hpp"

namespace fogledger::nodes {

using nlohmann::json;

json inspect_store(const chain::ChainStore& store) {
    json j;
    j["tier"] = std::string(chain::tier_name(store.tier()));
    const auto tip = store.tip_height();
    j["tip_height"] = tip ? json(*tip) : json(nullptr);
    j["tip_digest"] = to_hex(store.tip_digest());
    j["headers"] = store.header_count();
    json bodies = json::array();
    for (const auto& [h, b] : store.bodies()) bodies.push_back({{"height", h}, {"block_id", b->header.block_id}});
    j["bodies"] = std::move(bodies);
    j["cache"] = store.cache_ids();
    return j;
}

json inspect(const GatewayNode& gw) {
    json j;
    j["address"] = gw.address().id;
    j["role"] = std::string(role_name(gw.address().role));
    j["cluster"] = gw.config().cluster;
    j["upstream"] = gw.config().upstream.id;
    j["pool_size"] = gw.pool_size();
    j["connected_devices"] = gw.connected_devices();
    j["pending_acks"] = gw.pending_acks().size();
    j["buffered_blocks"] = gw.buffered_blocks();
    j["invalid_blocks"] = gw.invalid_blocks();
    j["expiry_entries"] = gw.expiry_index().size();
    j["headers"] = inspect_store(gw.header_store());
    j["local"] = inspect_store(gw.local_store());
    return j;
}

json inspect(const CloudServerNode& cs) {
    const auto& st = cs.engine().state();
    json j;
    j["address"] = cs.address().id;
    j["role"] = std::string(role_name(cs.address().role));
    j["queued_candidates"] = cs.queued();
    j["dropped_candidates"] = cs.dropped_candidates();
    j["consensus"] = {{"height", st.height}, {"turn", st.turn}, {"confirms", st.confirms.size()}};
    json served = json::array();
    for (const auto& g : cs.config().served_gateways) served.push_back(g.id);
    j["served_gateways"] = std::move(served);
    j["full"] = inspect_store(cs.full_store());
    return j;
}

json inspect(const IoTDeviceNode& dev) {
    json j;
    j["address"] = dev.address().id;
    j["role"] = std::string(role_name(dev.address().role));
    j["gateway"] = dev.gateway().id;
    j["in_handover"] = dev.in_handover();
    j["tamper_alarms"] = dev.tamper_alarms();
    j["headers"] = inspect_store(dev.header_store());
    return j;
}

}  // namespace fogledger::nodes
