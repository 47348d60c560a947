#include "fogledger/nodes/node_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace fogledger::nodes {
namespace {

[[noreturn]] void fail(const std::string& source, const YAML::Node& at, const std::string& msg) {
    std::ostringstream os;
    os << source;
    const YAML::Mark m = at.Mark();
    if (!m.is_null()) os << ':' << m.line + 1 << ':' << m.column + 1;
    os << ": " << msg;
    throw ConfigError(os.str());
}

template <typename T>
T scalar(const std::string& source, const YAML::Node& n, const std::string& key) {
    if (!n.IsScalar()) fail(source, n, "'" + key + "' must be a scalar");
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail(source, n, "'" + key + "' has an invalid value '" + n.Scalar() + "'");
    }
}

std::int64_t positive(const std::string& source, const YAML::Node& n, const std::string& key) {
    const auto v = scalar<std::int64_t>(source, n, key);
    if (v <= 0) fail(source, n, "'" + key + "' must be positive");
    return v;
}

NodeConfig parse_entry(const std::string& source, const YAML::Node& node) {
    if (!node.IsMap()) fail(source, node, "node entry must be a mapping");
    static const std::set<std::string> known = {"address", "role", "cluster", "upstream", "provisioner",
                                                "block_period_ms", "cache_ttl_ms", "due_time_multiplier",
                                                "mean_rtt_ms", "serves"};
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!known.count(key)) fail(source, kv.first, "unknown key '" + key + "'");
    }
    NodeConfig c;
    c.line = node.Mark().line + 1;
    if (!node["address"]) fail(source, node, "missing required key 'address'");
    if (!node["role"]) fail(source, node, "missing required key 'role'");
    c.address.id = scalar<std::string>(source, node["address"], "address");
    if (c.address.id.empty()) fail(source, node["address"], "'address' must not be empty");
    const auto role_text = scalar<std::string>(source, node["role"], "role");
    const auto role = parse_role(role_text);
    if (!role) fail(source, node["role"], "unknown role '" + role_text + "'");
    c.address.role = *role;

    if (auto n = node["cluster"]) c.cluster = scalar<std::string>(source, n, "cluster");
    if (auto n = node["block_period_ms"]) c.block_period_ms = positive(source, n, "block_period_ms");
    if (auto n = node["cache_ttl_ms"]) c.cache_ttl_ms = positive(source, n, "cache_ttl_ms");
    if (auto n = node["mean_rtt_ms"]) c.mean_rtt_ms = positive(source, n, "mean_rtt_ms");
    if (auto n = node["due_time_multiplier"]) {
        c.due_time_multiplier = scalar<double>(source, n, "due_time_multiplier");
        if (!(c.due_time_multiplier > 0)) fail(source, n, "'due_time_multiplier' must be positive");
    }

    const bool is_gateway = c.address.role == Role::Gateway;
    const bool is_device = c.address.role == Role::IoTDevice;
    if (auto n = node["upstream"]) {
        if (!is_gateway && !is_device) fail(source, n, "'upstream' applies to gateways and devices only");
        c.upstream = NodeAddress{scalar<std::string>(source, n, "upstream"),
                                 is_gateway ? Role::CloudServer : Role::Gateway};
    }
    if (auto n = node["provisioner"]) {
        if (!is_gateway) fail(source, n, "'provisioner' applies to gateways only");
        c.provisioner = NodeAddress{scalar<std::string>(source, n, "provisioner"), Role::User};
    }
    if (auto n = node["serves"]) {
        if (c.address.role != Role::CloudServer) fail(source, n, "'serves' applies to cloud servers only");
        if (!n.IsSequence()) fail(source, n, "'serves' must be a list of gateway ids");
        for (const auto& s : n) c.serves.push_back(scalar<std::string>(source, s, "serves"));
    }
    if ((is_gateway || is_device) && !c.upstream) fail(source, node, "missing required key 'upstream'");
    if (is_gateway && c.cluster.empty()) fail(source, node, "gateways require a 'cluster'");
    return c;
}

}  // namespace

std::vector<NodeConfig> parse_node_configs(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        std::ostringstream os;
        os << source << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
        throw ConfigError(os.str());
    }
    std::vector<NodeConfig> out;
    if (root.IsMap() && root["nodes"]) {
        const YAML::Node list = root["nodes"];
        if (!list.IsSequence()) fail(source, list, "'nodes' must be a list");
        for (const auto& n : list) out.push_back(parse_entry(source, n));
    } else if (root.IsMap()) {
        out.push_back(parse_entry(source, root));
    } else {
        fail(source, root, "expected a node mapping or a 'nodes' list");
    }
    std::set<std::string> seen;
    for (const auto& c : out)
        if (!seen.insert(c.address.id).second)
            throw ConfigError(source + ":" + std::to_string(c.line) + ": duplicate address '" + c.address.id + "'");
    return out;
}

std::vector<NodeConfig> load_node_configs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_node_configs(ss.str(), path);
}

GatewayConfig to_gateway_config(const NodeConfig& c) {
    if (c.address.role != Role::Gateway) throw ConfigError(c.address.id + ": not a gateway");
    GatewayConfig g;
    g.address = c.address;
    g.cluster = c.cluster;
    g.upstream = *c.upstream;
    g.provisioner = c.provisioner.value_or(NodeAddress{c.cluster + "/provisioner", Role::User});
    g.block_period_ms = c.block_period_ms;
    g.mean_rtt_ms = c.mean_rtt_ms;
    g.due_time_multiplier = c.due_time_multiplier;
    return g;
}

DeviceConfig to_device_config(const NodeConfig& c) {
    if (c.address.role != Role::IoTDevice) throw ConfigError(c.address.id + ": not an IoT device");
    return DeviceConfig{c.address, *c.upstream, c.cache_ttl_ms};
}

CloudConfig to_cloud_config(const NodeConfig& c) {
    if (c.address.role != Role::CloudServer) throw ConfigError(c.address.id + ": not a cloud server");
    CloudConfig cc;
    cc.address = c.address;
    for (const auto& id : c.serves) cc.served_gateways.push_back(NodeAddress{id, Role::Gateway});
    return cc;
}

}  // namespace fogledger::nodes
