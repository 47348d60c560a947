#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogledger/nodes/cloud_server.hpp"
#include "fogledger/nodes/gateway.hpp"
#include "fogledger/nodes/iot_device.hpp"

namespace fogledger::nodes {

// Raised with a "source:line:column: message" prefix where a position is known.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NodeConfig {
    NodeAddress address;
    std::string cluster;
    std::optional<NodeAddress> upstream;     // gateways: cloud server; devices: gateway
    std::optional<NodeAddress> provisioner;  // gateways only
    std::int64_t block_period_ms = 100;
    std::int64_t cache_ttl_ms = 5'000;
    double due_time_multiplier = 3.0;
    std::int64_t mean_rtt_ms = 50;
    std::vector<std::string> serves;  // cloud servers: gateway ids
    int line = 0;                     // 1-based line of the entry in its source
};

// Accepts either a single mapping or a document with a top-level `nodes:` list.
std::vector<NodeConfig> parse_node_configs(const std::string& text, const std::string& source = "<string>");
std::vector<NodeConfig> load_node_configs(const std::string& path);

GatewayConfig to_gateway_config(const NodeConfig& c);
DeviceConfig to_device_config(const NodeConfig& c);
CloudConfig to_cloud_config(const NodeConfig& c);

}  // namespace fogledger::nodes
