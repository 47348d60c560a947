#pragma once

#include <json.hpp>

#include "fogledger/nodes/cloud_server.hpp"
#include "fogledger/nodes/gateway.hpp"
#include "fogledger/nodes/iot_device.hpp"

namespace fogledger::nodes {

// Structured snapshots for debugging and storage-tier assertions.
nlohmann::json inspect(const GatewayNode& gw);
nlohmann::json inspect(const CloudServerNode& cs);
nlohmann::json inspect(const IoTDeviceNode& dev);
nlohmann::json inspect_store(const chain::ChainStore& store);

}  // namespace fogledger::nodes
