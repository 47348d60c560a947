#include "fogledger/common/identity.hpp"

namespace fogledger {

std::string_view role_name(Role role) {
    switch (role) {
        case Role::CloudServer: return "cloud_server";
        case Role::Gateway: return "gateway";
        case Role::IoTDevice: return "iot_device";
        case Role::User: return "user";
    }
    return "unknown";
}

std::optional<Role> parse_role(std::string_view name) {
    if (name == "cloud_server" || name == "cloud") return Role::CloudServer;
    if (name == "gateway") return Role::Gateway;
    if (name == "iot_device" || name == "device") return Role::IoTDevice;
    if (name == "user") return Role::User;
    return std::nullopt;
}

void NodeAddress::encode(Encoder& enc) const {
    enc.str(id);
    enc.u8(static_cast<std::uint8_t>(role));
}

NodeAddress NodeAddress::decode(Decoder& dec) {
    NodeAddress a;
    a.id = dec.str();
    std::uint8_t r = dec.u8();
    if (r > static_cast<std::uint8_t>(Role::User)) throw DecodeError("role out of range");
    a.role = static_cast<Role>(r);
    return a;
}

std::string to_string(const NodeAddress& addr) {
    return addr.id + "(" + std::string(role_name(addr.role)) + ")";
}

}  // namespace fogledger
