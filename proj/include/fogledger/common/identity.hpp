#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "fogledger/common/codec.hpp"

namespace fogledger {

enum class Role : std::uint8_t { CloudServer = 0, Gateway = 1, IoTDevice = 2, User = 3 };

std::string_view role_name(Role role);
std::optional<Role> parse_role(std::string_view name);

/// Network identity of a participant. The id is an opaque byte string
/// (usually a readable label in simulations); ordering is by id, then role.
struct NodeAddress {
    std::string id;
    Role role = Role::User;

    auto operator<=>(const NodeAddress&) const = default;
    bool operator==(const NodeAddress&) const = default;

    void encode(Encoder& enc) const;
    static NodeAddress decode(Decoder& dec);
};

std::string to_string(const NodeAddress& addr);

}  // namespace fogledger
