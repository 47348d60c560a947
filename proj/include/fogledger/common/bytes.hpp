#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fogledger {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

inline constexpr Digest kZeroDigest{};

std::string to_hex(ByteView data);
inline std::string to_hex(const Digest& d) { return to_hex(ByteView{d.data(), d.size()}); }

// Parses lowercase or uppercase hex; throws std::invalid_argument on odd length or bad digits.
Bytes from_hex(std::string_view hex);

Bytes bytes_of(std::string_view text);

inline ByteView view_of(const Digest& d) { return ByteView{d.data(), d.size()}; }

}  // namespace fogledger
