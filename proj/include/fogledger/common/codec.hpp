#pragma once

// Canonical binary encoding shared by every persisted or signed structure.
// Integers are big-endian; strings and byte strings carry a u32 length prefix.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fogledger/common/bytes.hpp"

namespace fogledger {

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Encoder {
public:
    Encoder& u8(std::uint8_t v);
    Encoder& u32(std::uint32_t v);
    Encoder& u64(std::uint64_t v);
    Encoder& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
    Encoder& f64(double v);
    Encoder& boolean(bool v) { return u8(v ? 1 : 0); }
    Encoder& bytes(ByteView v);
    Encoder& str(std::string_view v);
    Encoder& digest(const Digest& d);
    // Appends without a length prefix.
    Encoder& raw(ByteView v);

    const Bytes& data() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

class Decoder {
public:
    explicit Decoder(ByteView in) : in_(in) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64();
    bool boolean();
    Bytes bytes();
    std::string str();
    Digest digest();
    ByteView raw(std::size_t n);

    bool done() const { return pos_ == in_.size(); }
    std::size_t remaining() const { return in_.size() - pos_; }
    std::size_t position() const { return pos_; }
    // Throws DecodeError when input was not fully consumed.
    void expect_done() const;

private:
    void need(std::size_t n) const;

    ByteView in_;
    std::size_t pos_ = 0;
};

}  // namespace fogledger
