#include "fogledger/common/codec.hpp"

#include <bit>
#include <cstring>

namespace fogledger {

Encoder& Encoder::u8(std::uint8_t v) {
    out_.push_back(v);
    return *this;
}

Encoder& Encoder::u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

Encoder& Encoder::u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

Encoder& Encoder::f64(double v) { return u64(std::bit_cast<std::uint64_t>(v)); }

Encoder& Encoder::bytes(ByteView v) {
    if (v.size() > UINT32_MAX) throw std::length_error("field exceeds u32 length prefix");
    u32(static_cast<std::uint32_t>(v.size()));
    return raw(v);
}

Encoder& Encoder::str(std::string_view v) {
    return bytes(ByteView{reinterpret_cast<const std::uint8_t*>(v.data()), v.size()});
}

Encoder& Encoder::digest(const Digest& d) { return raw(view_of(d)); }

Encoder& Encoder::raw(ByteView v) {
    out_.insert(out_.end(), v.begin(), v.end());
    return *this;
}

void Decoder::need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DecodeError("truncated input");
}

std::uint8_t Decoder::u8() {
    need(1);
    return in_[pos_++];
}

std::uint32_t Decoder::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
    return v;
}

std::uint64_t Decoder::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
    return v;
}

double Decoder::f64() { return std::bit_cast<double>(u64()); }

bool Decoder::boolean() {
    std::uint8_t v = u8();
    if (v > 1) throw DecodeError("boolean out of range");
    return v == 1;
}

Bytes Decoder::bytes() {
    std::uint32_t n = u32();
    ByteView v = raw(n);
    return Bytes(v.begin(), v.end());
}

std::string Decoder::str() {
    std::uint32_t n = u32();
    ByteView v = raw(n);
    return std::string(reinterpret_cast<const char*>(v.data()), v.size());
}

Digest Decoder::digest() {
    ByteView v = raw(32);
    Digest d;
    std::memcpy(d.data(), v.data(), 32);
    return d;
}

ByteView Decoder::raw(std::size_t n) {
    need(n);
    ByteView v = in_.subspan(pos_, n);
    pos_ += n;
    return v;
}

void Decoder::expect_done() const {
    if (!done()) throw DecodeError("trailing bytes after record");
}

}  // namespace fogledger
