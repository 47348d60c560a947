#include "fogledger/crypto/key_registry.hpp"

#include <fstream>
#include <iterator>
#include <mutex>

namespace fogledger::crypto {

namespace {
constexpr std::uint8_t kMagic[] = {'F', 'L', 'K', 'E', 'Y', 'S', '0', '1'};
}

KeyRegistry::KeyRegistry(const KeyRegistry& other) {
    std::shared_lock lock(other.mu_);
    records_ = other.records_;
}

KeyRegistry& KeyRegistry::operator=(const KeyRegistry& other) {
    if (this == &other) return *this;
    std::map<std::string, KeyRecord> copy;
    {
        std::shared_lock lock(other.mu_);
        copy = other.records_;
    }
    std::unique_lock lock(mu_);
    records_ = std::move(copy);
    return *this;
}

bool KeyRegistry::add(const NodeAddress& address, Bytes public_key) {
    std::unique_lock lock(mu_);
    return records_.emplace(address.id, KeyRecord{address, std::move(public_key)}).second;
}

bool KeyRegistry::remove(const std::string& id) {
    std::unique_lock lock(mu_);
    return records_.erase(id) > 0;
}

std::optional<KeyRecord> KeyRegistry::find(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = records_.find(id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

bool KeyRegistry::contains(const std::string& id) const {
    std::shared_lock lock(mu_);
    return records_.count(id) > 0;
}

std::size_t KeyRegistry::size() const {
    std::shared_lock lock(mu_);
    return records_.size();
}

std::vector<KeyRecord> KeyRegistry::records() const {
    std::shared_lock lock(mu_);
    std::vector<KeyRecord> out;
    out.reserve(records_.size());
    for (const auto& [_, rec] : records_) out.push_back(rec);
    return out;
}

Bytes KeyRegistry::serialize(SchemeId scheme) const {
    Encoder enc;
    enc.raw(ByteView{kMagic, sizeof kMagic});
    enc.u8(static_cast<std::uint8_t>(scheme));
    auto recs = records();
    enc.u32(static_cast<std::uint32_t>(recs.size()));
    for (const auto& r : recs) {
        r.address.encode(enc);
        enc.bytes(r.public_key);
    }
    return enc.take();
}

std::pair<SchemeId, KeyRegistry> KeyRegistry::deserialize(ByteView data) {
    Decoder dec(data);
    ByteView magic = dec.raw(sizeof kMagic);
    if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic))) throw DecodeError("not a key registry file");
    std::uint8_t scheme = dec.u8();
    if (scheme != 1 && scheme != 2) throw DecodeError("unknown signature scheme in key registry");
    KeyRegistry reg;
    std::uint32_t n = dec.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        NodeAddress a = NodeAddress::decode(dec);
        Bytes pub = dec.bytes();
        if (!reg.add(a, std::move(pub))) throw DecodeError("duplicate address in key registry");
    }
    dec.expect_done();
    return {static_cast<SchemeId>(scheme), std::move(reg)};
}

void KeyRegistry::save(const std::filesystem::path& path, SchemeId scheme) const {
    Bytes data = serialize(scheme);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write key registry: " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

std::pair<SchemeId, KeyRegistry> KeyRegistry::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read key registry: " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(data);
}

}  // namespace fogledger::crypto
