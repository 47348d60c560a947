#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "fogledger/common/identity.hpp"
#include "fogledger/crypto/signature.hpp"

namespace fogledger::crypto {

struct KeyRecord {
    NodeAddress address;
    Bytes public_key;
    bool operator==(const KeyRecord&) const = default;
};

/// Public keys of every registered participant, keyed by address id.
/// Reads take a shared lock; registration is exclusive.
class KeyRegistry {
public:
    KeyRegistry() = default;
    KeyRegistry(const KeyRegistry& other);
    KeyRegistry& operator=(const KeyRegistry& other);

    // Returns false when the id is already present.
    bool add(const NodeAddress& address, Bytes public_key);
    bool remove(const std::string& id);
    std::optional<KeyRecord> find(const std::string& id) const;
    bool contains(const std::string& id) const;
    std::size_t size() const;
    std::vector<KeyRecord> records() const;

    Bytes serialize(SchemeId scheme) const;
    // Returns the scheme recorded in the file together with the registry.
    static std::pair<SchemeId, KeyRegistry> deserialize(ByteView data);

    void save(const std::filesystem::path& path, SchemeId scheme) const;
    static std::pair<SchemeId, KeyRegistry> load(const std::filesystem::path& path);

private:
    mutable std::shared_mutex mu_;
    std::map<std::string, KeyRecord> records_;
};

}  // namespace fogledger::crypto
