#pragma once

#include <filesystem>
#include <stdexcept>

#include "fogledger/consensus/roster.hpp"

namespace fogledger::consensus {

enum class EntryKind : std::uint8_t { Deliver = 0, Propose = 1, Skip = 2 };

/// One scheduled action. Deliver carries a serialized ConsensusMsg from one
/// server to another; Propose and Skip are local actions of `to`, and
/// Propose carries the candidate block.
struct ScheduleEntry {
    EntryKind kind = EntryKind::Deliver;
    std::uint64_t step = 0;
    std::string from;
    std::string to;
    Bytes payload;
};

struct RecordedAccept {
    std::string server;
    std::uint64_t height = 0;
    Digest digest{};
    auto operator<=>(const RecordedAccept&) const = default;
};

struct RecordedSchedule {
    crypto::SchemeId scheme = crypto::SchemeId::KeyedDigest;
    std::uint64_t key_seed = 0;
    ServerRoster roster;
    std::vector<std::string> faulty;
    std::vector<NodeAddress> clients;
    std::vector<ScheduleEntry> entries;
    std::vector<RecordedAccept> outcome;
    bool violation = false;

    Bytes serialize() const;
    static RecordedSchedule deserialize(ByteView data);
    void save(const std::filesystem::path& path) const;
    static RecordedSchedule load(const std::filesystem::path& path);
};

class IncompatibleSchedule : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ReplayResult {
    std::vector<RecordedAccept> accepts;
    bool matches_recorded = false;
    bool safe = true;
};

// Re-executes the recorded actions against fresh honest servers.
ReplayResult replay_schedule(const RecordedSchedule& schedule);

// As above, but first checks that the recording was made for this roster and
// scheme; throws IncompatibleSchedule otherwise.
ReplayResult replay_schedule(const RecordedSchedule& schedule, const ServerRoster& roster, crypto::SchemeId scheme);

// True iff no height has two distinct accepted digests.
bool accepts_are_safe(const std::vector<RecordedAccept>& accepts);

}  // namespace fogledger::consensus
