#include "fogledger/consensus/schedule_file.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <set>

#include "fogledger/consensus/engine.hpp"
#include "fogledger/consensus/explorer.hpp"

namespace fogledger::consensus {

namespace {
constexpr std::uint8_t kMagic[] = {'F', 'L', 'S', 'C', 'H', 'E', 'D', '1'};
}

Bytes RecordedSchedule::serialize() const {
    Encoder enc;
    enc.raw(ByteView{kMagic, sizeof kMagic});
    enc.u8(static_cast<std::uint8_t>(scheme));
    enc.u64(key_seed);
    enc.bytes(roster.serialize());
    enc.digest(roster.digest());
    enc.u32(static_cast<std::uint32_t>(faulty.size()));
    for (const auto& f : faulty) enc.str(f);
    enc.u32(static_cast<std::uint32_t>(clients.size()));
    for (const auto& c : clients) c.encode(enc);
    enc.u32(static_cast<std::uint32_t>(entries.size()));
    for (const auto& e : entries) {
        enc.u8(static_cast<std::uint8_t>(e.kind)).u64(e.step).str(e.from).str(e.to).bytes(e.payload);
    }
    enc.boolean(violation);
    enc.u32(static_cast<std::uint32_t>(outcome.size()));
    for (const auto& a : outcome) enc.str(a.server).u64(a.height).digest(a.digest);
    return enc.take();
}

RecordedSchedule RecordedSchedule::deserialize(ByteView data) {
    Decoder dec(data);
    ByteView magic = dec.raw(sizeof kMagic);
    if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic))) throw DecodeError("not a schedule file");
    RecordedSchedule s;
    std::uint8_t scheme = dec.u8();
    if (scheme != 1 && scheme != 2) throw DecodeError("unknown scheme in schedule");
    s.scheme = static_cast<crypto::SchemeId>(scheme);
    s.key_seed = dec.u64();
    Bytes roster_bytes = dec.bytes();
    s.roster = ServerRoster::deserialize(roster_bytes);
    if (dec.digest() != s.roster.digest()) throw DecodeError("roster digest mismatch in schedule");
    std::uint32_t nf = dec.u32();
    for (std::uint32_t i = 0; i < nf; ++i) s.faulty.push_back(dec.str());
    std::uint32_t nc = dec.u32();
    for (std::uint32_t i = 0; i < nc; ++i) s.clients.push_back(NodeAddress::decode(dec));
    std::uint32_t ne = dec.u32();
    for (std::uint32_t i = 0; i < ne; ++i) {
        ScheduleEntry e;
        std::uint8_t kind = dec.u8();
        if (kind > 2) throw DecodeError("unknown schedule entry kind");
        e.kind = static_cast<EntryKind>(kind);
        e.step = dec.u64();
        e.from = dec.str();
        e.to = dec.str();
        e.payload = dec.bytes();
        s.entries.push_back(std::move(e));
    }
    s.violation = dec.boolean();
    std::uint32_t na = dec.u32();
    for (std::uint32_t i = 0; i < na; ++i) {
        RecordedAccept a;
        a.server = dec.str();
        a.height = dec.u64();
        a.digest = dec.digest();
        s.outcome.push_back(a);
    }
    dec.expect_done();
    return s;
}

void RecordedSchedule::save(const std::filesystem::path& path) const {
    Bytes data = serialize();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write schedule: " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

RecordedSchedule RecordedSchedule::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read schedule: " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(data);
}

bool accepts_are_safe(const std::vector<RecordedAccept>& accepts) {
    std::map<std::uint64_t, Digest> by_height;
    for (const auto& a : accepts) {
        auto [it, inserted] = by_height.emplace(a.height, a.digest);
        if (!inserted && it->second != a.digest) return false;
    }
    return true;
}

ReplayResult replay_schedule(const RecordedSchedule& schedule) {
    auto world = build_explorer_world(schedule.scheme, schedule.key_seed, schedule.roster, schedule.clients);
    std::set<std::string> faulty(schedule.faulty.begin(), schedule.faulty.end());
    std::map<std::string, std::unique_ptr<ServerConsensus>> honest;
    for (const auto& s : schedule.roster.servers()) {
        if (faulty.count(s.id)) continue;
        honest.emplace(s.id, std::make_unique<ServerConsensus>(*world->suite, world->server_keys.at(s.id),
                                                                world->roster, world->genesis.header));
    }

    ReplayResult result;
    auto note = [&](const std::string& id, const Step& step) {
        for (const auto& c : step.committed) result.accepts.push_back({id, c->header.height, c->header.digest()});
    };
    for (const auto& e : schedule.entries) {
        auto it = honest.find(e.to);
        if (it == honest.end()) continue;
        ServerConsensus& engine = *it->second;
        try {
            switch (e.kind) {
                case EntryKind::Deliver: note(e.to, engine.handle(ConsensusMsg::deserialize(e.payload))); break;
                case EntryKind::Propose:
                    note(e.to, engine.propose(chain::Block::deserialize(e.payload), static_cast<std::int64_t>(e.step)));
                    break;
                case EntryKind::Skip: note(e.to, engine.skip_turn()); break;
            }
        } catch (const DecodeError& err) {
            throw IncompatibleSchedule(std::string("undecodable schedule entry: ") + err.what());
        } catch (const std::logic_error& err) {
            throw IncompatibleSchedule(std::string("schedule does not fit protocol state: ") + err.what());
        }
    }
    result.safe = accepts_are_safe(result.accepts);
    result.matches_recorded = result.accepts == schedule.outcome;
    return result;
}

ReplayResult replay_schedule(const RecordedSchedule& schedule, const ServerRoster& roster, crypto::SchemeId scheme) {
    if (schedule.roster.digest() != roster.digest())
        throw IncompatibleSchedule("schedule was recorded for a different server roster");
    if (schedule.scheme != scheme) throw IncompatibleSchedule("schedule was recorded with a different signature scheme");
    return replay_schedule(schedule);
}

}  // namespace fogledger::consensus
