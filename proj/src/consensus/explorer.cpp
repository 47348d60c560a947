#include "fogledger/consensus/explorer.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "fogledger/chain/merkle.hpp"
#include "fogledger/chain/validation.hpp"
#include "fogledger/common/rng.hpp"

namespace fogledger::consensus {

ServerRoster numbered_roster(std::size_t n) {
    std::vector<NodeAddress> v;
    for (std::size_t i = 0; i < n; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "cs-%02zu", i);
        v.push_back(NodeAddress{name, Role::CloudServer});
    }
    return ServerRoster(std::move(v));
}

std::unique_ptr<ExplorerWorld> build_explorer_world(crypto::SchemeId scheme, std::uint64_t key_seed,
                                                    const ServerRoster& roster,
                                                    const std::vector<NodeAddress>& clients) {
    auto w = std::make_unique<ExplorerWorld>();
    w->suite = std::make_unique<crypto::CryptoSuite>(scheme);
    w->roster = roster;
    for (const auto& s : roster.servers()) w->server_keys.emplace(s.id, w->suite->enroll_derived(s, key_seed));
    for (const auto& c : clients) w->clients.push_back(w->suite->enroll_derived(c, key_seed));
    w->genesis = make_genesis(roster, *w->suite, w->server_keys.at(roster.at(0).id), 0);
    return w;
}

namespace {

struct InFlight {
    std::string from;
    std::string to;
    ConsensusMsg msg;
};

std::vector<NodeAddress> client_addresses(std::size_t n) {
    std::vector<NodeAddress> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(NodeAddress{"client-" + std::to_string(i), Role::User});
    return v;
}

chain::Block make_candidate(const ExplorerWorld& w, const std::string& server, std::uint64_t k, Rng& rng,
                            bool corrupt_signature) {
    chain::Block b;
    const std::size_t txs = 1 + rng.below(2);
    for (std::size_t i = 0; i < txs; ++i) {
        const auto& client = w.clients[rng.below(w.clients.size())];
        Bytes payload(8);
        for (auto& byte : payload) byte = static_cast<std::uint8_t>(rng.next());
        b.transactions.push_back(chain::make_transaction(*w.suite, client,
                                                         server + "/" + std::to_string(k) + "/" + std::to_string(i),
                                                         std::move(payload), "g", 0, 1'000'000'000'000));
    }
    if (corrupt_signature) b.transactions.front().signature.bytes.front() ^= 0x01;
    b.header.block_id = "cand-" + server + "-" + std::to_string(k);
    b.header.origin_cluster = "cluster-" + server;
    b.header.body_hash = chain::hash_block_body(b.transactions);
    return b;
}

struct Coalition {
    const ExplorerWorld& world;
    const AdversaryProfile& profile;
    std::vector<std::string> members;
    std::map<std::uint64_t, std::vector<chain::BlockPtr>> blocks;
    std::map<Digest, std::map<std::string, crypto::Signature>> sigs;
    std::map<std::pair<std::string, std::uint64_t>, Digest> signed_by;

    bool may_sign(const std::string& member, std::uint64_t h, const Digest& d) const {
        auto it = signed_by.find({member, h});
        return it == signed_by.end() || it->second == d || profile.double_sign;
    }

    void note_signed(const std::string& member, std::uint64_t h, const Digest& d) {
        signed_by.emplace(std::make_pair(member, h), d);
    }

    void learn_block(const chain::BlockPtr& b) {
        auto& v = blocks[b->header.height];
        const Digest d = b->header.digest();
        for (const auto& known : v)
            if (known->header.digest() == d) return;
        v.push_back(b);
    }

    void learn_sig(std::uint64_t h, const Digest& d, const crypto::Signature& sig) {
        if (!world.roster.contains(sig.signer)) return;
        if (!world.suite->verify(confirm_message(h, d), sig)) return;
        sigs[d].emplace(sig.signer.id, sig);
    }
};

class Adversary {
public:
    Adversary(const ExplorerWorld& w, const crypto::KeyPair& key, Coalition& co, Rng rng)
        : w_(w), key_(key), co_(co), rng_(rng), core_(*w.suite, key, w.roster, w.genesis.header) {}

    ServerConsensus& core() { return core_; }

    std::vector<InFlight> handle(const ConsensusMsg& msg) {
        const auto& p = co_.profile;
        if (p.drop && rng_.chance(p.act_probability * 0.5)) return {};
        learn(msg);

        bool feed = true;
        if (const auto* prop = std::get_if<Propose>(&msg.body); prop && prop->block) {
            const auto h = prop->block->header.height;
            if (!co_.may_sign(key_.owner.id, h, prop->block->header.digest())) feed = false;
        }
        std::vector<InFlight> out;
        if (feed) out = emit(core_.handle(msg));
        if (p.forge_bundle && rng_.chance(p.act_probability)) {
            auto f = forge(core_.state().height);
            out.insert(out.end(), f.begin(), f.end());
        }
        return out;
    }

    std::vector<InFlight> on_turn(std::int64_t now, const chain::Block& x, const chain::Block& y,
                                  const chain::Block& bad) {
        const auto& p = co_.profile;
        const auto h = core_.state().height;
        if (co_.signed_by.count({key_.owner.id, h}) && !p.double_sign) return emit(core_.skip_turn());

        if (p.equivocate && rng_.chance(p.act_probability)) return equivocate(now, x, y);
        double r = rng_.uniform();
        if (r < 0.2) return emit(core_.propose(bad, now));
        if (r < 0.35) return emit(core_.skip_turn());
        return emit(core_.propose(x, now));
    }

private:
    void learn(const ConsensusMsg& msg) {
        if (const auto* prop = std::get_if<Propose>(&msg.body); prop && prop->block) {
            co_.learn_block(prop->block);
        } else if (const auto* c = std::get_if<Confirm>(&msg.body)) {
            co_.learn_sig(c->height, c->block_digest, c->signature);
        } else if (const auto* a = std::get_if<BlockAdd>(&msg.body)) {
            for (const auto& s : a->bundle) co_.learn_sig(a->height, a->block_digest, s);
        }
    }

    void sync_votes() {
        for (const auto& [h, d] : core_.state().signed_at) co_.note_signed(key_.owner.id, h, d);
        if (const auto& pend = core_.state().pending) co_.learn_block(pend);
        for (const auto& [id, sig] : core_.state().confirms)
            co_.learn_sig(core_.state().height, core_.state().pending_digest, sig);
    }

    std::vector<std::string> others() const {
        std::vector<std::string> v;
        for (const auto& s : w_.roster.servers())
            if (s.id != key_.owner.id) v.push_back(s.id);
        return v;
    }

    ConsensusMsg mutate_confirm(const Confirm& c) {
        switch (rng_.below(3)) {
            case 0: {
                Confirm bad = c;
                bad.signature.bytes.assign(bad.signature.bytes.size(), static_cast<std::uint8_t>(rng_.next()));
                return seal(*w_.suite, key_, bad);
            }
            case 1: {
                Confirm bad = c;
                bad.signature = w_.suite->sign(key_, confirm_message(c.height + 1, c.block_digest));
                return seal(*w_.suite, key_, bad);
            }
            default: {
                auto reason = static_cast<ErrorReason>(1 + rng_.below(7));
                return seal(*w_.suite, key_, ErrorNotice{c.height, c.block_id, reason});
            }
        }
    }

    std::vector<InFlight> emit(Step&& step) {
        sync_votes();
        const auto& p = co_.profile;
        std::vector<InFlight> out;
        for (auto& ob : step.out) {
            std::vector<std::string> targets = ob.to ? std::vector<std::string>{ob.to->id} : others();
            for (const auto& t : targets) {
                ConsensusMsg m = ob.msg;
                if (const auto* c = std::get_if<Confirm>(&m.body); c && p.wrong_reply && rng_.chance(p.act_probability)) {
                    if (rng_.chance(0.25)) continue;
                    m = mutate_confirm(*c);
                }
                out.push_back({key_.owner.id, t, m});
                if (p.duplicate && rng_.chance(p.act_probability * 0.5)) out.push_back({key_.owner.id, t, m});
            }
        }
        return out;
    }

    chain::BlockPtr restamp(const chain::Block& candidate, std::int64_t now) const {
        auto b = std::make_shared<chain::Block>(candidate);
        b->header.height = core_.state().height;
        b->header.prev_hash = core_.state().tip_digest;
        b->header.proposer = key_.owner;
        b->header.timestamp = now;
        b->header.body_hash = chain::hash_block_body(b->transactions);
        return b;
    }

    std::vector<InFlight> equivocate(std::int64_t now, const chain::Block& x, const chain::Block& y) {
        Step step = core_.propose(x, now);
        sync_votes();
        auto alt = restamp(y, now);
        co_.learn_block(alt);
        if (co_.profile.double_sign) {
            const Digest d = alt->header.digest();
            co_.note_signed(key_.owner.id, alt->header.height, d);
            co_.sigs[d].emplace(key_.owner.id, w_.suite->sign(key_, confirm_message(alt->header.height, d)));
        }
        ConsensusMsg prop_y = seal(*w_.suite, key_, Propose{alt});

        std::vector<InFlight> out;
        for (auto& ob : step.out) {
            if (!std::holds_alternative<Propose>(ob.msg.body)) continue;
            for (const auto& t : others()) {
                if (rng_.chance(0.5))
                    out.push_back({key_.owner.id, t, ob.msg});
                else
                    out.push_back({key_.owner.id, t, prop_y});
            }
        }
        return out;
    }

    std::vector<InFlight> forge(std::uint64_t h) {
        auto it = co_.blocks.find(h);
        if (it == co_.blocks.end() || it->second.empty()) return {};
        const chain::BlockPtr b = it->second[rng_.below(it->second.size())];
        const Digest d = b->header.digest();
        const Bytes payload = confirm_message(h, d);

        std::vector<crypto::Signature> bundle;
        for (const auto& [_, sig] : co_.sigs[d]) bundle.push_back(sig);
        for (const auto& m : co_.members) {
            if (!co_.may_sign(m, h, d) || !rng_.chance(0.7)) continue;
            co_.note_signed(m, h, d);
            bundle.push_back(w_.suite->sign(w_.server_keys.at(m), payload));
        }
        if (!bundle.empty()) bundle.push_back(bundle.front());
        // Signatures attributed to servers that never produced them.
        for (const auto& s : w_.roster.servers()) {
            if (!rng_.chance(0.4)) continue;
            crypto::Signature fake;
            fake.signer = s;
            fake.bytes.resize(32);
            for (auto& byte : fake.bytes) byte = static_cast<std::uint8_t>(rng_.next());
            bundle.push_back(fake);
        }
        // Valid signatures over other blocks, relabelled.
        for (const auto& [other, by_signer] : co_.sigs) {
            if (other == d || !rng_.chance(0.3)) continue;
            for (const auto& [_, sig] : by_signer) bundle.push_back(sig);
        }
        // A well-formed signature from outside the roster.
        if (!w_.clients.empty()) bundle.push_back(w_.suite->sign(w_.clients.front(), payload));
        for (std::size_t i = bundle.size(); i > 1; --i) std::swap(bundle[i - 1], bundle[rng_.below(i)]);

        ConsensusMsg m = seal(*w_.suite, key_, BlockAdd{h, b->header.block_id, d, std::move(bundle)});
        std::vector<InFlight> out;
        for (const auto& t : others())
            if (rng_.chance(0.6)) out.push_back({key_.owner.id, t, m});
        return out;
    }

    const ExplorerWorld& w_;
    const crypto::KeyPair& key_;
    Coalition& co_;
    Rng rng_;
    ServerConsensus core_;
};

}  // namespace

ScheduleExplorer::ScheduleExplorer(ExplorerConfig config) : config_(config) {
    if (config_.faulty >= config_.n) throw std::invalid_argument("faulty count must be below roster size");
    world_ = build_explorer_world(config_.scheme, config_.key_seed, numbered_roster(config_.n),
                                  client_addresses(config_.clients));
}

ScheduleExplorer::~ScheduleExplorer() = default;

ScheduleOutcome ScheduleExplorer::run(std::uint64_t seed, RecordedSchedule* record) {
    const ExplorerWorld& w = *world_;
    Rng rng(seed);
    ScheduleOutcome out;
    out.seed = seed;

    std::vector<std::string> ids;
    for (const auto& s : w.roster.servers()) ids.push_back(s.id);
    std::vector<std::string> shuffled = ids;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    std::set<std::string> faulty(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(config_.faulty));
    out.faulty.assign(faulty.begin(), faulty.end());

    Coalition co{w, config_.adversary, out.faulty, {}, {}, {}};
    std::map<std::string, std::unique_ptr<ServerConsensus>> honest;
    std::map<std::string, std::unique_ptr<Adversary>> adversaries;
    for (const auto& id : ids) {
        if (faulty.count(id))
            adversaries.emplace(id, std::make_unique<Adversary>(w, w.server_keys.at(id), co, rng.fork(ids.size())));
        else
            honest.emplace(id, std::make_unique<ServerConsensus>(*w.suite, w.server_keys.at(id), w.roster,
                                                                  w.genesis.header));
    }

    if (record) {
        *record = RecordedSchedule{};
        record->scheme = config_.scheme;
        record->key_seed = config_.key_seed;
        record->roster = w.roster;
        record->faulty = out.faulty;
        for (const auto& c : w.clients) record->clients.push_back(c.owner);
    }

    std::vector<InFlight> inflight;
    std::map<std::string, std::uint64_t> candidate_no;
    std::size_t step_no = 0;

    auto enqueue_step = [&](const std::string& from, Step&& step) {
        for (auto& c : step.committed) {
            out.accepts.push_back({from, c->header.height, c->header.digest()});
            if (!chain::validate_self_consistent(*c, *w.suite)) out.valid_blocks = false;
        }
        for (auto& ob : step.out) {
            if (ob.to) {
                inflight.push_back({from, ob.to->id, std::move(ob.msg)});
                continue;
            }
            for (const auto& id : ids)
                if (id != from) inflight.push_back({from, id, ob.msg});
        }
    };

    auto local_actions = [&] {
        for (const auto& id : ids) {
            if (auto h = honest.find(id); h != honest.end()) {
                ServerConsensus& e = *h->second;
                if (!e.is_my_turn() || e.state().height > config_.target_height) continue;
                if (rng.chance(config_.skip_probability)) {
                    if (record) record->entries.push_back({EntryKind::Skip, step_no, id, id, {}});
                    enqueue_step(id, e.skip_turn());
                } else {
                    chain::Block cand = make_candidate(w, id, candidate_no[id]++, rng, false);
                    if (record) record->entries.push_back({EntryKind::Propose, step_no, id, id, cand.serialize()});
                    enqueue_step(id, e.propose(cand, static_cast<std::int64_t>(step_no)));
                }
            } else {
                Adversary& a = *adversaries.at(id);
                if (!a.core().is_my_turn() || a.core().state().height > config_.target_height) continue;
                auto k = candidate_no[id]++;
                chain::Block x = make_candidate(w, id, k, rng, false);
                chain::Block y = make_candidate(w, id, k + 1000000, rng, false);
                chain::Block bad = make_candidate(w, id, k + 2000000, rng, true);
                y.header.block_id = x.header.block_id;
                for (auto& f : a.on_turn(static_cast<std::int64_t>(step_no), x, y, bad))
                    inflight.push_back(std::move(f));
            }
        }
    };

    while (step_no < config_.max_steps) {
        local_actions();
        if (inflight.empty()) break;
        std::size_t i = rng.below(inflight.size());
        InFlight m = std::move(inflight[i]);
        inflight[i] = std::move(inflight.back());
        inflight.pop_back();
        ++step_no;
        if (rng.chance(config_.network_drop)) {
            ++out.dropped;
            continue;
        }
        if (rng.chance(config_.network_duplicate)) inflight.push_back(m);
        ++out.delivered;
        if (record) record->entries.push_back({EntryKind::Deliver, step_no, m.from, m.to, m.msg.serialize()});
        if (auto h = honest.find(m.to); h != honest.end()) {
            enqueue_step(m.to, h->second->handle(m.msg));
        } else {
            for (auto& f : adversaries.at(m.to)->handle(m.msg)) inflight.push_back(std::move(f));
        }
    }

    out.steps = step_no;
    out.safe = accepts_are_safe(out.accepts);
    if (!out.safe) out.violation = "two distinct blocks accepted at one height";
    if (!out.valid_blocks) out.violation = "accepted block failed validation";
    bool first = true;
    for (const auto& [id, e] : honest) {
        auto tip = e->state().tip_height;
        out.min_honest_height = first ? tip : std::min(out.min_honest_height, tip);
        out.max_honest_height = std::max(out.max_honest_height, tip);
        first = false;
    }
    if (record) {
        record->outcome = out.accepts;
        record->violation = !out.safe || !out.valid_blocks;
    }
    return out;
}

SafetySummary explore(const ExplorerConfig& config, std::uint64_t first_seed, std::size_t count,
                      const std::optional<std::filesystem::path>& failure_dir) {
    ScheduleExplorer ex(config);
    SafetySummary s;
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t seed = first_seed + i;
        ScheduleOutcome o = ex.run(seed);
        ++s.schedules;
        if (o.max_honest_height > 0) ++s.schedules_with_progress;
        if (!o.valid_blocks) ++s.invalid_accepts;
        if (o.safe && o.valid_blocks) continue;
        ++s.violations;
        s.failing_seeds.push_back(seed);
        if (failure_dir) {
            RecordedSchedule rec;
            ex.run(seed, &rec);
            std::filesystem::create_directories(*failure_dir);
            auto path = *failure_dir / ("schedule-n" + std::to_string(config.n) + "-seed" + std::to_string(seed) + ".bin");
            rec.save(path);
            s.saved_schedules.push_back(path);
        }
    }
    return s;
}

}  // namespace fogledger::consensus
