#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

namespace fogledger::sim {

// Simulated time in microseconds.
using SimTime = std::int64_t;

constexpr SimTime from_ms(double ms) { return static_cast<SimTime>(ms * 1000.0 + (ms >= 0 ? 0.5 : -0.5)); }
constexpr double to_ms(SimTime t) { return static_cast<double>(t) / 1000.0; }
// Millisecond timestamp handed to node state machines.
constexpr std::int64_t node_ms(SimTime t) { return t / 1000; }

/// Events run in time order; events at the same instant run in the order
/// they were scheduled.
class EventQueue {
public:
    using Action = std::function<void()>;

    SimTime now() const { return now_; }
    // Throws std::logic_error when asked to schedule in the past.
    void schedule(SimTime at, Action action);
    void after(SimTime delay, Action action) { schedule(now_ + delay, std::move(action)); }

    // Runs events with time <= end, then sets the clock to end.
    void run_until(SimTime end);
    // Runs until pred() holds or the next event lies past limit. Returns pred().
    bool run_while_not(const std::function<bool()>& pred, SimTime limit);

    bool empty() const { return heap_.empty(); }
    std::uint64_t processed() const { return processed_; }

private:
    struct Event {
        SimTime at;
        std::uint64_t seq;
        Action action;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.at != b.at ? a.at > b.at : a.seq > b.seq;
        }
    };
    bool step();

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    SimTime now_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t processed_ = 0;
};

}  // namespace fogledger::sim
