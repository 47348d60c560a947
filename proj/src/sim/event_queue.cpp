#include "fogledger/sim/event_queue.hpp"

#include <stdexcept>

namespace fogledger::sim {

void EventQueue::schedule(SimTime at, Action action) {
    if (at < now_) throw std::logic_error("event scheduled in the past");
    heap_.push(Event{at, seq_++, std::move(action)});
}

bool EventQueue::step() {
    // Moving out of the top element requires a const_cast; the element is
    // popped immediately afterwards.
    Event ev = std::move(const_cast<Event&>(heap_.top()));
    heap_.pop();
    now_ = ev.at;
    ++processed_;
    ev.action();
    return true;
}

void EventQueue::run_until(SimTime end) {
    while (!heap_.empty() && heap_.top().at <= end) step();
    if (end > now_) now_ = end;
}

bool EventQueue::run_while_not(const std::function<bool()>& pred, SimTime limit) {
    while (!pred()) {
        if (heap_.empty() || heap_.top().at > limit) return false;
        step();
    }
    return true;
}

}  // namespace fogledger::sim
