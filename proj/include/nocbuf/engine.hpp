#pragma once

// Sequential discrete-event core: a calendar ordered by
// (time, event class, insertion sequence) and a monotone clock.

#include <bit>
#include <concepts>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include "nocbuf/errors.hpp"

namespace nocbuf {

/// Ordering among events at the same instant. Departures free slots before
/// the scheduler looks at the buffers, and both happen before new arrivals.
enum class EventClass : std::uint8_t { Departure = 0, ScheduleEpoch = 1, Arrival = 2 };

template <typename T>
concept SimTime = std::same_as<T, double> || std::same_as<T, std::int64_t>;

template <SimTime Time, typename Payload>
struct Event {
    Time time{};
    EventClass cls = EventClass::Arrival;
    std::uint64_t sequence = 0;
    Payload payload{};
};

template <SimTime Time, typename Payload>
class EventEngine {
public:
    using event_type = Event<Time, Payload>;

    Time now() const noexcept { return now_; }
    bool empty() const noexcept { return calendar_.empty(); }
    std::size_t pending() const noexcept { return calendar_.size(); }
    std::uint64_t processed() const noexcept { return processed_; }

    /// FNV-1a over (time, class, sequence) of every processed event.
    std::uint64_t trace_hash() const noexcept { return trace_hash_; }

    const event_type& top() const { return calendar_.top(); }

    void schedule(Time time, EventClass cls, Payload payload) {
        if (time < now_) throw ModelError("event scheduled in the past");
        calendar_.push(event_type{time, cls, next_sequence_++, std::move(payload)});
    }

    /// Removes the earliest event and advances the clock to it; nullopt when
    /// the calendar is exhausted (clock unchanged).
    std::optional<event_type> pop() {
        if (calendar_.empty()) return std::nullopt;
        event_type ev = calendar_.top();
        calendar_.pop();
        if (ev.time < now_) throw ModelError("clock would move backwards");
        now_ = ev.time;
        ++processed_;
        mix_trace(ev);
        return ev;
    }

    /// Pops one event and hands it to `handler`; false at end of simulation.
    template <typename Handler>
    bool step(Handler&& handler) {
        auto ev = pop();
        if (!ev) return false;
        handler(*ev);
        return true;
    }

    /// Steps until the calendar drains or `stop()` returns true (checked before each step).
    template <typename Handler, typename Stop>
    void run(Handler&& handler, Stop&& stop) {
        while (!stop() && step(handler)) {
        }
    }

private:
    struct Later {
        bool operator()(const event_type& a, const event_type& b) const noexcept {
            if (a.time != b.time) return a.time > b.time;
            if (a.cls != b.cls) return a.cls > b.cls;
            return a.sequence > b.sequence;
        }
    };

    void mix_trace(const event_type& ev) noexcept {
        auto mix = [this](std::uint64_t v) {
            for (int b = 0; b < 8; ++b) {
                trace_hash_ ^= (v >> (8 * b)) & 0xffu;
                trace_hash_ *= 0x100000001b3ULL;
            }
        };
        if constexpr (std::is_same_v<Time, double>)
            mix(std::bit_cast<std::uint64_t>(ev.time));
        else
            mix(static_cast<std::uint64_t>(ev.time));
        mix(static_cast<std::uint64_t>(ev.cls));
        mix(ev.sequence);
    }

    std::priority_queue<event_type, std::vector<event_type>, Later> calendar_;
    Time now_{};
    std::uint64_t next_sequence_ = 0;
    std::uint64_t processed_ = 0;
    std::uint64_t trace_hash_ = 0xcbf29ce484222325ULL;
};

} // namespace nocbuf
