#pragma once

// Input buffering of the router: one FIFO per (input, output) pair, with slots
// drawn either from a single pool shared by every input or from one private
// pool per input.

#include <cstddef>
#include <deque>
#include <string>
#include <vector>

#include "nocbuf/errors.hpp"
#include "nocbuf/types.hpp"

namespace nocbuf {

enum class Architecture { Common, Distributed };

inline const char* to_string(Architecture a) {
    return a == Architecture::Common ? "common" : "distributed";
}

struct BufferArchitecture {
    Architecture kind = Architecture::Common;
    // Common: size of the shared pool. Distributed: size of each input's pool.
    std::size_t capacity = 128;

    static BufferArchitecture common(std::size_t pool_capacity = 128) {
        return {Architecture::Common, pool_capacity};
    }
    static BufferArchitecture distributed(std::size_t per_input_capacity = 32) {
        return {Architecture::Distributed, per_input_capacity};
    }
};

enum class EnqueueResult { Admitted, Blocked };

class BufferState {
public:
    explicit BufferState(BufferArchitecture arch, std::size_t ports = kDefaultPorts)
        : arch_(arch), ports_(ports), voq_(ports * ports) {
        if (ports < 1) throw ValidationError("router needs at least one port");
        if (arch.capacity < 1) throw ValidationError("buffer capacity must be at least 1");
        occupancy_.assign(pool_count(), 0);
    }

    const BufferArchitecture& architecture() const noexcept { return arch_; }
    std::size_t ports() const noexcept { return ports_; }

    std::size_t pool_count() const noexcept {
        return arch_.kind == Architecture::Common ? 1 : ports_;
    }
    std::size_t pool_of(std::size_t input) const noexcept {
        return arch_.kind == Architecture::Common ? 0 : input;
    }
    std::size_t pool_capacity() const noexcept { return arch_.capacity; }
    std::size_t pool_occupancy(std::size_t pool) const { return occupancy_.at(pool); }

    std::size_t total_occupancy() const noexcept {
        std::size_t total = 0;
        for (auto o : occupancy_) total += o;
        return total;
    }
    std::size_t total_capacity() const noexcept { return pool_count() * arch_.capacity; }

    std::size_t voq_length(std::size_t input, std::size_t output) const {
        return voq(input, output).size();
    }
    const std::deque<Packet>& voq(std::size_t input, std::size_t output) const {
        check_ports(input, output);
        return voq_[input * ports_ + output];
    }

    /// Admits the packet into voq[input][output] if its pool has a free slot.
    /// Blocked packets leave the state untouched.
    EnqueueResult try_enqueue(Packet& packet, double now) {
        check_ports(packet.input_port, packet.output_port);
        const std::size_t pool = pool_of(packet.input_port);
        if (occupancy_[pool] >= arch_.capacity) return EnqueueResult::Blocked;
        if (now < packet.created_at) throw ModelError("packet enqueued before it was created");
        packet.enqueued_at = now;
        voq_[packet.input_port * ports_ + packet.output_port].push_back(packet);
        ++occupancy_[pool];
        return EnqueueResult::Admitted;
    }

    RequestMatrix request_matrix() const {
        RequestMatrix r(ports_);
        for (std::size_t i = 0; i < ports_; ++i)
            for (std::size_t j = 0; j < ports_; ++j)
                if (!voq_[i * ports_ + j].empty()) r.set(i, j);
        return r;
    }

    /// Pops the head of every matched VOQ and stamps it departed at `now`.
    std::vector<Packet> retire(const Matching& matching, double now) {
        if (matching.ports() != ports_) throw ValidationError("matching size does not match router");
        for (const auto& [i, j] : matching.pairs())
            if (voq_[i * ports_ + j].empty())
                throw ModelError("matched pair (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") has an empty VOQ");
        std::vector<Packet> departed;
        departed.reserve(matching.size());
        for (const auto& [i, j] : matching.pairs()) departed.push_back(pop(i, j, now));
        return departed;
    }

    /// Oldest packet of a pool, i.e. FIFO service across all VOQs sharing it.
    Packet pop_oldest(std::size_t pool, double now) {
        if (pool >= pool_count()) throw ValidationError("pool index out of range");
        std::size_t best = ports_ * ports_;
        for (std::size_t i = 0; i < ports_; ++i) {
            if (pool_of(i) != pool) continue;
            for (std::size_t j = 0; j < ports_; ++j) {
                const auto& q = voq_[i * ports_ + j];
                if (q.empty()) continue;
                if (best == ports_ * ports_ || q.front().id < voq_[best].front().id) best = i * ports_ + j;
            }
        }
        if (best == ports_ * ports_) throw ModelError("service requested from an empty pool");
        return pop(best / ports_, best % ports_, now);
    }

    /// Recomputes the pool counters from the queues; true when they agree and
    /// no pool is over capacity.
    bool consistent() const {
        std::vector<std::size_t> counted(pool_count(), 0);
        for (std::size_t i = 0; i < ports_; ++i)
            for (std::size_t j = 0; j < ports_; ++j) counted[pool_of(i)] += voq_[i * ports_ + j].size();
        for (std::size_t p = 0; p < pool_count(); ++p)
            if (counted[p] != occupancy_[p] || occupancy_[p] > arch_.capacity) return false;
        return true;
    }

private:
    void check_ports(std::size_t input, std::size_t output) const {
        if (input >= ports_ || output >= ports_)
            throw ValidationError("port out of range: (" + std::to_string(input) + "," +
                                  std::to_string(output) + ")");
    }

    Packet pop(std::size_t i, std::size_t j, double now) {
        auto& q = voq_[i * ports_ + j];
        Packet p = q.front();
        q.pop_front();
        --occupancy_[pool_of(i)];
        if (now < p.enqueued_at) throw ModelError("packet departs before it was enqueued");
        p.departed_at = now;
        return p;
    }

    BufferArchitecture arch_;
    std::size_t ports_;
    std::vector<std::deque<Packet>> voq_;
    std::vector<std::size_t> occupancy_;
};

} // namespace nocbuf
