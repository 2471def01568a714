#pragma once

// The router model driven by the event engine.
//
// Queueing mode: each pool is an exponential server (rate mu per private pool,
// ports * mu for the shared pool) serving its packets in arrival order.
// VOQ mode: every 1/mu seconds an iSLIP epoch matches inputs to outputs and
// the crossbar retires one packet per matched pair.

#include <cstddef>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nocbuf/cyclemodel.hpp"
#include "nocbuf/engine.hpp"
#include "nocbuf/errors.hpp"
#include "nocbuf/metrics.hpp"
#include "nocbuf/router.hpp"
#include "nocbuf/scheduler.hpp"
#include "nocbuf/traffic.hpp"
#include "nocbuf/types.hpp"

namespace nocbuf {

enum class Mode { Queueing, Voq };

inline const char* to_string(Mode m) { return m == Mode::Queueing ? "queueing" : "voq"; }

struct StopCondition {
    enum class Kind { Generated, Served, Horizon };
    Kind kind = Kind::Generated;
    std::uint64_t count = 50000;
    double horizon = 0.0;

    /// Stop generating after `n` packets, then drain the buffers.
    static StopCondition generated(std::uint64_t n) { return {Kind::Generated, n, 0.0}; }
    /// Stop as soon as `n` packets have been served.
    static StopCondition served(std::uint64_t n) { return {Kind::Served, n, 0.0}; }
    /// Process events up to and including time `t`; nothing is drained.
    static StopCondition until(double t) { return {Kind::Horizon, 0, t}; }
};

struct SimConfig {
    BufferArchitecture arch = BufferArchitecture::common();
    Mode mode = Mode::Queueing;
    std::size_t ports = kDefaultPorts;
    double lambda = 10e6;    // arrivals per second per input port
    double mu = 10.05e6;     // service per second per private pool / per output epoch rate
    std::vector<double> destination_weights;  // empty: uniform
    SourceWiring wiring = SourceWiring::Independent;
    std::uint64_t seed = 1;
    StopCondition stop = StopCondition::generated(50000);
    std::uint64_t warmup = 5000;  // served packets excluded from `latency`
    unsigned islip_iterations = kDefaultIslipIterations;
    IslipState initial_pointers{0};  // zero ports: all-zero pointers
    bool cycle_coupled = false;
    cycle::CycleBudget budget;
    cycle::ContentionModel contention;

    void validate() const {
        if (ports < 1) throw ValidationError("ports must be at least 1");
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be positive");
        if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("mu must be positive");
        if (arch.capacity < 1) throw ValidationError("capacity must be at least 1");
        if (!destination_weights.empty()) {
            if (destination_weights.size() != ports)
                throw ValidationError("destination weights must have one entry per port");
            validate_weights(destination_weights);
        }
        if (islip_iterations < 1) throw ValidationError("islip iterations must be at least 1");
        if (initial_pointers.ports() != 0 && initial_pointers.ports() != ports)
            throw ValidationError("initial iSLIP pointers do not match port count");
        if (stop.kind == StopCondition::Kind::Horizon && !(stop.horizon >= 0.0))
            throw ValidationError("time horizon must be non-negative");
        budget.validate();
        contention.validate();
    }
};

/// Exponential service rate of one pool in queueing mode: the shared pool
/// serves as fast as all private pools together.
inline double aggregate_service_rate(const BufferArchitecture& arch, double mu, std::size_t ports) {
    return arch.kind == Architecture::Common ? mu * static_cast<double>(ports) : mu;
}

/// Stream index offset for the per-pool service streams (sources use 0..ports-1).
inline constexpr std::uint64_t kServiceStreamBase = 1u << 20;

class RouterModel {
public:
    explicit RouterModel(SimConfig config)
        : config_(validated(std::move(config))),
          buffer_(config_.arch, config_.ports),
          traffic_(make_traffic_spec(config_), config_.wiring),
          islip_(config_.initial_pointers.ports() ? config_.initial_pointers : IslipState(config_.ports)),
          collector_(config_.warmup),
          server_busy_(buffer_.pool_count(), false) {
        service_rate_ = aggregate_service_rate(config_.arch, config_.mu, config_.ports);
        for (std::size_t p = 0; p < buffer_.pool_count(); ++p)
            service_streams_.emplace_back(derive_seed(config_.seed, kServiceStreamBase + p));
        epoch_period_ = 1.0 / config_.mu;
    }

    metrics::SimReport run() {
        collector_.record_occupancy(0.0, 0.0);
        if (may_generate(traffic_.peek_time()))
            engine_.schedule(traffic_.peek_time(), EventClass::Arrival, {});
        else
            arrivals_closed_at_ = 0.0;
        if (config_.mode == Mode::Voq) engine_.schedule(0.0, EventClass::ScheduleEpoch, {});

        auto handler = [this](const Engine::event_type& ev) {
            switch (ev.cls) {
                case EventClass::Arrival: on_arrival(); break;
                case EventClass::Departure: on_departure(ev.payload.pool); break;
                case EventClass::ScheduleEpoch: on_epoch(); break;
            }
            if (engine_.processed() % 1000 == 0) check_conservation();
        };
        auto stop = [this] {
            switch (config_.stop.kind) {
                case StopCondition::Kind::Served: return collector_.served() >= config_.stop.count;
                case StopCondition::Kind::Horizon:
                    return engine_.empty() || engine_.top().time > config_.stop.horizon;
                case StopCondition::Kind::Generated: break;
            }
            return false;
        };
        engine_.run(handler, stop);

        check_conservation();
        double window_end = arrivals_closed_at_.value_or(engine_.now());
        if (config_.stop.kind == StopCondition::Kind::Horizon) window_end = config_.stop.horizon;
        auto report = collector_.report(buffer_.total_occupancy(), window_end, engine_.now());
        report.arch = to_string(config_.arch.kind);
        report.mode = to_string(config_.mode);
        report.events = engine_.processed();
        report.trace_hash = engine_.trace_hash();
        return report;
    }

    const BufferState& buffer() const noexcept { return buffer_; }

private:
    struct Payload {
        std::size_t pool = 0;
    };
    using Engine = EventEngine<double, Payload>;

    static SimConfig validated(SimConfig c) {
        c.validate();
        return c;
    }

    static TrafficSpec make_traffic_spec(const SimConfig& c) {
        TrafficSpec t;
        t.per_source_rate = c.lambda;
        t.num_sources = c.ports;
        t.destination_weights = c.destination_weights.empty() ? uniform_weights(c.ports) : c.destination_weights;
        t.seed = c.seed;
        return t;
    }

    bool may_generate(double time) const {
        switch (config_.stop.kind) {
            case StopCondition::Kind::Generated: return traffic_.emitted() < config_.stop.count;
            case StopCondition::Kind::Horizon: return time <= config_.stop.horizon;
            case StopCondition::Kind::Served: return true;
        }
        return false;
    }

    bool arrivals_open() const { return !arrivals_closed_at_.has_value(); }

    void on_arrival() {
        const double now = engine_.now();
        Arrival arrival = traffic_.next_arrival();
        collector_.record_generated();
        Packet& packet = arrival.packet;
        const std::size_t pool = buffer_.pool_of(packet.input_port);
        if (config_.mode == Mode::Voq && config_.cycle_coupled && config_.arch.kind == Architecture::Distributed)
            packet.contention_penalty_cc =
                config_.contention.penalty_for(buffer_.pool_occupancy(pool) + 1, buffer_.pool_capacity());

        if (buffer_.try_enqueue(packet, now) == EnqueueResult::Blocked) {
            collector_.record_block(packet);
        } else {
            collector_.record_occupancy(now, static_cast<double>(buffer_.total_occupancy()));
            if (config_.mode == Mode::Queueing && !server_busy_[pool]) start_service(pool);
        }

        if (may_generate(traffic_.peek_time()))
            engine_.schedule(traffic_.peek_time(), EventClass::Arrival, {});
        else
            arrivals_closed_at_ = now;
    }

    void start_service(std::size_t pool) {
        server_busy_[pool] = true;
        const double gap = sample_exponential(service_streams_[pool], service_rate_);
        engine_.schedule(engine_.now() + gap, EventClass::Departure, Payload{pool});
    }

    void on_departure(std::size_t pool) {
        Packet p = buffer_.pop_oldest(pool, engine_.now());
        collector_.record_departure(p);
        collector_.record_occupancy(engine_.now(), static_cast<double>(buffer_.total_occupancy()));
        server_busy_[pool] = false;
        if (buffer_.pool_occupancy(pool) > 0) start_service(pool);
    }

    void on_epoch() {
        const double now = engine_.now();
        const Matching matching = schedule_epoch(buffer_, islip_, config_.islip_iterations);
        if (!matching.empty()) {
            for (Packet& p : buffer_.retire(matching, now)) {
                collector_.record_departure(p);
                if (config_.cycle_coupled)
                    collector_.record_cycle_latency(cycle::min_latency_ns(config_.budget, p.contention_penalty_cc));
            }
            collector_.record_occupancy(now, static_cast<double>(buffer_.total_occupancy()));
        }
        if (arrivals_open() || buffer_.total_occupancy() > 0) {
            ++epoch_;
            engine_.schedule(static_cast<double>(epoch_) * epoch_period_, EventClass::ScheduleEpoch, {});
        }
    }

    void check_conservation() const {
        if (collector_.generated() != collector_.served() + collector_.blocked() + buffer_.total_occupancy())
            throw ModelError("packet conservation violated");
        if (!buffer_.consistent()) throw ModelError("buffer occupancy bookkeeping is inconsistent");
    }

    SimConfig config_;
    BufferState buffer_;
    TrafficGenerator traffic_;
    IslipState islip_;
    metrics::Collector collector_;
    Engine engine_;
    std::vector<bool> server_busy_;
    std::vector<RandomStream> service_streams_;
    double service_rate_ = 0.0;
    double epoch_period_ = 0.0;
    std::uint64_t epoch_ = 0;
    std::optional<double> arrivals_closed_at_;
};

inline metrics::SimReport run_simulation(const SimConfig& config) { return RouterModel(config).run(); }

/// Seed of replication r under a base seed.
inline std::uint64_t replication_seed(std::uint64_t base, std::size_t r) { return derive_seed(base, r); }

/// Independent replications, run concurrently; results are ordered by replication index.
inline std::vector<metrics::SimReport> run_replications(const SimConfig& config, std::size_t replications) {
    if (replications < 1) throw ValidationError("replications must be at least 1");
    config.validate();
    std::vector<std::future<metrics::SimReport>> futures;
    futures.reserve(replications);
    for (std::size_t r = 0; r < replications; ++r) {
        SimConfig c = config;
        c.seed = replication_seed(config.seed, r);
        futures.push_back(std::async(std::launch::async, [c] { return run_simulation(c); }));
    }
    std::vector<metrics::SimReport> reports;
    reports.reserve(replications);
    for (auto& f : futures) reports.push_back(f.get());
    return reports;
}

} // namespace nocbuf
