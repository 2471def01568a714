#pragma once

// Closed-form metrics of the M/M/1/N loss queue.
//
// All formulas are evaluated in terms of x = ln(rho) with expm1 so that the
// same code path stays finite and accurate for rho < 1, rho > 1 and large N.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "nocbuf/errors.hpp"

namespace nocbuf::analytics {

/// |rho - 1| below this evaluates the rho = 1 limits (uniform distribution, N/2).
inline constexpr double kUnitLoadThreshold = 1e-9;

struct QueueSpec {
    double arrival_rate = 0.0;  // packets/s
    double service_rate = 0.0;  // packets/s
    std::size_t capacity = 0;   // packets, including the one in service

    void validate() const {
        if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate))
            throw ValidationError("arrival_rate must be a positive finite number");
        if (!(service_rate > 0.0) || !std::isfinite(service_rate))
            throw ValidationError("service_rate must be a positive finite number");
        if (capacity < 1)
            throw ValidationError("capacity must be at least 1");
    }
};

struct QueueMetrics {
    double rho = 0.0;
    std::vector<double> state_distribution;  // P_0 .. P_N
    double blocking_probability = 0.0;       // P_N
    double expected_occupancy = 0.0;         // E(n), packets
    double naive_latency = 0.0;              // E(n) / lambda, seconds
    double effective_latency = 0.0;          // E(n) / (lambda (1 - P_N)), seconds
};

inline double traffic_intensity(const QueueSpec& spec) {
    spec.validate();
    return spec.arrival_rate / spec.service_rate;
}

namespace detail {

inline void check_load(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw DomainError("traffic intensity must be positive and finite");
}

inline bool near_unit_load(double rho) { return std::abs(rho - 1.0) < kUnitLoadThreshold; }

// 1/expm1(y) - 1/y, with the removable singularity at y = 0 handled by its
// Bernoulli series.
inline double reciprocal_expm1_remainder(double y) {
    if (std::abs(y) < 1e-3) {
        const double y2 = y * y;
        return -0.5 + y / 12.0 - y * y2 / 720.0 + y * y2 * y2 / 30240.0;
    }
    return 1.0 / std::expm1(y) - 1.0 / y;
}

} // namespace detail

/// Steady-state probability of n packets in an M/M/1/N queue at load rho.
inline double state_probability(double rho, std::ptrdiff_t n, std::size_t capacity) {
    detail::check_load(rho);
    if (capacity < 1) throw ValidationError("capacity must be at least 1");
    if (n < 0 || static_cast<std::size_t>(n) > capacity)
        throw DomainError("state index out of range [0, N]: " + std::to_string(n));

    const double N = static_cast<double>(capacity);
    if (detail::near_unit_load(rho)) return 1.0 / (N + 1.0);

    // (1 - rho) rho^n / (1 - rho^(N+1)), rearranged so no power can overflow.
    const double x = std::log(rho);
    const double k = static_cast<double>(n);
    if (x < 0.0) {
        return std::expm1(x) / std::expm1((N + 1.0) * x) * std::exp(k * x);
    }
    return std::expm1(x) * std::exp((k - N - 1.0) * x) / -std::expm1(-(N + 1.0) * x);
}

/// Full distribution P_0..P_N.
inline std::vector<double> state_distribution(double rho, std::size_t capacity) {
    std::vector<double> p(capacity + 1);
    for (std::size_t n = 0; n <= capacity; ++n)
        p[n] = state_probability(rho, static_cast<std::ptrdiff_t>(n), capacity);
    return p;
}

inline double blocking_probability(double rho, std::size_t capacity) {
    return state_probability(rho, static_cast<std::ptrdiff_t>(capacity), capacity);
}

/// Mean number in system, E(n) = rho[1 - (N+1)rho^N + N rho^(N+1)] / [(1-rho)(1-rho^(N+1))].
///
/// Evaluated as 1/expm1(-x) - (N+1)/expm1(-(N+1)x) with x = ln(rho), which is the
/// same rational function; the two 1/y poles cancel analytically.
inline double expected_occupancy(double rho, std::size_t capacity) {
    detail::check_load(rho);
    if (capacity < 1) throw ValidationError("capacity must be at least 1");

    const double N = static_cast<double>(capacity);
    if (detail::near_unit_load(rho)) return N / 2.0;

    const double y = -std::log(rho);
    return detail::reciprocal_expm1_remainder(y)
         - (N + 1.0) * detail::reciprocal_expm1_remainder((N + 1.0) * y);
}

/// Latency as E(n) over the offered rate.
inline double naive_latency(double expected_occupancy, double arrival_rate) {
    if (!(arrival_rate > 0.0)) throw ValidationError("arrival_rate must be positive");
    return expected_occupancy / arrival_rate;
}

/// Mean time in system of admitted packets (Little's law over lambda (1 - P_N)).
inline double effective_latency(const QueueSpec& spec) {
    const double rho = traffic_intensity(spec);
    const double blocked = blocking_probability(rho, spec.capacity);
    const double admitted = spec.arrival_rate * (1.0 - blocked);
    if (!(admitted > 0.0)) throw DomainError("queue admits nothing (P_N = 1)");
    return expected_occupancy(rho, spec.capacity) / admitted;
}

inline QueueMetrics evaluate(const QueueSpec& spec) {
    QueueMetrics m;
    m.rho = traffic_intensity(spec);
    m.state_distribution = state_distribution(m.rho, spec.capacity);
    m.blocking_probability = m.state_distribution.back();
    m.expected_occupancy = expected_occupancy(m.rho, spec.capacity);
    m.naive_latency = naive_latency(m.expected_occupancy, spec.arrival_rate);
    m.effective_latency = effective_latency(spec);
    return m;
}

struct ArchitectureComparison {
    std::size_t ports = 0;
    QueueSpec distributed_spec;
    QueueSpec common_spec;
    QueueMetrics distributed;
    QueueMetrics common;
    double naive_latency_ratio = 0.0;      // distributed / common
    double effective_latency_ratio = 0.0;  // distributed / common
    double blocking_ratio = 0.0;           // distributed / common
    double naive_improvement_percent = 0.0;  // 100 (d - c) / d
};

/// Pools `ports` identical queues into one with every rate and the capacity scaled.
inline ArchitectureComparison compare_architectures(const QueueSpec& base, std::size_t ports) {
    base.validate();
    if (ports < 1) throw ValidationError("ports must be at least 1");

    const double k = static_cast<double>(ports);
    ArchitectureComparison c;
    c.ports = ports;
    c.distributed_spec = base;
    c.common_spec = QueueSpec{k * base.arrival_rate, k * base.service_rate, ports * base.capacity};
    c.distributed = evaluate(c.distributed_spec);
    c.common = evaluate(c.common_spec);
    c.naive_latency_ratio = c.distributed.naive_latency / c.common.naive_latency;
    c.effective_latency_ratio = c.distributed.effective_latency / c.common.effective_latency;
    c.blocking_ratio = c.distributed.blocking_probability / c.common.blocking_probability;
    c.naive_improvement_percent =
        100.0 * (c.distributed.naive_latency - c.common.naive_latency) / c.distributed.naive_latency;
    return c;
}

} // namespace nocbuf::analytics
