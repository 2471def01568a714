#pragma once

// Clock-cycle latency accounting for a packet crossing the router.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "nocbuf/errors.hpp"

namespace nocbuf::cycle {

struct CycleBudget {
    unsigned store_cycles = 2;     // write into the packet array (two phases)
    unsigned schedule_cycles = 4;  // arbitration decision
    unsigned traverse_cycles = 4;  // crossbar to destination
    double clock_period_ns = 4.0;

    void validate() const {
        if (!(clock_period_ns > 0.0) || !std::isfinite(clock_period_ns))
            throw ValidationError("clock period must be positive");
    }

    unsigned base_cycles() const noexcept { return store_cycles + schedule_cycles + traverse_cycles; }
};

/// Source-to-destination latency (start of transmission to start of reception).
inline double min_latency_ns(const CycleBudget& budget, unsigned penalty_cc = 0) {
    budget.validate();
    return static_cast<double>(budget.base_cycles() + penalty_cc) * budget.clock_period_ns;
}

enum class ImprovementConvention {
    RelativeToDistributed,   // 100 (d - c) / d
    PenaltyOverDistributed,  // 100 (d - c) / reference, reference = 12 CC by default
};

inline const char* to_string(ImprovementConvention c) {
    return c == ImprovementConvention::RelativeToDistributed ? "relative-to-distributed"
                                                             : "penalty-over-distributed";
}

inline constexpr double kPenaltyReferenceCycles = 12.0;

inline double improvement_percent(double common_cc, double distributed_cc, ImprovementConvention convention,
                                  double reference_cc = kPenaltyReferenceCycles) {
    const double denominator =
        convention == ImprovementConvention::RelativeToDistributed ? distributed_cc : reference_cc;
    if (!(distributed_cc > 0.0) || denominator == 0.0)
        throw DomainError("improvement needs a positive distributed latency");
    return 100.0 * (distributed_cc - common_cc) / denominator;
}

/// Extra cycles paid when the destination packet array is crowded.
struct ContentionModel {
    // Discrete penalty distribution used for closed-form expectations.
    std::vector<std::pair<unsigned, double>> penalty_distribution{{0, 1.0}};

    // Simulation-coupled rule: penalty applied from the input pool occupancy
    // (including the arriving packet) at enqueue time.
    double crowding_threshold = 0.75;
    unsigned crowded_penalty_cc = 2;
    unsigned full_penalty_cc = 4;

    static ContentionModel none() { return {}; }
    static ContentionModel fixed(unsigned penalty_cc) {
        ContentionModel m;
        m.penalty_distribution = {{penalty_cc, 1.0}};
        return m;
    }

    void validate() const {
        if (penalty_distribution.empty()) throw ValidationError("penalty distribution is empty");
        double total = 0.0;
        for (const auto& [cc, p] : penalty_distribution) {
            if (!(p >= 0.0)) throw ValidationError("penalty probabilities must be non-negative");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) throw ValidationError("penalty probabilities must sum to 1");
        if (!(crowding_threshold >= 0.0 && crowding_threshold <= 1.0))
            throw ValidationError("crowding threshold must be a fraction in [0, 1]");
    }

    /// 0 below the threshold, crowded_penalty_cc above it, full_penalty_cc once
    /// the packet took one of the last two slots (occupancy >= capacity - 1).
    unsigned penalty_for(std::size_t occupancy, std::size_t capacity) const {
        if (capacity == 0) throw ValidationError("capacity must be positive");
        if (capacity >= 2 && occupancy + 1 >= capacity) return full_penalty_cc;
        const double fraction = static_cast<double>(occupancy) / static_cast<double>(capacity);
        return fraction > crowding_threshold ? crowded_penalty_cc : 0;
    }
};

inline double expected_cycle_latency(const CycleBudget& budget, const ContentionModel& contention) {
    contention.validate();
    double expected = 0.0;
    for (const auto& [cc, p] : contention.penalty_distribution) expected += p * min_latency_ns(budget, cc);
    return expected;
}

} // namespace nocbuf::cycle
