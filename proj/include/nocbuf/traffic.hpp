#pragma once

// Seedable packet sources with exponential interarrival gaps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "nocbuf/errors.hpp"
#include "nocbuf/types.hpp"

namespace nocbuf {

/// SplitMix64 finalizer; used to derive independent sub-stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of sub-stream `index` under `seed`. Distinct indices give unrelated streams.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// A reproducible stream of uniform variates on (0, 1].
///
/// The mt19937_64 output sequence is fixed by the standard and the mapping to
/// doubles below is done by hand, so a seed yields the same variates on every
/// conforming platform.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform on (0, 1]: 1 - k/2^53 for a 53-bit integer k.
    double uniform() {
        ++draws_;
        const std::uint64_t k = engine_() >> 11;
        return 1.0 - static_cast<double>(k) * 0x1.0p-53;
    }

    std::uint64_t draws() const noexcept { return draws_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

/// Inverse transform of a uniform variate u in (0, 1] to Exp(rate).
inline double exponential_from_uniform(double u, double rate) {
    if (!(rate > 0.0)) throw ValidationError("exponential rate must be positive");
    return -std::log(u) / rate;
}

inline double sample_exponential(RandomStream& stream, double rate) {
    if (!(rate > 0.0)) throw ValidationError("exponential rate must be positive");
    return exponential_from_uniform(stream.uniform(), rate);
}

inline void validate_weights(std::span<const double> weights) {
    if (weights.empty()) throw ValidationError("destination weights are empty");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ValidationError("destination weights must be non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("destination weights must sum to 1");
}

/// Smallest j with u <= w_0 + ... + w_j; zero-weight ports are never chosen.
inline std::size_t destination_from_uniform(double u, std::span<const double> weights) {
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (weights[j] <= 0.0) continue;
        cumulative += weights[j];
        last_positive = j;
        if (u <= cumulative) return j;
    }
    return last_positive;  // u lost to rounding in the cumulative sum
}

inline std::size_t sample_destination(RandomStream& stream, std::span<const double> weights) {
    validate_weights(weights);
    return destination_from_uniform(stream.uniform(), weights);
}

inline std::vector<double> uniform_weights(std::size_t ports) {
    return std::vector<double>(ports, 1.0 / static_cast<double>(ports));
}

struct TrafficSpec {
    double per_source_rate = 10e6;  // packets/s per input port
    std::size_t num_sources = 4;
    std::vector<double> destination_weights = uniform_weights(4);
    std::uint64_t seed = 1;

    void validate() const {
        if (!(per_source_rate > 0.0) || !std::isfinite(per_source_rate))
            throw ValidationError("per_source_rate must be positive");
        if (num_sources < 1) throw ValidationError("num_sources must be at least 1");
        validate_weights(destination_weights);
    }
};

/// How input ports are fed.
enum class SourceWiring {
    Independent,  // one Poisson(lambda) source per input port
    Demuxed,      // one Poisson(ports * lambda) source, input port drawn uniformly
};

struct Arrival {
    double time = 0.0;
    Packet packet;
};

/// Merges the per-port sources into one time-ordered arrival stream.
///
/// Each source owns a RandomStream derived from (seed, source index); a source
/// draws its gap first and then its destination. Ids are handed out in merged
/// time order, so they increase strictly along the arrival sequence.
class TrafficGenerator {
public:
    explicit TrafficGenerator(TrafficSpec spec, SourceWiring wiring = SourceWiring::Independent)
        : spec_(std::move(spec)), wiring_(wiring) {
        spec_.validate();
        const std::size_t n = wiring_ == SourceWiring::Independent ? spec_.num_sources : 1;
        sources_.reserve(n);
        for (std::size_t s = 0; s < n; ++s) {
            Source src{RandomStream(derive_seed(spec_.seed, s)), s, 0.0, 0, 0};
            if (wiring_ == SourceWiring::Demuxed) src.rate_scale = spec_.num_sources;
            sources_.push_back(src);
            draw_next(sources_.back(), 0.0);
        }
    }

    const TrafficSpec& spec() const noexcept { return spec_; }

    /// Time of the next arrival without consuming it.
    double peek_time() const { return sources_[earliest()].pending_time; }

    Arrival next_arrival() {
        Source& src = sources_[earliest()];
        Arrival a;
        a.time = src.pending_time;
        a.packet.id = next_id_++;
        a.packet.input_port = src.pending_input;
        a.packet.output_port = src.pending_output;
        a.packet.created_at = a.time;
        draw_next(src, a.time);
        return a;
    }

    std::uint64_t emitted() const noexcept { return next_id_; }

private:
    struct Source {
        RandomStream stream;
        std::size_t port;
        double pending_time;
        std::size_t pending_input;
        std::size_t pending_output;
        std::size_t rate_scale = 1;
    };

    std::size_t earliest() const {
        std::size_t best = 0;
        for (std::size_t s = 1; s < sources_.size(); ++s)
            if (sources_[s].pending_time < sources_[best].pending_time) best = s;
        return best;
    }

    void draw_next(Source& src, double now) {
        const double rate = spec_.per_source_rate * static_cast<double>(src.rate_scale);
        src.pending_time = now + sample_exponential(src.stream, rate);
        if (wiring_ == SourceWiring::Demuxed) {
            const double u = src.stream.uniform();
            src.pending_input = std::min<std::size_t>(
                static_cast<std::size_t>((1.0 - u) * static_cast<double>(spec_.num_sources)),
                spec_.num_sources - 1);
        } else {
            src.pending_input = src.port;
        }
        src.pending_output = destination_from_uniform(src.stream.uniform(), spec_.destination_weights);
    }

    TrafficSpec spec_;
    SourceWiring wiring_;
    std::vector<Source> sources_;
    std::uint64_t next_id_ = 0;
};

} // namespace nocbuf
