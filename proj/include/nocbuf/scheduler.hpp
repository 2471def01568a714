#pragma once

// iSLIP: iterative request/grant/accept matching with round-robin pointers
// (McKeown, IEEE/ACM ToN 1999).

#include <cstddef>
#include <vector>

#include "nocbuf/errors.hpp"
#include "nocbuf/router.hpp"
#include "nocbuf/types.hpp"

namespace nocbuf {

inline constexpr unsigned kDefaultIslipIterations = 2;

struct IslipState {
    std::vector<std::size_t> grant_pointer;   // per output: input with highest priority
    std::vector<std::size_t> accept_pointer;  // per input: output with highest priority

    explicit IslipState(std::size_t ports = kDefaultPorts)
        : grant_pointer(ports, 0), accept_pointer(ports, 0) {}

    std::size_t ports() const noexcept { return grant_pointer.size(); }

    bool operator==(const IslipState&) const = default;
};

struct IslipResult {
    Matching matching;
    IslipState state;
};

/// Runs `iterations` rounds of iSLIP over `requests`.
///
/// Pointers move only for grants accepted in the first round, one past the
/// partner; matched ports drop out of later rounds so the matching only grows.
inline IslipResult islip(const RequestMatrix& requests, IslipState state, unsigned iterations) {
    const std::size_t n = state.ports();
    if (requests.ports() != n || state.accept_pointer.size() != n)
        throw ValidationError("request matrix does not match scheduler port count");
    if (iterations < 1) throw ValidationError("iSLIP needs at least one iteration");
    for (std::size_t k = 0; k < n; ++k)
        if (state.grant_pointer[k] >= n || state.accept_pointer[k] >= n)
            throw ValidationError("iSLIP pointer out of range");

    Matching matching(n);
    constexpr std::size_t none = Matching::kUnmatched;

    for (unsigned iter = 0; iter < iterations; ++iter) {
        // Grant: each free output picks the first free requester at or after its pointer.
        std::vector<std::size_t> grant(n, none);
        for (std::size_t out = 0; out < n; ++out) {
            if (matching.output_matched(out)) continue;
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t in = (state.grant_pointer[out] + k) % n;
                if (!matching.input_matched(in) && requests(in, out)) {
                    grant[out] = in;
                    break;
                }
            }
        }

        // Accept: each free input picks the first granting output at or after its pointer.
        bool grew = false;
        for (std::size_t in = 0; in < n; ++in) {
            if (matching.input_matched(in)) continue;
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t out = (state.accept_pointer[in] + k) % n;
                if (grant[out] != in) continue;
                matching.add(in, out);
                grew = true;
                if (iter == 0) {
                    state.grant_pointer[out] = (in + 1) % n;
                    state.accept_pointer[in] = (out + 1) % n;
                }
                break;
            }
        }
        if (!grew) break;
    }
    return {std::move(matching), std::move(state)};
}

/// One scheduling epoch: requests come from VOQ occupancy, pointers advance in place.
inline Matching schedule_epoch(const BufferState& buffer, IslipState& state, unsigned iterations) {
    auto result = islip(buffer.request_matrix(), std::move(state), iterations);
    state = std::move(result.state);
    return std::move(result.matching);
}

} // namespace nocbuf
