#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nocbuf/errors.hpp"

namespace nocbuf {

inline constexpr std::size_t kDefaultPorts = 4;

struct Packet {
    std::uint64_t id = 0;
    std::size_t input_port = 0;
    std::size_t output_port = 0;
    double created_at = 0.0;
    double enqueued_at = 0.0;
    std::optional<double> departed_at;
    // Extra clock cycles charged for a crowded input array (cycle-coupled runs).
    unsigned contention_penalty_cc = 0;
};

/// Square 0/1 matrix; entry (i, j) means input i has traffic for output j.
class RequestMatrix {
public:
    explicit RequestMatrix(std::size_t ports = kDefaultPorts) : n_(ports), bits_(ports * ports, 0) {}

    /// Rows must all have the same length as the number of rows.
    explicit RequestMatrix(const std::vector<std::vector<int>>& rows) : RequestMatrix(rows.size()) {
        for (std::size_t i = 0; i < n_; ++i) {
            if (rows[i].size() != n_)
                throw ValidationError("request matrix must be square (row " + std::to_string(i) + ")");
            for (std::size_t j = 0; j < n_; ++j) set(i, j, rows[i][j] != 0);
        }
    }

    std::size_t ports() const noexcept { return n_; }
    bool operator()(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
    void set(std::size_t i, std::size_t j, bool v = true) { bits_[i * n_ + j] = v ? 1 : 0; }

    bool empty() const {
        for (auto b : bits_)
            if (b) return false;
        return true;
    }

    bool operator==(const RequestMatrix&) const = default;

private:
    std::size_t n_;
    std::vector<unsigned char> bits_;
};

/// Input/output pairs connected through the crossbar in one epoch.
class Matching {
public:
    using Pair = std::pair<std::size_t, std::size_t>;

    explicit Matching(std::size_t ports = kDefaultPorts)
        : in_to_out_(ports, kUnmatched), out_to_in_(ports, kUnmatched) {}

    static constexpr std::size_t kUnmatched = static_cast<std::size_t>(-1);

    std::size_t ports() const noexcept { return in_to_out_.size(); }

    void add(std::size_t input, std::size_t output) {
        if (input >= ports() || output >= ports()) throw ValidationError("matching port out of range");
        if (in_to_out_[input] != kUnmatched || out_to_in_[output] != kUnmatched)
            throw ModelError("matching would reuse a port");
        in_to_out_[input] = output;
        out_to_in_[output] = input;
        pairs_.emplace_back(input, output);
    }

    bool input_matched(std::size_t i) const { return in_to_out_[i] != kUnmatched; }
    bool output_matched(std::size_t j) const { return out_to_in_[j] != kUnmatched; }
    std::size_t output_of(std::size_t i) const { return in_to_out_[i]; }
    std::size_t input_of(std::size_t j) const { return out_to_in_[j]; }

    /// Pairs in the order they were added.
    const std::vector<Pair>& pairs() const noexcept { return pairs_; }
    std::size_t size() const noexcept { return pairs_.size(); }
    bool empty() const noexcept { return pairs_.empty(); }

private:
    std::vector<std::size_t> in_to_out_;
    std::vector<std::size_t> out_to_in_;
    std::vector<Pair> pairs_;
};

} // namespace nocbuf
