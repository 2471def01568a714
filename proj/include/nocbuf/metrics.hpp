#pragma once

// Streaming statistics for simulation runs and confidence intervals across
// replications.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "nocbuf/errors.hpp"
#include "nocbuf/types.hpp"

namespace nocbuf::metrics {

/// Quantiles of non-negative values with relative error at most `alpha`:
/// values fall in geometric buckets [gamma^(k-1), gamma^k), gamma = (1+a)/(1-a),
/// and a bucket is reported by its midpoint estimate 2 gamma^k / (gamma + 1).
class QuantileSketch {
public:
    explicit QuantileSketch(double alpha = 0.005)
        : alpha_(alpha), gamma_((1.0 + alpha) / (1.0 - alpha)), log_gamma_(std::log(gamma_)) {}

    double relative_accuracy() const noexcept { return alpha_; }

    void add(double x) {
        ++count_;
        if (x <= 0.0) {
            ++zeros_;
            return;
        }
        ++buckets_[static_cast<int>(std::ceil(std::log(x) / log_gamma_))];
    }

    std::uint64_t count() const noexcept { return count_; }

    double quantile(double q) const {
        if (count_ == 0) return std::numeric_limits<double>::quiet_NaN();
        const auto rank = static_cast<std::uint64_t>(q * static_cast<double>(count_ - 1));
        if (rank < zeros_) return 0.0;
        std::uint64_t seen = zeros_;
        for (const auto& [k, c] : buckets_) {
            seen += c;
            if (seen > rank) return 2.0 * std::pow(gamma_, k) / (gamma_ + 1.0);
        }
        return 2.0 * std::pow(gamma_, buckets_.rbegin()->first) / (gamma_ + 1.0);
    }

private:
    double alpha_;
    double gamma_;
    double log_gamma_;
    std::uint64_t count_ = 0;
    std::uint64_t zeros_ = 0;
    std::map<int, std::uint64_t> buckets_;
};

/// Count, Welford mean/variance, extremes and percentiles.
///
/// Samples are kept verbatim (exact percentiles) up to `retain_limit`; past
/// that they are folded into a QuantileSketch and percentiles carry its 0.5%
/// relative error.
class SummaryStats {
public:
    static constexpr std::size_t kDefaultRetainLimit = 1'000'000;

    explicit SummaryStats(std::size_t retain_limit = kDefaultRetainLimit) : retain_limit_(retain_limit) {}

    void add(double x) {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
        min_ = std::min(min_, x);
        max_ = std::max(max_, x);
        if (sketch_) {
            sketch_->add(x);
        } else if (samples_.size() < retain_limit_) {
            samples_.push_back(x);
            sorted_ = false;
        } else {
            sketch_.emplace();
            for (double s : samples_) sketch_->add(s);
            sketch_->add(x);
            samples_.clear();
            samples_.shrink_to_fit();
        }
    }

    std::uint64_t count() const noexcept { return count_; }
    double mean() const noexcept { return count_ ? mean_ : std::numeric_limits<double>::quiet_NaN(); }
    /// Unbiased sample variance; 0 for fewer than two samples.
    double variance() const noexcept {
        return count_ > 1 ? std::max(0.0, m2_ / static_cast<double>(count_ - 1)) : 0.0;
    }
    double stddev() const noexcept { return std::sqrt(variance()); }
    double min() const noexcept { return count_ ? min_ : std::numeric_limits<double>::quiet_NaN(); }
    double max() const noexcept { return count_ ? max_ : std::numeric_limits<double>::quiet_NaN(); }
    bool exact_percentiles() const noexcept { return !sketch_.has_value(); }

    /// Linear interpolation between order statistics; clamped to [min, max].
    double percentile(double q) const {
        if (q < 0.0 || q > 1.0) throw DomainError("percentile must lie in [0, 1]");
        if (count_ == 0) return std::numeric_limits<double>::quiet_NaN();
        if (sketch_) return std::clamp(sketch_->quantile(q), min_, max_);
        if (!sorted_) {
            std::sort(samples_.begin(), samples_.end());
            sorted_ = true;
        }
        const double pos = q * static_cast<double>(samples_.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, samples_.size() - 1);
        return samples_[lo] + (pos - static_cast<double>(lo)) * (samples_[hi] - samples_[lo]);
    }
    double p50() const { return percentile(0.50); }
    double p95() const { return percentile(0.95); }
    double p99() const { return percentile(0.99); }

private:
    std::size_t retain_limit_;
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double min_ = std::numeric_limits<double>::infinity();
    double max_ = -std::numeric_limits<double>::infinity();
    mutable std::vector<double> samples_;
    mutable bool sorted_ = true;
    std::optional<QuantileSketch> sketch_;
};

/// Time integral of a piecewise-constant signal (e.g. buffer occupancy).
class TimeAverage {
public:
    void record(double time, double value) {
        if (started_) {
            if (time < last_time_) throw ModelError("occupancy samples out of time order");
            area_ += last_value_ * (time - last_time_);
        } else {
            start_time_ = time;
            started_ = true;
        }
        last_time_ = time;
        last_value_ = value;
    }

    /// Mean over [first sample, end_time]; the last value is held until end_time.
    double average(double end_time) const {
        if (!started_) return 0.0;
        const double span = end_time - start_time_;
        if (!(span > 0.0)) return last_value_;
        return (area_ + last_value_ * std::max(0.0, end_time - last_time_)) / span;
    }

private:
    bool started_ = false;
    double start_time_ = 0.0;
    double last_time_ = 0.0;
    double last_value_ = 0.0;
    double area_ = 0.0;
};

struct SimReport {
    std::string arch;
    std::string mode;
    std::uint64_t generated = 0;
    std::uint64_t served = 0;
    std::uint64_t blocked = 0;
    std::uint64_t resident = 0;
    SummaryStats latency;      // seconds, served packets after warm-up
    SummaryStats raw_latency;  // seconds, every served packet
    SummaryStats cycle_latency_ns;  // cycle-coupled voq runs only
    double time_average_occupancy = 0.0;  // packets, over the arrival window
    double measured_duration = 0.0;       // seconds, the arrival window
    double throughput = 0.0;              // served packets per second
    std::uint64_t events = 0;
    std::uint64_t trace_hash = 0;

    double blocking_probability() const noexcept {
        return generated ? static_cast<double>(blocked) / static_cast<double>(generated) : 0.0;
    }
    bool conserved() const noexcept { return generated == served + blocked + resident; }
};

/// Collects one run's statistics.
class Collector {
public:
    explicit Collector(std::uint64_t warmup_served = 0) : warmup_(warmup_served) {}

    void record_generated() { ++generated_; }
    void record_block(const Packet&) { ++blocked_; }

    void record_departure(const Packet& p) {
        if (!p.departed_at) throw ModelError("departure recorded for a packet without a departure time");
        const double sample = *p.departed_at - p.created_at;
        if (sample < 0.0) throw ModelError("negative packet latency");
        ++served_;
        raw_latency_.add(sample);
        if (served_ > warmup_) latency_.add(sample);
    }

    void record_cycle_latency(double ns) { cycle_latency_ns_.add(ns); }
    void record_occupancy(double time, double occupancy) { occupancy_.record(time, occupancy); }

    std::uint64_t generated() const noexcept { return generated_; }
    std::uint64_t served() const noexcept { return served_; }
    std::uint64_t blocked() const noexcept { return blocked_; }

    SimReport report(std::uint64_t resident, double occupancy_end, double run_end) const {
        SimReport r;
        r.generated = generated_;
        r.served = served_;
        r.blocked = blocked_;
        r.resident = resident;
        r.latency = latency_;
        r.raw_latency = raw_latency_;
        r.cycle_latency_ns = cycle_latency_ns_;
        r.time_average_occupancy = occupancy_.average(occupancy_end);
        r.measured_duration = occupancy_end;
        r.throughput = run_end > 0.0 ? static_cast<double>(served_) / run_end : 0.0;
        return r;
    }

private:
    std::uint64_t warmup_;
    std::uint64_t generated_ = 0;
    std::uint64_t served_ = 0;
    std::uint64_t blocked_ = 0;
    SummaryStats latency_;
    SummaryStats raw_latency_;
    SummaryStats cycle_latency_ns_;
    TimeAverage occupancy_;
};

struct Interval {
    double mean = 0.0;
    double half_width = 0.0;
    double lower() const noexcept { return mean - half_width; }
    double upper() const noexcept { return mean + half_width; }
    bool overlaps(const Interval& o) const noexcept { return lower() <= o.upper() && o.lower() <= upper(); }
};

/// Two-sided Student-t quantile t_{dof, (1+level)/2}.
inline double t_quantile(std::size_t dof, double level = 0.95) {
    if (dof < 1) throw DomainError("t quantile needs at least one degree of freedom");
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.5 + level / 2.0);
}

/// Grand mean and t-based half-width over per-replication means.
inline Interval confidence_interval(std::span<const double> means, double level = 0.95) {
    if (means.size() < 2) throw DomainError("confidence interval needs at least two replications");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must be in (0, 1)");
    double sum = 0.0;
    for (double m : means) sum += m;
    const double n = static_cast<double>(means.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    const double s = std::sqrt(ss / (n - 1.0));
    return {mean, t_quantile(means.size() - 1, level) * s / std::sqrt(n)};
}

/// Standard error of the mean across replications.
inline double standard_error(std::span<const double> means) {
    if (means.size() < 2) throw DomainError("standard error needs at least two replications");
    double sum = 0.0;
    for (double m : means) sum += m;
    const double n = static_cast<double>(means.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    return std::sqrt(ss / (n - 1.0) / n);
}

/// Per-seed summaries of one quantity and their aggregate.
struct ReplicationReport {
    std::vector<double> means;
    double grand_mean = 0.0;
    std::optional<double> half_width;  // only with two or more replications

    static ReplicationReport from(std::vector<double> means, double level = 0.95) {
        ReplicationReport r;
        r.means = std::move(means);
        if (r.means.empty()) return r;
        if (r.means.size() >= 2) {
            const auto ci = confidence_interval(r.means, level);
            r.grand_mean = ci.mean;
            r.half_width = ci.half_width;
        } else {
            r.grand_mean = r.means.front();
        }
        return r;
    }

    std::optional<Interval> interval() const {
        if (!half_width) return std::nullopt;
        return Interval{grand_mean, *half_width};
    }
};

} // namespace nocbuf::metrics
