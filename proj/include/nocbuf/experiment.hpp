#pragma once

// Experiment configuration, the table-producing runs behind the command line
// tool, and CSV/JSON report emission.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "nocbuf/analytics.hpp"
#include "nocbuf/cyclemodel.hpp"
#include "nocbuf/errors.hpp"
#include "nocbuf/metrics.hpp"
#include "nocbuf/simulation.hpp"

namespace nocbuf::experiment {

/// Output could not be written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

enum class ExperimentMode { Analytics, Queueing, Voq, Cycle };
enum class ArchSelection { Common, Distributed, Both };
enum class OutputFormat { Csv, Json };

inline constexpr const char* kSeedEnvVar = "NOCBUF_SEED";

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::Queueing;
    ArchSelection arch = ArchSelection::Both;
    std::size_t ports = kDefaultPorts;
    double lambda = 10e6;   // per input port
    double mu = 10.05e6;    // per private pool
    std::size_t capacity = 32;                    // private pool size
    std::optional<std::size_t> common_capacity;  // default ports * capacity
    std::uint64_t packets = 50000;
    std::uint64_t seed = 1;
    std::size_t replications = 5;
    unsigned islip_iterations = kDefaultIslipIterations;
    std::uint64_t warmup = 5000;
    SourceWiring wiring = SourceWiring::Independent;
    bool coupled = false;  // cycle mode: attach contention penalties to a voq run
    cycle::CycleBudget budget;
    double crowding_threshold = 0.75;
    unsigned crowded_penalty_cc = 2;
    unsigned full_penalty_cc = 4;
    unsigned distributed_penalty_cc = 2;  // closed-form distributed penalty
    OutputFormat format = OutputFormat::Csv;
    std::string out;  // empty: stdout

    std::size_t common_pool() const { return common_capacity.value_or(ports * capacity); }

    void validate() const {
        if (ports < 1) throw ValidationError("ports must be at least 1");
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be positive");
        if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("mu must be positive");
        if (capacity < 1 || common_pool() < 1) throw ValidationError("capacity must be at least 1");
        if (replications < 1) throw ValidationError("replications must be at least 1");
        if (islip_iterations < 1 || islip_iterations > ports)
            throw ValidationError("islip_iterations must lie in [1, ports]");
        if (!(crowding_threshold >= 0.0 && crowding_threshold <= 1.0))
            throw ValidationError("crowding_threshold must lie in [0, 1]");
        budget.validate();
    }
};

inline const char* to_string(ExperimentMode m) {
    switch (m) {
        case ExperimentMode::Analytics: return "analytics";
        case ExperimentMode::Queueing: return "queueing";
        case ExperimentMode::Voq: return "voq";
        case ExperimentMode::Cycle: return "cycle";
    }
    return "?";
}

inline const char* to_string(ArchSelection a) {
    switch (a) {
        case ArchSelection::Common: return "common";
        case ArchSelection::Distributed: return "distributed";
        case ArchSelection::Both: return "both";
    }
    return "?";
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ValidationError("invalid number for " + key + ": '" + v + "'");
    }
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    try {
        if (v.empty() || v.front() == '-') throw std::invalid_argument(v);
        std::size_t used = 0;
        const auto u = std::stoull(v, &used, 10);
        if (used != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw ValidationError("invalid non-negative integer for " + key + ": '" + v + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ValidationError("invalid boolean for " + key + ": '" + v + "'");
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace detail

/// Applies one `key = value` setting. Keys accept '-' or '_' as separator.
inline void apply_setting(ExperimentConfig& c, std::string key, const std::string& raw) {
    for (auto& ch : key)
        if (ch == '-') ch = '_';
    const std::string v = detail::trim(raw);
    using detail::parse_double;
    using detail::parse_uint;

    if (key == "mode") {
        if (v == "analytics") c.mode = ExperimentMode::Analytics;
        else if (v == "queueing") c.mode = ExperimentMode::Queueing;
        else if (v == "voq") c.mode = ExperimentMode::Voq;
        else if (v == "cycle") c.mode = ExperimentMode::Cycle;
        else throw ValidationError("mode must be analytics|queueing|voq|cycle, got '" + v + "'");
    } else if (key == "arch") {
        if (v == "common") c.arch = ArchSelection::Common;
        else if (v == "distributed") c.arch = ArchSelection::Distributed;
        else if (v == "both") c.arch = ArchSelection::Both;
        else throw ValidationError("arch must be common|distributed|both, got '" + v + "'");
    } else if (key == "format") {
        if (v == "csv") c.format = OutputFormat::Csv;
        else if (v == "json") c.format = OutputFormat::Json;
        else throw ValidationError("format must be csv|json, got '" + v + "'");
    } else if (key == "wiring") {
        if (v == "independent") c.wiring = SourceWiring::Independent;
        else if (v == "demuxed") c.wiring = SourceWiring::Demuxed;
        else throw ValidationError("wiring must be independent|demuxed, got '" + v + "'");
    } else if (key == "lambda") {
        c.lambda = parse_double(key, v);
    } else if (key == "mu") {
        c.mu = parse_double(key, v);
    } else if (key == "ports") {
        c.ports = parse_uint(key, v);
    } else if (key == "capacity") {
        c.capacity = parse_uint(key, v);
    } else if (key == "common_capacity") {
        c.common_capacity = parse_uint(key, v);
    } else if (key == "packets") {
        c.packets = parse_uint(key, v);
    } else if (key == "seed") {
        c.seed = parse_uint(key, v);
    } else if (key == "replications") {
        c.replications = parse_uint(key, v);
    } else if (key == "islip_iterations") {
        c.islip_iterations = static_cast<unsigned>(parse_uint(key, v));
    } else if (key == "warmup") {
        c.warmup = parse_uint(key, v);
    } else if (key == "coupled") {
        c.coupled = detail::parse_bool(key, v);
    } else if (key == "store_cycles") {
        c.budget.store_cycles = static_cast<unsigned>(parse_uint(key, v));
    } else if (key == "schedule_cycles") {
        c.budget.schedule_cycles = static_cast<unsigned>(parse_uint(key, v));
    } else if (key == "traverse_cycles") {
        c.budget.traverse_cycles = static_cast<unsigned>(parse_uint(key, v));
    } else if (key == "clock_period_ns") {
        c.budget.clock_period_ns = parse_double(key, v);
    } else if (key == "crowding_threshold") {
        c.crowding_threshold = parse_double(key, v);
    } else if (key == "crowded_penalty_cc") {
        c.crowded_penalty_cc = static_cast<unsigned>(parse_uint(key, v));
    } else if (key == "full_penalty_cc") {
        c.full_penalty_cc = static_cast<unsigned>(parse_uint(key, v));
    } else if (key == "distributed_penalty_cc") {
        c.distributed_penalty_cc = static_cast<unsigned>(parse_uint(key, v));
    } else if (key == "out") {
        c.out = v;
    } else {
        throw ValidationError("unknown configuration key '" + key + "'");
    }
}

/// Reads `key = value` lines; blank lines and '#' comments are ignored.
inline void apply_config_stream(ExperimentConfig& c, std::istream& in, const std::string& origin = "config") {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(origin + ":" + std::to_string(lineno) + ": expected key=value");
        apply_setting(c, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

inline void apply_config_file(ExperimentConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file '" + path + "'");
    apply_config_stream(c, in, path);
}

/// Default seed from the environment, if set.
inline void apply_environment(ExperimentConfig& c) {
    if (const char* s = std::getenv(kSeedEnvVar); s && *s) apply_setting(c, "seed", s);
}

/// Every resolved setting, in a fixed order, for the reproducibility header.
inline std::vector<std::pair<std::string, std::string>> resolved_settings(const ExperimentConfig& c) {
    using detail::format_double;
    return {
        {"mode", to_string(c.mode)},
        {"arch", to_string(c.arch)},
        {"ports", std::to_string(c.ports)},
        {"lambda", format_double(c.lambda)},
        {"mu", format_double(c.mu)},
        {"capacity", std::to_string(c.capacity)},
        {"common_capacity", std::to_string(c.common_pool())},
        {"packets", std::to_string(c.packets)},
        {"seed", std::to_string(c.seed)},
        {"replications", std::to_string(c.replications)},
        {"islip_iterations", std::to_string(c.islip_iterations)},
        {"warmup", std::to_string(c.warmup)},
        {"wiring", c.wiring == SourceWiring::Independent ? "independent" : "demuxed"},
        {"coupled", c.coupled ? "true" : "false"},
        {"store_cycles", std::to_string(c.budget.store_cycles)},
        {"schedule_cycles", std::to_string(c.budget.schedule_cycles)},
        {"traverse_cycles", std::to_string(c.budget.traverse_cycles)},
        {"clock_period_ns", format_double(c.budget.clock_period_ns)},
        {"crowding_threshold", format_double(c.crowding_threshold)},
        {"crowded_penalty_cc", std::to_string(c.crowded_penalty_cc)},
        {"full_penalty_cc", std::to_string(c.full_penalty_cc)},
        {"distributed_penalty_cc", std::to_string(c.distributed_penalty_cc)},
        {"format", c.format == OutputFormat::Csv ? "csv" : "json"},
    };
}

// ---------------------------------------------------------------------------
// Reports

/// A cell: empty, text, unsigned count or real number.
using Cell = std::variant<std::monostate, std::string, std::uint64_t, double>;

struct Report {
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, Cell>> summary;  // derived scalars
    std::vector<std::pair<std::string, std::string>> notes;
    std::vector<std::pair<std::string, std::string>> config;
};

namespace detail {

inline std::string cell_text(const Cell& c) {
    struct {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(std::uint64_t u) const { return std::to_string(u); }
        std::string operator()(double d) const { return format_double(d); }
    } visitor;
    return std::visit(visitor, c);
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
    struct {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
        nlohmann::ordered_json operator()(std::uint64_t u) const { return u; }
        nlohmann::ordered_json operator()(double d) const { return d; }
    } visitor;
    return std::visit(visitor, c);
}

} // namespace detail

/// Header, one line per row, then '#'-prefixed summary, notes and configuration.
inline std::string to_csv(const Report& r) {
    std::ostringstream os;
    for (std::size_t k = 0; k < r.columns.size(); ++k) os << (k ? "," : "") << r.columns[k];
    os << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << detail::cell_text(row[k]);
        os << '\n';
    }
    for (const auto& [k, v] : r.summary) os << "# " << k << '=' << detail::cell_text(v) << '\n';
    for (const auto& [k, v] : r.notes) os << "# note." << k << '=' << v << '\n';
    for (const auto& [k, v] : r.config) os << "# config." << k << '=' << v << '\n';
    return os.str();
}

inline nlohmann::ordered_json to_json_value(const Report& r) {
    nlohmann::ordered_json j;
    j["report"] = r.title;
    j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.config) j["config"][k] = v;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json o;
        for (std::size_t k = 0; k < row.size(); ++k) o[r.columns[k]] = detail::cell_json(row[k]);
        j["rows"].push_back(std::move(o));
    }
    j["summary"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.summary) j["summary"][k] = detail::cell_json(v);
    j["notes"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.notes) j["notes"][k] = v;
    return j;
}

inline std::string to_json(const Report& r) { return to_json_value(r).dump(2) + "\n"; }

inline std::string render(const Report& r, OutputFormat f) {
    return f == OutputFormat::Csv ? to_csv(r) : to_json(r);
}

/// Writes to `path`, or to `fallback` when the path is empty.
inline void emit(const Report& r, OutputFormat f, const std::string& path, std::ostream& fallback = std::cout) {
    const std::string text = render(r, f);
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Runs

inline const std::vector<std::string>& simulation_columns() {
    static const std::vector<std::string> cols{
        "arch",  "mode",      "lambda",    "mu",      "capacity",       "seed",   "replications", "generated",
        "served", "blocked", "mean_latency_s", "ci95_s", "p95_s", "blocking_prob", "throughput_pps"};
    return cols;
}

inline std::vector<Architecture> selected(ArchSelection a) {
    switch (a) {
        case ArchSelection::Common: return {Architecture::Common};
        case ArchSelection::Distributed: return {Architecture::Distributed};
        case ArchSelection::Both: break;
    }
    return {Architecture::Common, Architecture::Distributed};
}

inline analytics::QueueSpec distributed_queue(const ExperimentConfig& c) {
    return {c.lambda, c.mu, c.capacity};
}

inline Report run_analytics(const ExperimentConfig& c) {
    c.validate();
    const auto base = distributed_queue(c);
    const double k = static_cast<double>(c.ports);
    const analytics::QueueSpec common{k * c.lambda, k * c.mu, c.common_pool()};

    Report r;
    r.title = "analytics";
    r.columns = {"arch", "lambda", "mu", "capacity", "rho", "blocking_prob", "expected_occupancy",
                 "naive_latency_s", "effective_latency_s"};
    std::map<Architecture, analytics::QueueMetrics> results;
    for (Architecture a : selected(c.arch)) {
        const auto& spec = a == Architecture::Common ? common : base;
        const auto m = analytics::evaluate(spec);
        results[a] = m;
        r.rows.push_back({std::string(to_string(a)), spec.arrival_rate, spec.service_rate,
                          static_cast<std::uint64_t>(spec.capacity), m.rho, m.blocking_probability,
                          m.expected_occupancy, m.naive_latency, m.effective_latency});
    }
    if (results.size() == 2) {
        const auto& d = results[Architecture::Distributed];
        const auto& cm = results[Architecture::Common];
        r.summary.emplace_back("naive_latency_improvement_percent",
                               100.0 * (d.naive_latency - cm.naive_latency) / d.naive_latency);
        r.summary.emplace_back("effective_latency_improvement_percent",
                               100.0 * (d.effective_latency - cm.effective_latency) / d.effective_latency);
        r.summary.emplace_back("blocking_ratio", d.blocking_probability / cm.blocking_probability);
    }
    r.notes.emplace_back("naive_latency", "E(n)/lambda over the offered rate of the queue");
    r.notes.emplace_back("effective_latency", "E(n)/(lambda(1-P_N)), mean time in system of admitted packets");
    r.config = resolved_settings(c);
    return r;
}

inline SimConfig simulation_config(const ExperimentConfig& c, Architecture a) {
    SimConfig s;
    s.arch = a == Architecture::Common ? BufferArchitecture::common(c.common_pool())
                                       : BufferArchitecture::distributed(c.capacity);
    s.mode = c.mode == ExperimentMode::Queueing ? Mode::Queueing : Mode::Voq;
    s.ports = c.ports;
    s.lambda = c.lambda;
    s.mu = c.mu;
    s.wiring = c.wiring;
    s.seed = c.seed;
    s.stop = StopCondition::generated(c.packets);
    s.warmup = c.warmup;
    s.islip_iterations = c.islip_iterations;
    s.cycle_coupled = c.mode == ExperimentMode::Cycle;
    s.budget = c.budget;
    s.contention.crowding_threshold = c.crowding_threshold;
    s.contention.crowded_penalty_cc = c.crowded_penalty_cc;
    s.contention.full_penalty_cc = c.full_penalty_cc;
    return s;
}

/// Replication results for one architecture.
struct ArchAggregate {
    Architecture arch = Architecture::Common;
    std::size_t capacity = 0;
    std::vector<metrics::SimReport> runs;
    metrics::ReplicationReport latency;    // warm-up trimmed mean time in system, s
    metrics::ReplicationReport blocking;   // blocked / generated
    metrics::ReplicationReport occupancy;  // time-average packets in buffer
    metrics::ReplicationReport p95;        // s
    metrics::ReplicationReport throughput; // packets/s
    metrics::ReplicationReport cycle_ns;   // cycle-coupled runs only

    std::uint64_t total(std::uint64_t metrics::SimReport::*field) const {
        std::uint64_t t = 0;
        for (const auto& r : runs) t += r.*field;
        return t;
    }
};

/// Mean latency of a run: warm-up trimmed when anything survived the trim.
inline double run_latency(const metrics::SimReport& r) {
    return r.latency.count() ? r.latency.mean() : r.raw_latency.mean();
}

inline ArchAggregate aggregate(Architecture a, std::size_t capacity, std::vector<metrics::SimReport> runs) {
    ArchAggregate g;
    g.arch = a;
    g.capacity = capacity;
    g.runs = std::move(runs);
    std::vector<double> lat, blk, occ, p95, thr, cyc;
    for (const auto& r : g.runs) {
        if (!r.conserved()) throw ModelError("replication violated packet conservation");
        lat.push_back(run_latency(r));
        blk.push_back(r.blocking_probability());
        occ.push_back(r.time_average_occupancy);
        p95.push_back(r.latency.count() ? r.latency.p95() : r.raw_latency.p95());
        thr.push_back(r.throughput);
        if (r.cycle_latency_ns.count()) cyc.push_back(r.cycle_latency_ns.mean());
    }
    g.latency = metrics::ReplicationReport::from(lat);
    g.blocking = metrics::ReplicationReport::from(blk);
    g.occupancy = metrics::ReplicationReport::from(occ);
    g.p95 = metrics::ReplicationReport::from(p95);
    g.throughput = metrics::ReplicationReport::from(thr);
    g.cycle_ns = metrics::ReplicationReport::from(cyc);
    return g;
}

inline ArchAggregate simulate_architecture(const ExperimentConfig& c, Architecture a) {
    const SimConfig s = simulation_config(c, a);
    return aggregate(a, s.arch.capacity, run_replications(s, c.replications));
}

inline std::vector<Cell> simulation_row(const ExperimentConfig& c, const ArchAggregate& g, const char* mode) {
    const auto half = [](const metrics::ReplicationReport& r) -> Cell {
        return r.half_width ? Cell{*r.half_width} : Cell{};
    };
    const std::uint64_t generated = g.total(&metrics::SimReport::generated);
    const std::uint64_t blocked = g.total(&metrics::SimReport::blocked);
    return {std::string(to_string(g.arch)),
            std::string(mode),
            c.lambda,
            c.mu,
            static_cast<std::uint64_t>(g.capacity),
            c.seed,
            static_cast<std::uint64_t>(c.replications),
            generated,
            g.total(&metrics::SimReport::served),
            blocked,
            g.latency.grand_mean,
            half(g.latency),
            g.p95.grand_mean,
            generated ? static_cast<double>(blocked) / static_cast<double>(generated) : 0.0,
            g.throughput.grand_mean};
}

/// Simulated runs of the selected architectures in queueing or voq mode.
inline std::vector<ArchAggregate> simulate(const ExperimentConfig& c) {
    c.validate();
    if (c.mode == ExperimentMode::Analytics)
        throw ValidationError("simulation needs mode queueing, voq or cycle");
    std::vector<ArchAggregate> out;
    for (Architecture a : selected(c.arch)) out.push_back(simulate_architecture(c, a));
    return out;
}

inline Report run_simulate(const ExperimentConfig& c) {
    if (c.mode != ExperimentMode::Queueing && c.mode != ExperimentMode::Voq)
        throw ValidationError("simulate needs mode queueing or voq");
    Report r;
    r.title = "simulate";
    r.columns = simulation_columns();
    for (const auto& g : simulate(c)) r.rows.push_back(simulation_row(c, g, to_string(c.mode)));
    r.notes.emplace_back("mean_latency_s", "time in system of served packets after the warm-up");
    r.config = resolved_settings(c);
    return r;
}

inline Report run_cycle(const ExperimentConfig& c);

/// Both architectures on identical seeds; latency improvement is 100 (d - c) / d.
inline Report run_compare(ExperimentConfig c) {
    c.validate();
    if (c.mode == ExperimentMode::Cycle) return run_cycle(c);
    if (c.mode == ExperimentMode::Analytics) return run_analytics(c);
    if (c.arch != ArchSelection::Both) throw ValidationError("compare needs arch=both");

    const auto runs = simulate(c);
    const ArchAggregate& common = runs[0];
    const ArchAggregate& dist = runs[1];

    Report r;
    r.title = "compare";
    r.columns = simulation_columns();
    for (const auto& g : runs) r.rows.push_back(simulation_row(c, g, to_string(c.mode)));

    const double d = dist.latency.grand_mean;
    const double cm = common.latency.grand_mean;
    r.summary.emplace_back("latency_improvement_percent", 100.0 * (d - cm) / d);
    const double cb = common.blocking.grand_mean;
    r.summary.emplace_back("blocking_ratio", cb > 0.0 ? Cell{dist.blocking.grand_mean / cb} : Cell{});
    r.summary.emplace_back("common_occupancy", common.occupancy.grand_mean);
    r.summary.emplace_back("distributed_occupancy", dist.occupancy.grand_mean);
    if (auto ci = common.blocking.half_width) r.summary.emplace_back("common_blocking_ci95", *ci);
    if (auto ci = dist.blocking.half_width) r.summary.emplace_back("distributed_blocking_ci95", *ci);
    if (auto lc = common.latency.interval(), ld = dist.latency.interval(); lc && ld)
        r.summary.emplace_back("latency_ci_overlap", std::string(lc->overlaps(*ld) ? "yes" : "no"));

    if (c.mode == ExperimentMode::Queueing) {
        const auto theory = analytics::compare_architectures(distributed_queue(c), c.ports);
        r.summary.emplace_back("analytic_common_effective_latency_s", theory.common.effective_latency);
        r.summary.emplace_back("analytic_distributed_effective_latency_s", theory.distributed.effective_latency);
        r.summary.emplace_back("analytic_common_blocking", theory.common.blocking_probability);
        r.summary.emplace_back("analytic_distributed_blocking", theory.distributed.blocking_probability);
    }
    r.notes.emplace_back("seeding", "both architectures replay identical arrival streams");
    r.config = resolved_settings(c);
    return r;
}

/// Clock-cycle latency table; with `coupled`, also per-packet penalties from a voq run.
inline Report run_cycle(const ExperimentConfig& c) {
    c.validate();
    const auto& b = c.budget;
    Report r;
    r.title = "cycle";
    r.columns = {"arch", "penalty_cc", "cycles", "latency_ns", "source"};
    const double base_cc = b.base_cycles();
    const auto add = [&](Architecture a, unsigned penalty) {
        r.rows.push_back({std::string(to_string(a)), static_cast<std::uint64_t>(penalty),
                          static_cast<std::uint64_t>(b.base_cycles() + penalty), cycle::min_latency_ns(b, penalty),
                          std::string("budget")});
    };
    for (Architecture a : selected(c.arch)) {
        if (a == Architecture::Common) add(a, 0);
        else add(a, c.distributed_penalty_cc);
    }
    if (c.arch != ArchSelection::Common) add(Architecture::Distributed, c.full_penalty_cc);

    const double crowded = base_cc + c.distributed_penalty_cc;
    const double full = base_cc + c.full_penalty_cc;
    using cycle::ImprovementConvention;
    using cycle::improvement_percent;
    r.summary.emplace_back("improvement_percent.relative_to_distributed.penalty_" +
                               std::to_string(c.distributed_penalty_cc),
                           improvement_percent(base_cc, crowded, ImprovementConvention::RelativeToDistributed));
    r.summary.emplace_back("improvement_percent.relative_to_distributed.penalty_" + std::to_string(c.full_penalty_cc),
                           improvement_percent(base_cc, full, ImprovementConvention::RelativeToDistributed));
    r.summary.emplace_back("improvement_percent.penalty_over_distributed.penalty_" +
                               std::to_string(c.distributed_penalty_cc),
                           improvement_percent(base_cc, crowded, ImprovementConvention::PenaltyOverDistributed));
    r.summary.emplace_back("improvement_percent.penalty_over_distributed.penalty_" + std::to_string(c.full_penalty_cc),
                           improvement_percent(base_cc, full, ImprovementConvention::PenaltyOverDistributed));

    if (c.coupled) {
        ExperimentConfig sim = c;
        sim.mode = ExperimentMode::Cycle;
        for (Architecture a : selected(c.arch)) {
            const auto g = simulate_architecture(sim, a);
            r.rows.push_back({std::string(to_string(a)), Cell{}, Cell{}, g.cycle_ns.grand_mean,
                              std::string("coupled-voq-mean")});
        }
    }
    r.notes.emplace_back("relative_to_distributed", "100 (d - c) / d");
    r.notes.emplace_back("penalty_over_distributed", "100 (d - c) / 12 CC");
    r.config = resolved_settings(c);
    return r;
}

} // namespace nocbuf::experiment
