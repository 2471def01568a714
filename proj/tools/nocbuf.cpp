// nocbuf: command-line runner for the router buffer experiments.
//
//   nocbuf analytics [flags]   closed-form M/M/1/N table for both buffer layouts
//   nocbuf simulate  [flags]   discrete-event runs (queueing or voq mode)
//   nocbuf compare   [flags]   both layouts on identical seeds
//   nocbuf cycle     [flags]   clock-cycle latency table
//
// Settings resolve as: built-in defaults < NOCBUF_SEED < --config file < flags.
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "nocbuf/experiment.hpp"

namespace {

using nocbuf::experiment::ExperimentConfig;
using nocbuf::experiment::Report;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct FlagValues {
    std::optional<std::string> config_file;
    std::vector<std::pair<std::string, std::optional<std::string>>> settings;
    bool coupled = false;
};

void add_common_flags(CLI::App& cmd, FlagValues& flags) {
    cmd.add_option("--config", flags.config_file, "File of key=value settings");
    static const std::vector<std::pair<std::string, std::string>> kFlags = {
        {"mode", "analytics | queueing | voq | cycle"},
        {"arch", "common | distributed | both"},
        {"lambda", "Arrival rate per input port (packets/s)"},
        {"mu", "Service rate per private buffer (packets/s)"},
        {"capacity", "Private buffer size per input (packets)"},
        {"common-capacity", "Shared buffer size (default ports x capacity)"},
        {"ports", "Router radix"},
        {"packets", "Packets generated per replication"},
        {"seed", "Base seed (decimal 64-bit)"},
        {"replications", "Independent replications"},
        {"islip-iterations", "iSLIP iterations per epoch"},
        {"warmup", "Served packets dropped from latency statistics"},
        {"wiring", "independent | demuxed"},
        {"store-cycles", "Cycle budget: store"},
        {"schedule-cycles", "Cycle budget: schedule"},
        {"traverse-cycles", "Cycle budget: traverse"},
        {"clock-period-ns", "Clock period (ns)"},
        {"crowding-threshold", "Pool fill fraction that triggers the contention penalty"},
        {"distributed-penalty-cc", "Contention penalty of the distributed buffer (CC)"},
        {"full-penalty-cc", "Penalty when the pool is nearly full (CC)"},
        {"out", "Output path (default stdout)"},
        {"format", "csv | json"},
    };
    flags.settings.reserve(kFlags.size());
    for (const auto& [name, help] : kFlags) {
        flags.settings.emplace_back(name, std::nullopt);
        cmd.add_option("--" + name, flags.settings.back().second, help);
    }
    cmd.add_flag("--coupled", flags.coupled, "Cycle mode: derive penalties from a voq simulation");
}

ExperimentConfig resolve(const std::string& command, const FlagValues& flags) {
    ExperimentConfig c;
    if (command == "analytics") c.mode = nocbuf::experiment::ExperimentMode::Analytics;
    if (command == "cycle") c.mode = nocbuf::experiment::ExperimentMode::Cycle;
    nocbuf::experiment::apply_environment(c);
    if (flags.config_file) nocbuf::experiment::apply_config_file(c, *flags.config_file);
    for (const auto& [key, value] : flags.settings)
        if (value) nocbuf::experiment::apply_setting(c, key, *value);
    if (flags.coupled) c.coupled = true;
    if (command == "analytics" && c.mode != nocbuf::experiment::ExperimentMode::Analytics)
        throw nocbuf::ValidationError("analytics runs in mode analytics only");
    if (command == "cycle" && c.mode != nocbuf::experiment::ExperimentMode::Cycle)
        throw nocbuf::ValidationError("cycle runs in mode cycle only");
    c.validate();
    return c;
}

Report dispatch(const std::string& command, const ExperimentConfig& c) {
    namespace ex = nocbuf::experiment;
    if (command == "analytics") return ex::run_analytics(c);
    if (command == "simulate") return ex::run_simulate(c);
    if (command == "compare") {
        ExperimentConfig both = c;
        if (both.mode != ex::ExperimentMode::Cycle && both.mode != ex::ExperimentMode::Analytics &&
            both.arch != ex::ArchSelection::Both)
            throw nocbuf::ValidationError("compare needs arch=both");
        return ex::run_compare(both);
    }
    return ex::run_cycle(c);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Router buffer architecture experiments: common vs distributed input buffers"};
    app.require_subcommand(1);

    std::vector<std::pair<std::string, FlagValues>> commands;
    commands.reserve(4);
    for (const char* name : {"analytics", "simulate", "compare", "cycle"}) {
        commands.emplace_back(name, FlagValues{});
        auto* sub = app.add_subcommand(name, std::string("Run the ") + name + " experiment");
        add_common_flags(*sub, commands.back().second);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    for (auto& [name, flags] : commands) {
        if (!app.got_subcommand(name)) continue;
        ExperimentConfig config;
        try {
            config = resolve(name, flags);
        } catch (const std::invalid_argument& e) {
            std::cerr << "nocbuf: configuration error: " << e.what() << '\n';
            return kExitConfig;
        }
        try {
            const Report report = dispatch(name, config);
            nocbuf::experiment::emit(report, config.format, config.out);
        } catch (const nocbuf::experiment::IoError& e) {
            std::cerr << "nocbuf: " << e.what() << '\n';
            return kExitIo;
        } catch (const std::invalid_argument& e) {
            std::cerr << "nocbuf: configuration error: " << e.what() << '\n';
            return kExitConfig;
        } catch (const std::exception& e) {
            std::cerr << "nocbuf: " << e.what() << '\n';
            return 1;
        }
    }
    return 0;
}
