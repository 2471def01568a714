#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "nocbuf/experiment.hpp"

using namespace nocbuf;
using namespace nocbuf::experiment;

namespace fs = std::filesystem;

namespace {

std::string cli() { return NOCBUF_CLI_PATH; }

int run(const std::string& args) {
    const int status = std::system((cli() + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "nocbuf_test_experiment";
    fs::create_directories(dir);
    return dir / name;
}

ExperimentConfig small() {
    ExperimentConfig c;
    c.packets = 6000;
    c.warmup = 500;
    c.replications = 3;
    return c;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

} // namespace

TEST(Config, DefaultsValidate) {
    ExperimentConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.common_pool(), 128u);
}

TEST(Config, StreamParsing) {
    ExperimentConfig c;
    std::istringstream in("# comment\n\nlambda = 2e6  # trailing\nislip-iterations=3\narch=distributed\n");
    apply_config_stream(c, in);
    EXPECT_EQ(c.lambda, 2e6);
    EXPECT_EQ(c.islip_iterations, 3u);
    EXPECT_EQ(c.arch, ArchSelection::Distributed);
}

TEST(Config, Errors) {
    ExperimentConfig c;
    EXPECT_THROW(apply_setting(c, "colour", "red"), ValidationError);
    EXPECT_THROW(apply_setting(c, "lambda", "fast"), ValidationError);
    EXPECT_THROW(apply_setting(c, "packets", "-3"), ValidationError);
    EXPECT_THROW(apply_setting(c, "mode", "fluid"), ValidationError);
    std::istringstream bad("lambda 3\n");
    EXPECT_THROW(apply_config_stream(c, bad), ValidationError);
    c = ExperimentConfig{};
    c.lambda = 0.0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = ExperimentConfig{};
    c.islip_iterations = 5;
    EXPECT_THROW(c.validate(), ValidationError);
    EXPECT_THROW(apply_config_file(c, "/nonexistent/nocbuf.conf"), ValidationError);
}

TEST(Config, EnvironmentSeed) {
    ::setenv(kSeedEnvVar, "77", 1);
    ExperimentConfig c;
    apply_environment(c);
    EXPECT_EQ(c.seed, 77u);
    // A config file beats the environment.
    std::istringstream in("seed = 9\n");
    apply_config_stream(c, in);
    EXPECT_EQ(c.seed, 9u);
    ::unsetenv(kSeedEnvVar);
}

TEST(Config, PrecedenceThroughCli) {
    const auto conf = scratch("prec.conf");
    std::ofstream(conf) << "seed = 5\nlambda = 3e6\n";
    const auto out = scratch("prec.csv");
    const std::string cmd = "NOCBUF_SEED=4 " + cli() + " analytics --config " + conf.string() + " --lambda 4e6 --out " +
                            out.string() + " >/dev/null 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    const std::string text = slurp(out);
    EXPECT_NE(text.find("# config.seed=5\n"), std::string::npos);
    EXPECT_NE(text.find("# config.lambda=4000000\n"), std::string::npos);

    const std::string env_only =
        "NOCBUF_SEED=4 " + cli() + " analytics --out " + out.string() + " >/dev/null 2>&1";
    ASSERT_EQ(std::system(env_only.c_str()), 0);
    EXPECT_NE(slurp(out).find("# config.seed=4\n"), std::string::npos);
}

TEST(Report, AnalyticsCsv) {
    ExperimentConfig c;
    c.mode = ExperimentMode::Analytics;
    const auto r = run_analytics(c);
    const std::string csv = to_csv(r);
    EXPECT_EQ(first_line(csv),
              "arch,lambda,mu,capacity,rho,blocking_prob,expected_occupancy,naive_latency_s,effective_latency_s");
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_NE(csv.find("# config.mode=analytics"), std::string::npos);
}

TEST(Report, SimulationHeaderFirstLine) {
    const auto r = run_simulate(small());
    EXPECT_EQ(first_line(to_csv(r)),
              "arch,mode,lambda,mu,capacity,seed,replications,generated,served,blocked,mean_latency_s,ci95_s,p95_s,"
              "blocking_prob,throughput_pps");
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_EQ(std::get<std::uint64_t>(r.rows[0][4]), 128u);
    EXPECT_EQ(std::get<std::uint64_t>(r.rows[1][4]), 32u);
    for (const auto& row : r.rows) {
        const auto gen = std::get<std::uint64_t>(row[7]);
        EXPECT_EQ(gen, 3u * 6000u);
        EXPECT_EQ(std::get<std::uint64_t>(row[8]) + std::get<std::uint64_t>(row[9]), gen);
    }
}

TEST(Report, SingleReplicationLeavesCiEmpty) {
    auto c = small();
    c.replications = 1;
    const auto r = run_simulate(c);
    for (const auto& row : r.rows) EXPECT_TRUE(std::holds_alternative<std::monostate>(row[11]));
    std::istringstream lines(to_csv(r));
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    // ci95_s is the 12th field.
    std::size_t pos = 0;
    for (int k = 0; k < 11; ++k) pos = line.find(',', pos) + 1;
    EXPECT_EQ(line[pos], ',');
}

TEST(Report, JsonRoundTrip) {
    auto c = small();
    const auto r = run_compare(c);
    const auto j = nlohmann::json::parse(to_json(r));
    EXPECT_EQ(j["report"], "compare");
    ASSERT_EQ(j["rows"].size(), 2u);
    EXPECT_EQ(j["rows"][0]["arch"], "common");
    EXPECT_EQ(j["rows"][1]["arch"], "distributed");
    EXPECT_DOUBLE_EQ(j["rows"][1]["mean_latency_s"].get<double>(), std::get<double>(r.rows[1][10]));
    EXPECT_EQ(j["config"]["seed"], "1");
    EXPECT_TRUE(j["summary"].contains("latency_improvement_percent"));
    EXPECT_TRUE(j["summary"].contains("blocking_ratio"));
}

TEST(Report, RepeatedRunsAreIdentical) {
    const auto c = small();
    EXPECT_EQ(to_csv(run_compare(c)), to_csv(run_compare(c)));
    auto other = c;
    other.seed = 2;
    EXPECT_NE(to_csv(run_compare(c)), to_csv(run_compare(other)));
}

TEST(Report, CycleTable) {
    ExperimentConfig c;
    c.mode = ExperimentMode::Cycle;
    const auto r = run_cycle(c);
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_EQ(std::get<double>(r.rows[0][3]), 40.0);
    EXPECT_EQ(std::get<double>(r.rows[1][3]), 48.0);
    EXPECT_EQ(std::get<double>(r.rows[2][3]), 56.0);
    const std::string csv = to_csv(r);
    EXPECT_NE(csv.find("# improvement_percent.relative_to_distributed.penalty_2=16.66666667"), std::string::npos);
    EXPECT_NE(csv.find("# improvement_percent.penalty_over_distributed.penalty_4=33.33333333"), std::string::npos);
}

TEST(Emit, UnwritablePathIsIoError) {
    Report r;
    r.columns = {"a"};
    EXPECT_THROW(emit(r, OutputFormat::Csv, "/nonexistent-dir/x.csv"), IoError);
    std::ostringstream os;
    emit(r, OutputFormat::Csv, "", os);
    EXPECT_EQ(os.str(), "a\n");
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("analytics"), 0);
    EXPECT_EQ(run("analytics --lambda 0"), 2);
    EXPECT_EQ(run("simulate --lambda -1"), 2);
    EXPECT_EQ(run("simulate --no-such-flag"), 2);
    EXPECT_EQ(run("analytics --mode voq"), 2);
    EXPECT_EQ(run("analytics --out /nonexistent-dir/x.csv"), 3);
    EXPECT_EQ(run("analytics --config /nonexistent/nocbuf.conf"), 2);
}

TEST(Cli, CsvAndJsonOutputs) {
    const auto csv = scratch("cli.csv");
    ASSERT_EQ(run("simulate --packets 3000 --warmup 100 --replications 2 --out " + csv.string()), 0);
    EXPECT_EQ(first_line(slurp(csv)).substr(0, 10), "arch,mode,");
    const auto json = scratch("cli.json");
    ASSERT_EQ(run("cycle --format json --out " + json.string()), 0);
    const auto j = nlohmann::json::parse(slurp(json));
    EXPECT_EQ(j["rows"].size(), 3u);
}
