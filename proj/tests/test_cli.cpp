#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csit/cli.hpp"

using namespace csit;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int run_with(std::vector<std::string> args) {
    std::vector<const char*> argv;
    argv.push_back("csit_sim");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("defaults reproduce the reference operating point") {
    const RunSpec spec = parse_args({});
    CHECK(spec.config.bts_antennas == 128);
    CHECK(spec.config.user_antennas == 2);
    CHECK(spec.config.users == 10);
    CHECK(spec.config.pilot_count == 64);
    CHECK(spec.config.sparsity_bound == 10);
    CHECK(spec.config.common_bound == 6);
    CHECK(spec.config.snr_db == 15.0);
    CHECK(spec.config.step_size == 0.01);
    CHECK(spec.config.trials == 100);
    CHECK(spec.sweep.parameter.empty());
    CHECK(spec.algorithms.size() == 4);
    CHECK(spec.output_path == "-");
}

TEST_CASE("sweep parsing") {
    const RunSpec spec = parse_args({"--sweep", "T=32,64,96,128"});
    CHECK(spec.sweep.parameter == "T");
    CHECK(spec.sweep.values == std::vector<double>{32, 64, 96, 128});

    const RunSpec snr = parse_args({"--sweep", "snr-db=5,10.5,15"});
    CHECK(snr.sweep.parameter == "snr_db");

    CHECK_THROWS_AS(parse_args({"--sweep", "T32,64"}), UsageError);
    CHECK_THROWS_AS(parse_args({"--sweep", "T="}), UsageError);
    CHECK_THROWS_AS(parse_args({"--sweep", "T=64,32"}), UsageError);
    CHECK_THROWS_AS(parse_args({"--sweep", "T=32,32"}), UsageError);
    CHECK_THROWS_AS(parse_args({"--sweep", "T=32,abc"}), UsageError);
    CHECK_THROWS_AS(parse_args({"--sweep", "T=32.5,64"}), UsageError);
    CHECK_THROWS_AS(parse_args({"--sweep", "Q=1,2"}), UsageError);
}

TEST_CASE("algorithm selection") {
    const RunSpec spec = parse_args({"--algos", "jbiht,genie-ls,jbiht"});
    CHECK(spec.algorithms == std::vector<Algorithm>{Algorithm::Jbiht, Algorithm::GenieLs});
    CHECK_THROWS_AS(parse_args({"--algos", "magic"}), UsageError);
    CHECK_THROWS_AS(parse_args({"--algos", ","}), UsageError);
}

TEST_CASE("contradictory parameters are usage errors") {
    CHECK_THROWS_AS(parse_args({"--c", "12", "--s", "10"}), UsageError);
    CHECK_THROWS_AS(parse_args({"--wat"}), UsageError);
    CHECK_THROWS_AS(parse_args({"--jobs", "0"}), UsageError);
}

TEST_CASE("--help raises the help carrier") {
    CHECK_THROWS_AS(parse_args({"--help"}), HelpRequested);
}

TEST_CASE("csv layout: header plus one row per point and algorithm") {
    ExperimentReport report;
    report.base.seed = 7;
    report.base.trials = 5;
    report.sweep = Sweep{"T", {32, 48, 64, 96}};
    report.algorithms.assign(kAllAlgorithms.begin(), kAllAlgorithms.end());
    for (double value : report.sweep.values) {
        SweepPoint point;
        point.value = value;
        for (Algorithm algorithm : report.algorithms) {
            PointStats stats;
            stats.mean_loss_db = 1.5 + value / 100.0;
            stats.valid_trials = 5;
            point.stats[static_cast<std::size_t>(algorithm)] = stats;
        }
        report.points.push_back(point);
    }

    std::ostringstream out;
    emit_csv(report, out);
    const std::string text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 17);
    CHECK(text.rfind("sweep_param,sweep_value,algorithm,mean_snr_loss_db,trials,invalid_count,seed\n",
                     0) == 0);
    CHECK(text.find("T,32,biht,1.820000,5,0,7\n") != std::string::npos);

    std::ostringstream again;
    emit_csv(report, again);
    CHECK(again.str() == text);
}

TEST_CASE("single-point single-algorithm csv is two lines") {
    ExperimentReport report;
    report.base.trials = 3;
    report.algorithms = {Algorithm::Jbiht};
    SweepPoint point;
    PointStats stats;
    stats.mean_loss_db = 2.0;
    stats.valid_trials = 3;
    point.stats[static_cast<std::size_t>(Algorithm::Jbiht)] = stats;
    report.points.push_back(point);

    std::ostringstream out;
    emit_csv(report, out);
    CHECK(out.str() ==
          "sweep_param,sweep_value,algorithm,mean_snr_loss_db,trials,invalid_count,seed\n"
          "none,0,jbiht,2.000000,3,0,1\n");
}

TEST_CASE("end-to-end run writes a deterministic csv and exits zero") {
    const auto dir = std::filesystem::temp_directory_path() / "csit_cli_test";
    std::filesystem::create_directories(dir);
    const auto out1 = dir / "a.csv";
    const auto out2 = dir / "b.csv";
    const std::vector<std::string> base_args{
        "--M", "16", "--N", "1", "--K", "2", "--T", "12", "--s", "4",  "--c",   "0",
        "--trials", "3", "--max-iter", "20", "--seed", "5", "--algos", "jbiht,genie-ls"};

    auto args1 = base_args;
    args1.insert(args1.end(), {"--out", out1.string()});
    auto args2 = base_args;
    args2.insert(args2.end(), {"--out", out2.string(), "--jobs", "2"});

    CHECK(run_with(args1) == 0);
    CHECK(run_with(args2) == 0);
    const std::string text1 = slurp(out1);
    CHECK(text1 == slurp(out2));
    CHECK(std::count(text1.begin(), text1.end(), '\n') == 3);  // header + 2 algos

    // An infeasible sweep point is reported and flips the exit status.
    auto args3 = base_args;
    args3.insert(args3.end(), {"--out", out1.string(), "--sweep", "c=0,3"});
    CHECK(run_with(args3) == 1);
    const std::string text3 = slurp(out1);
    CHECK(text3.find("nan") != std::string::npos);

    // Unwritable output path.
    auto args4 = base_args;
    args4.insert(args4.end(), {"--out", (dir / "missing" / "x.csv").string()});
    CHECK(run_with(args4) == 3);

    std::filesystem::remove_all(dir);
}

TEST_CASE("channel dump lands on disk when requested") {
    const auto dir = std::filesystem::temp_directory_path() / "csit_cli_dump";
    std::filesystem::create_directories(dir);
    const auto dump = dir / "channels.json";
    const int status = run_with({"--M", "8", "--N", "1", "--K", "2", "--T", "4", "--s", "3",
                                 "--c", "0", "--trials", "1", "--max-iter", "5", "--out",
                                 (dir / "out.csv").string(), "--dump-channels", dump.string()});
    CHECK(status == 0);
    CHECK(std::filesystem::exists(dump));
    CHECK(slurp(dump).find("csit-channel-dump/1") != std::string::npos);
    std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
