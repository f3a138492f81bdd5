#include "csit/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

namespace csit {

namespace {

bool is_count_parameter(const std::string& parameter) {
    return parameter == "T" || parameter == "c" || parameter == "K" || parameter == "N" ||
           parameter == "s" || parameter == "trials";
}

Sweep parse_sweep_spec(const std::string& spec) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size()) {
        throw UsageError("--sweep expects <param>=<v1,v2,...>, got '" + spec + "'");
    }
    Sweep sweep;
    sweep.parameter = spec.substr(0, eq);
    if (sweep.parameter == "snr-db") sweep.parameter = "snr_db";
    if (!is_count_parameter(sweep.parameter) && sweep.parameter != "snr_db") {
        throw UsageError("unknown sweep parameter '" + sweep.parameter +
                         "' (expected one of T, c, K, N, s, snr_db, trials)");
    }
    std::stringstream values(spec.substr(eq + 1));
    std::string token;
    while (std::getline(values, token, ',')) {
        if (token.empty()) {
            throw UsageError("empty value in sweep list '" + spec + "'");
        }
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(token, &used);
        } catch (const std::exception&) {
            throw UsageError("malformed sweep value '" + token + "'");
        }
        if (used != token.size() || !std::isfinite(value)) {
            throw UsageError("malformed sweep value '" + token + "'");
        }
        if (is_count_parameter(sweep.parameter) &&
            (value < 0.0 || value != std::floor(value))) {
            throw UsageError("sweep values for " + sweep.parameter +
                             " must be nonnegative integers");
        }
        sweep.values.push_back(value);
    }
    if (sweep.values.empty()) {
        throw UsageError("sweep list for " + sweep.parameter + " is empty");
    }
    for (std::size_t i = 0; i + 1 < sweep.values.size(); ++i) {
        if (!(sweep.values[i] < sweep.values[i + 1])) {
            throw UsageError("sweep values must be strictly increasing");
        }
    }
    return sweep;
}

std::vector<Algorithm> parse_algorithms(const std::string& list) {
    std::vector<Algorithm> algorithms;
    std::stringstream stream(list);
    std::string token;
    while (std::getline(stream, token, ',')) {
        const auto algorithm = algorithm_from_name(token);
        if (!algorithm) {
            throw UsageError("unknown algorithm '" + token +
                             "' (expected biht, jbiht, jbiht-oracle, genie-ls)");
        }
        if (std::find(algorithms.begin(), algorithms.end(), *algorithm) == algorithms.end()) {
            algorithms.push_back(*algorithm);
        }
    }
    if (algorithms.empty()) {
        throw UsageError("--algos requires at least one algorithm");
    }
    return algorithms;
}

std::string format_fixed(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return buffer;
}

std::string format_sweep_value(const ExperimentReport& report, double value) {
    if (report.sweep.parameter.empty() || is_count_parameter(report.sweep.parameter)) {
        char buffer[32];
        std::snprintf(buffer, sizeof(buffer), "%lld", static_cast<long long>(value));
        return buffer;
    }
    return format_fixed(value);
}

}  // namespace

RunSpec parse_args(const std::vector<std::string>& args) {
    RunSpec spec;
    spec.algorithms.assign(kAllAlgorithms.begin(), kAllAlgorithms.end());

    CLI::App app{"One-bit feedback CSIT estimation simulator: jointly sparse channels,\n"
                 "binary pilot training, sign-quantized feedback, and J-BIHT recovery\n"
                 "scored by beamforming SNR loss against three baselines."};
    app.option_defaults()->always_capture_default();

    std::string sweep_spec;
    std::string algos_spec;
    app.add_option("--M", spec.config.bts_antennas, "BTS antenna count");
    app.add_option("--N", spec.config.user_antennas, "Antennas per user");
    app.add_option("--K", spec.config.users, "User count");
    app.add_option("--T", spec.config.pilot_count, "Pilot symbol count");
    app.add_option("--s", spec.config.sparsity_bound, "Per-user support size bound");
    app.add_option("--c", spec.config.common_bound, "Shared support size bound (0 disables)");
    app.add_option("--snr-db", spec.config.snr_db, "Transmit SNR in dB");
    app.add_option("--mu", spec.config.step_size, "Gradient step size");
    app.add_option("--max-iter", spec.config.max_iterations, "Iteration cap for the BIHT family");
    app.add_option("--trials", spec.config.trials, "Monte Carlo realizations per sweep point");
    app.add_option("--seed", spec.config.seed, "Master seed");
    app.add_option("--sweep", sweep_spec, "Swept parameter, e.g. T=32,64,96,128")
        ->type_name("PARAM=V1,V2,...");
    app.add_option("--algos", algos_spec,
                   "Comma list among biht,jbiht,jbiht-oracle,genie-ls (default all)");
    app.add_option("--out", spec.output_path, "CSV output path ('-' = stdout)");
    app.add_option("--jobs", spec.jobs, "Worker threads for trials (output is identical)");
    app.add_flag("--verbose", spec.verbose, "Per-trial diagnostics on stderr");
    app.add_option("--dump-channels", spec.channel_dump_path,
                   "Write a JSON dump of the first realization's channels");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("csit_sim");
    for (const std::string& arg : args) argv.push_back(arg.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (!sweep_spec.empty()) {
        spec.sweep = parse_sweep_spec(sweep_spec);
    }
    if (!algos_spec.empty()) {
        spec.algorithms = parse_algorithms(algos_spec);
    }
    if (spec.jobs == 0) {
        throw UsageError("--jobs must be at least 1");
    }
    try {
        spec.config.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    return spec;
}

void emit_csv(const ExperimentReport& report, std::ostream& out) {
    out << "sweep_param,sweep_value,algorithm,mean_snr_loss_db,trials,invalid_count,seed\n";
    const std::string param =
        report.sweep.parameter.empty() ? "none" : report.sweep.parameter;
    for (const SweepPoint& point : report.points) {
        std::size_t point_trials = report.base.trials;
        if (report.sweep.parameter == "trials" && point.feasible) {
            point_trials = static_cast<std::size_t>(point.value);
        }
        for (Algorithm algorithm : report.algorithms) {
            const auto& stats = point.stats_for(algorithm);
            double mean = std::numeric_limits<double>::quiet_NaN();
            std::size_t invalid = point_trials;
            std::size_t row_trials = point_trials;
            if (point.feasible && stats) {
                mean = stats->mean_loss_db;
                invalid = stats->invalid_trials;
                row_trials = stats->valid_trials + stats->invalid_trials;
            }
            out << param << ',' << format_sweep_value(report, point.value) << ','
                << algorithm_name(algorithm) << ',' << format_fixed(mean) << ',' << row_trials
                << ',' << invalid << ',' << report.base.seed << '\n';
        }
    }
}

void emit_csv(const ExperimentReport& report, const std::string& path) {
    if (path == "-") {
        emit_csv(report, std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open output path: " + path);
    }
    emit_csv(report, out);
    out.flush();
    if (!out) {
        throw IoError("failed writing output path: " + path);
    }
}

int run_cli(int argc, const char* const* argv) {
    RunSpec spec;
    try {
        spec = parse_args(std::vector<std::string>(argv + 1, argv + argc));
    } catch (const HelpRequested& help) {
        std::cout << help.text;
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n(run with --help for usage)\n";
        return 2;
    }

    try {
        if (!spec.channel_dump_path.empty()) {
            RandomSource rng(trial_seed(spec.config, 0, 0));
            const SupportSet supports = draw_supports(spec.config, rng);
            const ChannelSet channels = draw_channels(supports, spec.config, rng);
            write_channel_dump(spec.channel_dump_path, spec.config, channels);
        }

        RunOptions options;
        options.algorithms = spec.algorithms;
        options.jobs = spec.jobs;
        options.verbose = spec.verbose;
        const ExperimentReport report = run_experiment(spec.config, spec.sweep, options);
        emit_csv(report, spec.output_path);
        return report.complete() ? 0 : 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace csit
