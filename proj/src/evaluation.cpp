#include "csit/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <thread>

#include "csit/airlink.hpp"
#include "csit/recovery.hpp"

namespace csit {

std::string_view algorithm_name(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::Biht: return "biht";
        case Algorithm::Jbiht: return "jbiht";
        case Algorithm::JbihtOracle: return "jbiht-oracle";
        case Algorithm::GenieLs: return "genie-ls";
    }
    return "unknown";
}

std::optional<Algorithm> algorithm_from_name(std::string_view name) {
    for (Algorithm algorithm : kAllAlgorithms) {
        if (algorithm_name(algorithm) == name) return algorithm;
    }
    return std::nullopt;
}

std::vector<cplx> optimal_precoder(const ComplexMatrix& channel) {
    if (channel.rows() == 0 || channel.cols() == 0) {
        throw DimensionError("precoder requires a nonempty channel");
    }
    if (channel.is_zero()) {
        throw DegenerateChannelError("no precoder exists for an all-zero channel");
    }
    const ComplexMatrix gram = adjoint_multiply(channel, channel);  // H^H H, M x M
    return top_eigvec(gram).vector;
}

double beamforming_gain(const ComplexMatrix& channel, const std::vector<cplx>& precoder) {
    if (precoder.size() != channel.cols()) {
        throw DimensionError("precoder length must match the transmit antenna count");
    }
    double gain = 0.0;
    for (std::size_t n = 0; n < channel.rows(); ++n) {
        const cplx* row = channel.row(n);
        cplx acc{0.0, 0.0};
        for (std::size_t m = 0; m < channel.cols(); ++m) {
            acc += row[m] * precoder[m];
        }
        gain += acc.real() * acc.real() + acc.imag() * acc.imag();
    }
    return gain;
}

namespace {

double loss_against_gain(const ComplexMatrix& true_channel, double true_gain,
                         const ComplexMatrix& estimate) {
    // The estimate's scale is irrelevant: normalize first so equal directions
    // produce bit-identical precoders.
    const std::vector<cplx> est_precoder = optimal_precoder(frobenius_normalize(estimate));
    const double est_gain = beamforming_gain(true_channel, est_precoder);
    if (est_gain == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(true_gain / est_gain);
}

}  // namespace

double snr_loss_db(const ComplexMatrix& true_channel, const ComplexMatrix& estimated_channel) {
    if (true_channel.rows() != estimated_channel.rows() ||
        true_channel.cols() != estimated_channel.cols()) {
        throw DimensionError("true channel and estimate must have equal shapes");
    }
    const std::vector<cplx> precoder = optimal_precoder(true_channel);
    const double true_gain = beamforming_gain(true_channel, precoder);
    return loss_against_gain(true_channel, true_gain, estimated_channel);
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& parameter,
                                 double value) {
    ScenarioConfig cfg = base;
    const auto as_count = [&](const char* name) {
        if (!(value >= 0.0) || value != std::floor(value) || value > 1e12) {
            throw ConfigError(std::string("sweep value for ") + name +
                              " must be a nonnegative integer");
        }
        return static_cast<std::size_t>(value);
    };
    if (parameter == "T") {
        cfg.pilot_count = as_count("T");
    } else if (parameter == "c") {
        cfg.common_bound = as_count("c");
    } else if (parameter == "K") {
        cfg.users = as_count("K");
    } else if (parameter == "N") {
        cfg.user_antennas = as_count("N");
    } else if (parameter == "s") {
        cfg.sparsity_bound = as_count("s");
    } else if (parameter == "trials") {
        cfg.trials = as_count("trials");
    } else if (parameter == "snr_db") {
        cfg.snr_db = value;
    } else {
        throw ConfigError("unknown sweep parameter: " + parameter +
                          " (expected one of T, c, K, N, s, snr_db, trials)");
    }
    return cfg;
}

std::uint64_t trial_seed(const ScenarioConfig& cfg, std::size_t point_index,
                         std::size_t trial_index) {
    return mix_seed(cfg.seed, point_index, trial_index);
}

namespace {

struct SupportMetrics {
    double hit_rate = 0.0;
    double common_overlap = 1.0;
};

bool contains_all(const std::vector<std::size_t>& estimated,
                  const std::vector<std::size_t>& truth) {
    // Both ascending.
    return std::includes(estimated.begin(), estimated.end(), truth.begin(), truth.end());
}

SupportMetrics support_metrics(const SupportSet& estimated, const SupportSet& truth,
                               std::size_t common_bound) {
    SupportMetrics metrics;
    std::size_t hits = 0;
    const std::size_t users = truth.per_user.size();
    for (std::size_t u = 0; u < users && u < estimated.per_user.size(); ++u) {
        if (contains_all(estimated.per_user[u], truth.per_user[u])) ++hits;
    }
    metrics.hit_rate = users ? static_cast<double>(hits) / static_cast<double>(users) : 0.0;
    if (common_bound > 0) {
        std::vector<std::size_t> overlap;
        std::set_intersection(estimated.common.begin(), estimated.common.end(),
                              truth.common.begin(), truth.common.end(),
                              std::back_inserter(overlap));
        metrics.common_overlap =
            static_cast<double>(overlap.size()) / static_cast<double>(common_bound);
    }
    return metrics;
}

AlgorithmOutcome score_estimates(const std::vector<ComplexMatrix>& estimates,
                                 const ChannelSet& channels, const std::vector<double>& true_gain,
                                 const SupportSet& estimated_supports, std::size_t common_bound,
                                 std::size_t iterations, bool consistent) {
    AlgorithmOutcome outcome;
    outcome.valid = true;
    outcome.iterations = iterations;
    outcome.consistent = consistent;
    double sum = 0.0;
    std::size_t finite = 0;
    for (std::size_t u = 0; u < estimates.size(); ++u) {
        const double loss =
            loss_against_gain(channels.antenna[u], true_gain[u], estimates[u]);
        outcome.user_loss_db.push_back(loss);
        if (std::isinf(loss)) {
            ++outcome.infinite_losses;
        } else {
            sum += loss;
            ++finite;
        }
    }
    if (finite == 0) {
        outcome.valid = false;
        outcome.error = "all user losses were infinite";
    } else {
        outcome.mean_loss_db = sum / static_cast<double>(finite);
    }
    const SupportMetrics metrics =
        support_metrics(estimated_supports, channels.supports, common_bound);
    outcome.support_hit_rate = metrics.hit_rate;
    outcome.common_overlap = metrics.common_overlap;
    return outcome;
}

AlgorithmOutcome invalid_outcome(const std::exception& e) {
    AlgorithmOutcome outcome;
    outcome.valid = false;
    outcome.error = e.what();
    return outcome;
}

}  // namespace

TrialOutcome run_trial_seeded(const ScenarioConfig& cfg, std::uint64_t seed,
                              const std::vector<Algorithm>& algorithms) {
    cfg.validate();
    RandomSource rng(seed);

    TrialOutcome trial;
    trial.trial_seed = seed;

    const SupportSet supports = draw_supports(cfg, rng);
    const ChannelSet channels = draw_channels(supports, cfg, rng);
    const PilotMatrix pilots =
        design_pilots(cfg.bts_antennas, cfg.pilot_count, cfg.transmit_power(), rng);

    std::vector<ComplexMatrix> received;
    std::vector<FeedbackFrame> frames;
    received.reserve(cfg.users);
    frames.reserve(cfg.users);
    for (std::size_t u = 0; u < cfg.users; ++u) {
        received.push_back(downlink_receive(channels.antenna[u], pilots, rng));
        frames.push_back(receiver_feedback(received.back(), cfg.user_antennas, u));
    }

    const RecoveryInput input =
        preprocess(pilots, frames, std::vector<std::size_t>(cfg.users, cfg.sparsity_bound),
                   cfg.common_bound, cfg.step_size, cfg.max_iterations);

    std::vector<double> true_gain(cfg.users);
    for (std::size_t u = 0; u < cfg.users; ++u) {
        true_gain[u] = beamforming_gain(channels.antenna[u],
                                        optimal_precoder(channels.antenna[u]));
    }

    const auto set_outcome = [&](Algorithm algorithm, AlgorithmOutcome outcome) {
        trial.by_algorithm[static_cast<std::size_t>(algorithm)] = std::move(outcome);
    };

    for (Algorithm algorithm : algorithms) {
        try {
            switch (algorithm) {
                case Algorithm::Jbiht: {
                    const RecoveryResult result = jbiht(input);
                    set_outcome(algorithm, score_estimates(result.antenna_estimates, channels,
                                                           true_gain, result.supports,
                                                           cfg.common_bound, result.iterations,
                                                           result.consistent));
                    break;
                }
                case Algorithm::JbihtOracle: {
                    const RecoveryResult result = jbiht_known_support(input, supports);
                    set_outcome(algorithm, score_estimates(result.antenna_estimates, channels,
                                                           true_gain, result.supports,
                                                           cfg.common_bound, result.iterations,
                                                           result.consistent));
                    break;
                }
                case Algorithm::Biht: {
                    std::vector<ComplexMatrix> estimates;
                    SupportSet estimated;
                    std::size_t iterations = 0;
                    bool consistent = true;
                    RecoveryInput single;
                    single.sensing = input.sensing;
                    single.common_bound = 0;
                    single.step_size = input.step_size;
                    single.max_iterations = input.max_iterations;
                    single.sparsity_bounds = {cfg.sparsity_bound};
                    for (std::size_t u = 0; u < cfg.users; ++u) {
                        single.observations = {input.observations[u]};
                        const RecoveryResult result = biht_individual(single);
                        estimates.push_back(result.antenna_estimates.front());
                        estimated.per_user.push_back(result.supports.per_user.front());
                        iterations = std::max(iterations, result.iterations);
                        consistent = consistent && result.consistent;
                    }
                    set_outcome(algorithm,
                                score_estimates(estimates, channels, true_gain, estimated,
                                                cfg.common_bound, iterations, consistent));
                    break;
                }
                case Algorithm::GenieLs: {
                    std::vector<ComplexMatrix> estimates;
                    SupportSet estimated;
                    for (std::size_t u = 0; u < cfg.users; ++u) {
                        const RecoveryResult result =
                            genie_ls(received[u], input.sensing, supports.per_user[u]);
                        estimates.push_back(result.antenna_estimates.front());
                        estimated.per_user.push_back(result.supports.per_user.front());
                    }
                    estimated.common = supports.common;
                    set_outcome(algorithm, score_estimates(estimates, channels, true_gain,
                                                           estimated, cfg.common_bound, 0, true));
                    break;
                }
            }
        } catch (const DegenerateResultError& e) {
            set_outcome(algorithm, invalid_outcome(e));
        } catch (const DegenerateChannelError& e) {
            set_outcome(algorithm, invalid_outcome(e));
        } catch (const SingularSystemError& e) {
            set_outcome(algorithm, invalid_outcome(e));
        } catch (const ZeroMatrixError& e) {
            set_outcome(algorithm, invalid_outcome(e));
        } catch (const ConfigError& e) {
            set_outcome(algorithm, invalid_outcome(e));
        }
    }
    return trial;
}

TrialOutcome run_trial(const ScenarioConfig& cfg, std::size_t trial_index,
                       const std::vector<Algorithm>& algorithms) {
    return run_trial_seeded(cfg, trial_seed(cfg, 0, trial_index), algorithms);
}

bool ExperimentReport::complete() const {
    for (const SweepPoint& point : points) {
        if (!point.feasible) return false;
        for (Algorithm algorithm : algorithms) {
            const auto& stats = point.stats_for(algorithm);
            if (!stats || !std::isfinite(stats->mean_loss_db)) return false;
        }
    }
    return true;
}

double ExperimentReport::mean_at(std::size_t point_index, Algorithm algorithm) const {
    if (point_index >= points.size()) return std::numeric_limits<double>::quiet_NaN();
    const auto& stats = points[point_index].stats_for(algorithm);
    return stats ? stats->mean_loss_db : std::numeric_limits<double>::quiet_NaN();
}

double ExperimentReport::max_adjacent_increase(Algorithm algorithm) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        worst = std::max(worst, mean_at(i + 1, algorithm) - mean_at(i, algorithm));
    }
    return worst;
}

namespace {

std::vector<TrialOutcome> run_point_trials(const ScenarioConfig& cfg, std::uint64_t master_seed,
                                           std::size_t point_index,
                                           const std::vector<Algorithm>& algorithms,
                                           std::size_t jobs) {
    std::vector<TrialOutcome> outcomes(cfg.trials);
    const auto run_one = [&](std::size_t t) {
        outcomes[t] = run_trial_seeded(cfg, mix_seed(master_seed, point_index, t), algorithms);
    };
    if (jobs <= 1 || cfg.trials <= 1) {
        for (std::size_t t = 0; t < cfg.trials; ++t) run_one(t);
        return outcomes;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(cfg.trials);
    const std::size_t workers = std::min<std::size_t>(jobs, cfg.trials);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t t = next.fetch_add(1);
                if (t >= cfg.trials) return;
                try {
                    run_one(t);
                } catch (...) {
                    failures[t] = std::current_exception();
                }
            }
        });
    }
    for (std::thread& worker : pool) worker.join();
    for (const std::exception_ptr& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    return outcomes;
}

PointStats reduce_point(const std::vector<TrialOutcome>& outcomes, Algorithm algorithm) {
    PointStats stats;
    double sum = 0.0;
    for (const TrialOutcome& trial : outcomes) {
        const auto& outcome = trial.outcome(algorithm);
        if (outcome && outcome->valid && std::isfinite(outcome->mean_loss_db)) {
            sum += outcome->mean_loss_db;
            ++stats.valid_trials;
            stats.infinite_losses += outcome->infinite_losses;
        } else {
            ++stats.invalid_trials;
        }
    }
    if (stats.valid_trials > 0) {
        stats.mean_loss_db = sum / static_cast<double>(stats.valid_trials);
    }
    return stats;
}

}  // namespace

ExperimentReport run_experiment(const ScenarioConfig& cfg, const Sweep& sweep,
                                const RunOptions& options) {
    if (options.algorithms.empty()) {
        throw ConfigError("at least one algorithm must be selected");
    }
    ExperimentReport report;
    report.base = cfg;
    report.sweep = sweep;
    report.algorithms = options.algorithms;

    const bool single_point = sweep.parameter.empty();
    const std::size_t point_count = single_point ? 1 : sweep.values.size();
    if (!single_point && sweep.values.empty()) {
        throw ConfigError("sweep requires at least one value");
    }

    std::ostream& diag = options.diagnostics ? *options.diagnostics : std::cerr;

    for (std::size_t i = 0; i < point_count; ++i) {
        SweepPoint point;
        point.value = single_point ? 0.0 : sweep.values[i];
        ScenarioConfig point_cfg = cfg;
        try {
            if (!single_point) {
                point_cfg = apply_sweep_value(cfg, sweep.parameter, sweep.values[i]);
            }
            point_cfg.validate();
        } catch (const ConfigError& e) {
            point.feasible = false;
            point.infeasible_reason = e.what();
            report.points.push_back(std::move(point));
            if (options.verbose) {
                diag << "point " << i << " infeasible: " << e.what() << "\n";
            }
            continue;
        }

        const std::vector<TrialOutcome> outcomes =
            run_point_trials(point_cfg, cfg.seed, i, options.algorithms, options.jobs);

        if (options.verbose) {
            for (std::size_t t = 0; t < outcomes.size(); ++t) {
                diag << "point=" << i << " value=" << point.value << " trial=" << t;
                for (Algorithm algorithm : options.algorithms) {
                    const auto& outcome = outcomes[t].outcome(algorithm);
                    diag << " " << algorithm_name(algorithm) << "=";
                    if (outcome && outcome->valid) {
                        diag << outcome->mean_loss_db << "dB(iters=" << outcome->iterations
                             << ",consistent=" << (outcome->consistent ? 1 : 0) << ")";
                    } else {
                        diag << "invalid";
                    }
                }
                diag << "\n";
            }
        }

        for (Algorithm algorithm : options.algorithms) {
            point.stats[static_cast<std::size_t>(algorithm)] =
                reduce_point(outcomes, algorithm);
        }
        report.points.push_back(std::move(point));
    }
    return report;
}

}  // namespace csit
