#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "csit/channel.hpp"
#include "csit/numerics.hpp"

namespace csit {

/// The four evaluated recovery schemes.
enum class Algorithm : std::size_t {
    Biht = 0,         // per-user baseline
    Jbiht = 1,        // joint recovery
    JbihtOracle = 2,  // joint recovery with the true supports given
    GenieLs = 3,      // least squares on unquantized feedback with true supports
};

inline constexpr std::array<Algorithm, 4> kAllAlgorithms{
    Algorithm::Biht, Algorithm::Jbiht, Algorithm::JbihtOracle, Algorithm::GenieLs};

std::string_view algorithm_name(Algorithm algorithm);
std::optional<Algorithm> algorithm_from_name(std::string_view name);

/// Max-SNR transmit precoder: the dominant eigenvector of H^H H.
std::vector<cplx> optimal_precoder(const ComplexMatrix& channel);

/// ||H w||^2 for a length-M precoder.
double beamforming_gain(const ComplexMatrix& channel, const std::vector<cplx>& precoder);

/// Output-SNR degradation in dB of beamforming with the estimate's precoder
/// instead of the true channel's: 10 log10(gain(w) / gain(w_est)), both gains
/// measured on the true channel. Returns +infinity when the estimated beam
/// falls in the true channel's null space. Invariant to the estimate's scale.
double snr_loss_db(const ComplexMatrix& true_channel, const ComplexMatrix& estimated_channel);

/// Per-trial, per-algorithm quality record.
struct AlgorithmOutcome {
    bool valid = false;
    std::string error;                 // populated when invalid
    double mean_loss_db = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> user_loss_db;  // may contain +inf entries
    std::size_t infinite_losses = 0;   // excluded from the mean, counted here
    double support_hit_rate = 0.0;     // fraction of users with estimated support covering the true one
    double common_overlap = 0.0;       // |estimated ∩ true| / c, or 1 when c = 0
    std::size_t iterations = 0;
    bool consistent = false;
};

struct TrialOutcome {
    std::uint64_t trial_seed = 0;
    std::array<std::optional<AlgorithmOutcome>, kAllAlgorithms.size()> by_algorithm;

    const std::optional<AlgorithmOutcome>& outcome(Algorithm algorithm) const {
        return by_algorithm[static_cast<std::size_t>(algorithm)];
    }
};

/// Swept parameter; an empty name denotes a single-point run of the base
/// configuration. Valid names: T, c, K, N, s, snr_db, trials.
struct Sweep {
    std::string parameter;
    std::vector<double> values;
};

struct RunOptions {
    std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
    std::size_t jobs = 1;
    bool verbose = false;
    std::ostream* diagnostics = nullptr;  // verbose sink; defaults to std::cerr
};

/// Aggregate statistics of one algorithm at one sweep point.
struct PointStats {
    double mean_loss_db = std::numeric_limits<double>::quiet_NaN();
    std::size_t valid_trials = 0;
    std::size_t invalid_trials = 0;
    std::size_t infinite_losses = 0;
};

struct SweepPoint {
    double value = 0.0;
    bool feasible = true;
    std::string infeasible_reason;
    std::array<std::optional<PointStats>, kAllAlgorithms.size()> stats;

    const std::optional<PointStats>& stats_for(Algorithm algorithm) const {
        return stats[static_cast<std::size_t>(algorithm)];
    }
};

struct ExperimentReport {
    ScenarioConfig base;
    Sweep sweep;
    std::vector<Algorithm> algorithms;
    std::vector<SweepPoint> points;

    /// True when every sweep point yielded a finite mean for every requested
    /// algorithm.
    bool complete() const;

    /// Mean loss at a sweep point; NaN when missing.
    double mean_at(std::size_t point_index, Algorithm algorithm) const;

    /// Trend metadata: the largest increase of the mean between adjacent
    /// sweep points (negative when strictly decreasing throughout).
    double max_adjacent_increase(Algorithm algorithm) const;
};

/// Returns a copy of the base configuration with one named parameter
/// replaced. Count parameters require integral values.
ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& parameter,
                                 double value);

/// Seed for one trial: mixes the master seed with the sweep-point and trial
/// indices so parallel schedules reproduce identical streams.
std::uint64_t trial_seed(const ScenarioConfig& cfg, std::size_t point_index,
                         std::size_t trial_index);

/// One end-to-end realization: draw channels, train, feed back, run the
/// requested algorithms on identical data, and score each against the true
/// channels. A degenerate result in one algorithm invalidates only that
/// algorithm's entry.
TrialOutcome run_trial(const ScenarioConfig& cfg, std::size_t trial_index,
                       const std::vector<Algorithm>& algorithms = {kAllAlgorithms.begin(),
                                                                   kAllAlgorithms.end()});

/// run_trial with an explicit seed (used by the sweep harness).
TrialOutcome run_trial_seeded(const ScenarioConfig& cfg, std::uint64_t seed,
                              const std::vector<Algorithm>& algorithms);

/// Monte Carlo sweep: cfg.trials independent realizations per sweep value,
/// reduced in trial order so the report is identical for any jobs count.
/// Infeasible sweep points are marked and skipped without aborting the run.
ExperimentReport run_experiment(const ScenarioConfig& cfg, const Sweep& sweep,
                                const RunOptions& options = {});

}  // namespace csit
