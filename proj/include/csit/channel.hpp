#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csit/numerics.hpp"

namespace csit {

/// Full parameter set for one simulated scenario.
///
/// Sparsity semantics: each user's angular support size is drawn uniformly
/// from {s-2, s-1, s} and the shared support size from {c, c+1}; recovery is
/// only ever given the bounds s and c, never the realized sizes.
struct ScenarioConfig {
    std::size_t bts_antennas = 128;    // M
    std::size_t user_antennas = 2;     // N
    std::size_t users = 10;            // K
    std::size_t pilot_count = 64;      // T
    std::size_t sparsity_bound = 10;   // s, upper bound on |S_i|
    std::size_t common_bound = 6;      // c, lower bound on |C| (0 = no shared scatterers)
    double snr_db = 15.0;
    double step_size = 0.01;           // gradient step for the BIHT family
    std::size_t max_iterations = 200;
    std::size_t trials = 100;
    std::uint64_t seed = 1;

    /// Per-pilot transmit power budget: P = 10^(snr_db / 10), with unit-variance
    /// noise as the reference.
    double transmit_power() const;

    /// Throws ConfigError on any contradictory combination (e.g. c > s, or
    /// support-size ranges that cannot nest).
    void validate() const;
};

/// Angular supports for one realization: per-user sets and the shared set.
struct SupportSet {
    std::vector<std::vector<std::size_t>> per_user;  // each ascending
    std::vector<std::size_t> common;                 // ascending, subset of every per_user[i]
};

/// Ground-truth channels for one realization. `angular[i]` is the N x M
/// angular-domain matrix of user i with all rows supported on
/// supports.per_user[i]; `antenna[i]` is its antenna-domain image.
struct ChannelSet {
    SupportSet supports;
    std::vector<ComplexMatrix> angular;
    std::vector<ComplexMatrix> antenna;
};

/// Draws the joint support structure: |C| ~ U{c, c+1} (empty when c = 0),
/// then each user's support as C plus a uniform completion from its
/// complement, with |S_i| ~ U{s-2, s-1, s}.
SupportSet draw_supports(const ScenarioConfig& cfg, RandomSource& rng);

/// Fills the supported angular entries with i.i.d. CN(0,1) and caches the
/// antenna-domain matrices.
ChannelSet draw_channels(const SupportSet& supports, const ScenarioConfig& cfg, RandomSource& rng);

/// Antenna-domain image of an N x M angular matrix under the unitary DFT
/// bases on both sides.
ComplexMatrix to_antenna_domain(const ComplexMatrix& h_angular, std::size_t bts_antennas,
                                std::size_t user_antennas);

/// Self-describing JSON debug dump of a realization (config, supports, and
/// angular matrices as row-major re/im pairs).
std::string dump_channels_json(const ScenarioConfig& cfg, const ChannelSet& channels);
void write_channel_dump(const std::string& path, const ScenarioConfig& cfg,
                        const ChannelSet& channels);

}  // namespace csit
