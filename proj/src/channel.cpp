#include "csit/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

namespace csit {

double ScenarioConfig::transmit_power() const { return std::pow(10.0, snr_db / 10.0); }

void ScenarioConfig::validate() const {
    if (bts_antennas == 0) throw ConfigError("M must be at least 1");
    if (user_antennas == 0) throw ConfigError("N must be at least 1");
    if (users == 0) throw ConfigError("K must be at least 1");
    if (pilot_count == 0) throw ConfigError("T must be at least 1");
    if (trials == 0) throw ConfigError("trials must be at least 1");
    if (max_iterations == 0) throw ConfigError("max-iter must be at least 1");
    if (!(step_size > 0.0)) throw ConfigError("mu must be positive");
    if (sparsity_bound < 3) {
        throw ConfigError("s must be at least 3 so the support size range {s-2, s-1, s} stays positive");
    }
    if (sparsity_bound > bts_antennas) {
        throw ConfigError("s = " + std::to_string(sparsity_bound) + " exceeds M = " +
                          std::to_string(bts_antennas));
    }
    if (common_bound > sparsity_bound) {
        throw ConfigError("c = " + std::to_string(common_bound) + " exceeds s = " +
                          std::to_string(sparsity_bound));
    }
    // The drawn shared support (size up to c+1) must fit inside the smallest
    // possible per-user support (size s-2).
    if (common_bound > 0 && common_bound + 1 > sparsity_bound - 2) {
        throw ConfigError("infeasible sparsity combination: |C| may reach " +
                          std::to_string(common_bound + 1) + " but |S_i| may be as small as " +
                          std::to_string(sparsity_bound - 2));
    }
}

SupportSet draw_supports(const ScenarioConfig& cfg, RandomSource& rng) {
    cfg.validate();
    const std::size_t m = cfg.bts_antennas;
    const std::size_t s = cfg.sparsity_bound;
    const std::size_t c = cfg.common_bound;

    SupportSet supports;
    if (c > 0) {
        const std::size_t common_size = c + rng.uniform_index(2);
        supports.common = rng.sample_without_replacement(m, common_size);
    }

    std::vector<char> in_common(m, 0);
    for (std::size_t idx : supports.common) in_common[idx] = 1;
    std::vector<std::size_t> complement;
    complement.reserve(m - supports.common.size());
    for (std::size_t idx = 0; idx < m; ++idx) {
        if (!in_common[idx]) complement.push_back(idx);
    }

    supports.per_user.resize(cfg.users);
    for (std::size_t i = 0; i < cfg.users; ++i) {
        const std::size_t user_size = s - 2 + rng.uniform_index(3);
        if (user_size < supports.common.size()) {
            throw ConfigError("drawn |S_i| smaller than |C|; scenario parameters are contradictory");
        }
        std::vector<std::size_t> extra =
            rng.sample_from_pool(complement, user_size - supports.common.size());
        std::vector<std::size_t> support = supports.common;
        support.insert(support.end(), extra.begin(), extra.end());
        std::sort(support.begin(), support.end());
        supports.per_user[i] = std::move(support);
    }
    return supports;
}

ChannelSet draw_channels(const SupportSet& supports, const ScenarioConfig& cfg, RandomSource& rng) {
    if (supports.per_user.size() != cfg.users) {
        throw DimensionError("support set does not match the configured user count");
    }
    ChannelSet set;
    set.supports = supports;
    set.angular.reserve(cfg.users);
    set.antenna.reserve(cfg.users);
    for (std::size_t i = 0; i < cfg.users; ++i) {
        ComplexMatrix h(cfg.user_antennas, cfg.bts_antennas);
        for (std::size_t n = 0; n < cfg.user_antennas; ++n) {
            for (std::size_t col : supports.per_user[i]) {
                h(n, col) = rng.gaussian();
            }
        }
        set.antenna.push_back(to_antenna_domain(h, cfg.bts_antennas, cfg.user_antennas));
        set.angular.push_back(std::move(h));
    }
    return set;
}

ComplexMatrix to_antenna_domain(const ComplexMatrix& h_angular, std::size_t bts_antennas,
                                std::size_t user_antennas) {
    if (h_angular.rows() != user_antennas || h_angular.cols() != bts_antennas) {
        throw DimensionError("angular channel must be N x M");
    }
    const ComplexMatrix& rx_basis = dft_unitary_cached(user_antennas);
    const ComplexMatrix& tx_basis = dft_unitary_cached(bts_antennas);
    return multiply_adjoint(multiply(rx_basis, h_angular), tx_basis);
}

namespace {

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (const cplx& v : m.entries()) {
        entries.push_back({v.real(), v.imag()});
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

}  // namespace

std::string dump_channels_json(const ScenarioConfig& cfg, const ChannelSet& channels) {
    nlohmann::json doc;
    doc["schema"] = "csit-channel-dump/1";
    doc["config"] = {
        {"M", cfg.bts_antennas},   {"N", cfg.user_antennas}, {"K", cfg.users},
        {"T", cfg.pilot_count},    {"s", cfg.sparsity_bound}, {"c", cfg.common_bound},
        {"snr_db", cfg.snr_db},    {"mu", cfg.step_size},     {"max_iter", cfg.max_iterations},
        {"trials", cfg.trials},    {"seed", cfg.seed},
    };
    doc["common_support"] = channels.supports.common;
    doc["users"] = nlohmann::json::array();
    for (std::size_t i = 0; i < channels.angular.size(); ++i) {
        doc["users"].push_back({
            {"user", i},
            {"support", channels.supports.per_user[i]},
            {"angular", matrix_to_json(channels.angular[i])},
        });
    }
    return doc.dump();
}

void write_channel_dump(const std::string& path, const ScenarioConfig& cfg,
                        const ChannelSet& channels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open channel dump path: " + path);
    }
    out << dump_channels_json(cfg, channels) << "\n";
    if (!out) {
        throw IoError("failed writing channel dump: " + path);
    }
}

}  // namespace csit
