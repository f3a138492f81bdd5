#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "csit/airlink.hpp"
#include "csit/channel.hpp"
#include "csit/cli.hpp"
#include "csit/evaluation.hpp"
#include "csit/recovery.hpp"

namespace py = pybind11;
using namespace csit;

namespace {

using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

ComplexMatrix matrix_from_numpy(const ComplexArray& array) {
    const auto buf = array.request();
    if (buf.ndim != 2) {
        throw DimensionError("expected a 2-D complex array");
    }
    const auto rows = static_cast<std::size_t>(buf.shape[0]);
    const auto cols = static_cast<std::size_t>(buf.shape[1]);
    ComplexMatrix out(rows, cols);
    const auto* src = static_cast<const std::complex<double>*>(buf.ptr);
    std::copy(src, src + rows * cols, out.data());
    return out;
}

py::array numpy_from_matrix(const ComplexMatrix& m) {
    py::array_t<std::complex<double>> out({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.size(), static_cast<std::complex<double>*>(out.request().ptr));
    return out;
}

py::array numpy_from_vector(const std::vector<cplx>& v) {
    py::array_t<std::complex<double>> out(v.size());
    std::copy(v.begin(), v.end(), static_cast<std::complex<double>*>(out.request().ptr));
    return out;
}

py::list numpy_list(const std::vector<ComplexMatrix>& matrices) {
    py::list out;
    for (const ComplexMatrix& m : matrices) out.append(numpy_from_matrix(m));
    return out;
}

RecoveryInput input_from_python(const std::vector<ComplexArray>& observations,
                                const ComplexArray& sensing,
                                const std::vector<std::size_t>& sparsity_bounds,
                                std::size_t common_bound, double step_size,
                                std::size_t max_iterations) {
    RecoveryInput input;
    for (const ComplexArray& obs : observations) input.observations.push_back(matrix_from_numpy(obs));
    input.sensing = matrix_from_numpy(sensing);
    input.sparsity_bounds = sparsity_bounds;
    input.common_bound = common_bound;
    input.step_size = step_size;
    input.max_iterations = max_iterations;
    return input;
}

py::dict result_to_python(const RecoveryResult& result) {
    py::dict out;
    out["antenna_estimates"] = numpy_list(result.antenna_estimates);
    out["angular_estimates"] = numpy_list(result.angular_estimates);
    out["supports"] = result.supports.per_user;
    out["common_support"] = result.supports.common;
    out["iterations"] = result.iterations;
    out["consistent"] = result.consistent;
    out["sign_mismatches"] = result.sign_mismatches;
    out["mismatch_history"] = result.mismatch_history;
    return out;
}

py::dict outcome_to_python(const AlgorithmOutcome& outcome) {
    py::dict out;
    out["valid"] = outcome.valid;
    out["mean_loss_db"] = outcome.mean_loss_db;
    out["user_loss_db"] = outcome.user_loss_db;
    out["infinite_losses"] = outcome.infinite_losses;
    out["support_hit_rate"] = outcome.support_hit_rate;
    out["common_overlap"] = outcome.common_overlap;
    out["iterations"] = outcome.iterations;
    out["consistent"] = outcome.consistent;
    if (!outcome.valid) out["error"] = outcome.error;
    return out;
}

std::vector<Algorithm> algorithms_from_python(const std::optional<std::vector<std::string>>& names) {
    if (!names) {
        return {kAllAlgorithms.begin(), kAllAlgorithms.end()};
    }
    std::vector<Algorithm> algorithms;
    for (const std::string& name : *names) {
        const auto algorithm = algorithm_from_name(name);
        if (!algorithm) throw ConfigError("unknown algorithm: " + name);
        algorithms.push_back(*algorithm);
    }
    return algorithms;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "One-bit feedback CSIT estimation: jointly sparse channel synthesis, sign "
              "quantized feedback, J-BIHT recovery, and beamforming SNR-loss evaluation.";

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ZeroMatrixError>(m, "ZeroMatrixError", PyExc_ValueError);
    py::register_exception<EncodingError>(m, "EncodingError", PyExc_ValueError);
    py::register_exception<SingularSystemError>(m, "SingularSystemError", PyExc_ArithmeticError);
    py::register_exception<DegenerateResultError>(m, "DegenerateResultError",
                                                  PyExc_ArithmeticError);
    py::register_exception<DegenerateChannelError>(m, "DegenerateChannelError",
                                                   PyExc_ArithmeticError);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init([](std::size_t M, std::size_t N, std::size_t K, std::size_t T,
                         std::size_t s, std::size_t c, double snr_db, double mu,
                         std::size_t max_iter, std::size_t trials, std::uint64_t seed) {
                 ScenarioConfig cfg;
                 cfg.bts_antennas = M;
                 cfg.user_antennas = N;
                 cfg.users = K;
                 cfg.pilot_count = T;
                 cfg.sparsity_bound = s;
                 cfg.common_bound = c;
                 cfg.snr_db = snr_db;
                 cfg.step_size = mu;
                 cfg.max_iterations = max_iter;
                 cfg.trials = trials;
                 cfg.seed = seed;
                 return cfg;
             }),
             py::arg("M") = 128, py::arg("N") = 2, py::arg("K") = 10, py::arg("T") = 64,
             py::arg("s") = 10, py::arg("c") = 6, py::arg("snr_db") = 15.0,
             py::arg("mu") = 0.01, py::arg("max_iter") = 200, py::arg("trials") = 100,
             py::arg("seed") = 1)
        .def_readwrite("M", &ScenarioConfig::bts_antennas)
        .def_readwrite("N", &ScenarioConfig::user_antennas)
        .def_readwrite("K", &ScenarioConfig::users)
        .def_readwrite("T", &ScenarioConfig::pilot_count)
        .def_readwrite("s", &ScenarioConfig::sparsity_bound)
        .def_readwrite("c", &ScenarioConfig::common_bound)
        .def_readwrite("snr_db", &ScenarioConfig::snr_db)
        .def_readwrite("mu", &ScenarioConfig::step_size)
        .def_readwrite("max_iter", &ScenarioConfig::max_iterations)
        .def_readwrite("trials", &ScenarioConfig::trials)
        .def_readwrite("seed", &ScenarioConfig::seed)
        .def("validate", &ScenarioConfig::validate)
        .def("transmit_power", &ScenarioConfig::transmit_power);

    m.def("dft_unitary", [](std::size_t n) { return numpy_from_matrix(dft_unitary(n)); },
          py::arg("n"), "Unitary n-point DFT matrix.");

    m.def("quantize",
          [](const ComplexArray& z) { return numpy_from_matrix(quantize(matrix_from_numpy(z))); },
          py::arg("z"), "Per-entry one-bit quantizer: sign(Re) + 1j*sign(Im), sign(0) = +1.");

    m.def("pack_bits",
          [](const ComplexArray& signs) {
              const auto payload = pack_bits(matrix_from_numpy(signs));
              return py::bytes(reinterpret_cast<const char*>(payload.data()), payload.size());
          },
          py::arg("signs"), "Packs a sign matrix into the 2-bit-per-entry wire format.");

    m.def("unpack_bits",
          [](const py::bytes& payload, std::size_t t, std::size_t n) {
              const std::string raw = payload;
              return numpy_from_matrix(unpack_bits(
                  std::vector<std::uint8_t>(raw.begin(), raw.end()), t, n));
          },
          py::arg("payload"), py::arg("T"), py::arg("N"),
          "Decodes a feedback payload back into a T x N sign matrix.");

    m.def("design_pilots",
          [](std::size_t m_antennas, std::size_t t, double power, std::uint64_t seed) {
              RandomSource rng(seed);
              const PilotMatrix pilots = design_pilots(m_antennas, t, power, rng);
              return py::make_tuple(numpy_from_matrix(pilots.samples),
                                    numpy_from_matrix(pilots.angular_design));
          },
          py::arg("M"), py::arg("T"), py::arg("power"), py::arg("seed"),
          "Draws the sign design Z and returns (X, Z) with X = A_T Z.");

    m.def("to_antenna_domain",
          [](const ComplexArray& h_angular) {
              const ComplexMatrix h = matrix_from_numpy(h_angular);
              return numpy_from_matrix(to_antenna_domain(h, h.cols(), h.rows()));
          },
          py::arg("h_angular"), "Maps an N x M angular matrix to the antenna domain.");

    m.def("optimal_precoder",
          [](const ComplexArray& h) {
              return numpy_from_vector(optimal_precoder(matrix_from_numpy(h)));
          },
          py::arg("channel"), "Dominant eigenvector of H^H H.");

    m.def("snr_loss_db",
          [](const ComplexArray& h_true, const ComplexArray& h_est) {
              return snr_loss_db(matrix_from_numpy(h_true), matrix_from_numpy(h_est));
          },
          py::arg("true_channel"), py::arg("estimated_channel"),
          "Beamforming SNR degradation of the estimate, in dB.");

    m.def("jbiht",
          [](const std::vector<ComplexArray>& observations, const ComplexArray& sensing,
             const std::vector<std::size_t>& s, std::size_t c, double mu,
             std::size_t max_iter) {
              return result_to_python(
                  jbiht(input_from_python(observations, sensing, s, c, mu, max_iter)));
          },
          py::arg("observations"), py::arg("sensing"), py::arg("s"), py::arg("c"),
          py::arg("mu") = 0.01, py::arg("max_iter") = 200,
          "Joint binary iterative hard thresholding over all users.");

    m.def("biht",
          [](const ComplexArray& observation, const ComplexArray& sensing, std::size_t s,
             double mu, std::size_t max_iter) {
              return result_to_python(biht_individual(
                  input_from_python({observation}, sensing, {s}, 0, mu, max_iter)));
          },
          py::arg("observation"), py::arg("sensing"), py::arg("s"), py::arg("mu") = 0.01,
          py::arg("max_iter") = 200, "Per-user binary iterative hard thresholding.");

    m.def("jbiht_known_support",
          [](const std::vector<ComplexArray>& observations, const ComplexArray& sensing,
             const std::vector<std::vector<std::size_t>>& supports,
             const std::vector<std::size_t>& common, double mu, std::size_t max_iter) {
              std::vector<std::size_t> bounds;
              for (const auto& s : supports) bounds.push_back(s.size());
              SupportSet given;
              given.per_user = supports;
              given.common = common;
              return result_to_python(jbiht_known_support(
                  input_from_python(observations, sensing, bounds, 0, mu, max_iter), given));
          },
          py::arg("observations"), py::arg("sensing"), py::arg("supports"),
          py::arg("common") = std::vector<std::size_t>{}, py::arg("mu") = 0.01,
          py::arg("max_iter") = 200, "The same iteration thresholded to the given supports.");

    m.def("genie_ls",
          [](const ComplexArray& received, const ComplexArray& sensing,
             const std::vector<std::size_t>& support) {
              return result_to_python(
                  genie_ls(matrix_from_numpy(received), matrix_from_numpy(sensing), support));
          },
          py::arg("received"), py::arg("sensing"), py::arg("support"),
          "Support-restricted least squares on unquantized feedback.");

    m.def("run_trial",
          [](const ScenarioConfig& cfg, std::size_t trial_index,
             const std::optional<std::vector<std::string>>& algorithms) {
              const TrialOutcome trial =
                  run_trial(cfg, trial_index, algorithms_from_python(algorithms));
              py::dict out;
              out["trial_seed"] = trial.trial_seed;
              py::dict outcomes;
              for (Algorithm algorithm : kAllAlgorithms) {
                  const auto& outcome = trial.outcome(algorithm);
                  if (outcome) {
                      outcomes[py::str(std::string(algorithm_name(algorithm)))] =
                          outcome_to_python(*outcome);
                  }
              }
              out["outcomes"] = outcomes;
              return out;
          },
          py::arg("config"), py::arg("trial_index") = 0, py::arg("algorithms") = py::none(),
          "One end-to-end Monte Carlo realization.");

    m.def("run_experiment",
          [](const ScenarioConfig& cfg, const std::string& parameter,
             const std::vector<double>& values,
             const std::optional<std::vector<std::string>>& algorithms, std::size_t jobs) {
              Sweep sweep;
              sweep.parameter = parameter;
              sweep.values = values;
              RunOptions options;
              options.algorithms = algorithms_from_python(algorithms);
              options.jobs = jobs;
              const ExperimentReport report = run_experiment(cfg, sweep, options);

              py::dict out;
              out["parameter"] = report.sweep.parameter;
              out["complete"] = report.complete();
              py::list points;
              for (const SweepPoint& point : report.points) {
                  py::dict p;
                  p["value"] = point.value;
                  p["feasible"] = point.feasible;
                  py::dict stats;
                  for (Algorithm algorithm : report.algorithms) {
                      const auto& s = point.stats_for(algorithm);
                      if (!s) continue;
                      py::dict entry;
                      entry["mean_loss_db"] = s->mean_loss_db;
                      entry["valid_trials"] = s->valid_trials;
                      entry["invalid_trials"] = s->invalid_trials;
                      entry["infinite_losses"] = s->infinite_losses;
                      stats[py::str(std::string(algorithm_name(algorithm)))] = entry;
                  }
                  p["stats"] = stats;
                  points.append(p);
              }
              out["points"] = points;
              std::ostringstream csv;
              emit_csv(report, csv);
              out["csv"] = csv.str();
              return out;
          },
          py::arg("config"), py::arg("parameter") = std::string{},
          py::arg("values") = std::vector<double>{}, py::arg("algorithms") = py::none(),
          py::arg("jobs") = 1,
          "Monte Carlo sweep; returns per-point statistics plus the CSV rendering.");

    m.attr("ALGORITHMS") = std::vector<std::string>{"biht", "jbiht", "jbiht-oracle", "genie-ls"};
    m.attr("__version__") = "0.1.0";
}
