#include "csit/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace csit {

namespace {

// Hot-path products against the sensing matrix. Pilot blocks built from the
// +-sqrt(P/M) design make the sensing matrix purely real, which admits a
// cheaper kernel; arbitrary complex sensing matrices fall back to the
// generic one.
class SensingKernel {
public:
    explicit SensingKernel(const ComplexMatrix& sensing) : x_(sensing) {
        real_path_ = true;
        for (const cplx& v : sensing.entries()) {
            if (v.imag() != 0.0) {
                real_path_ = false;
                break;
            }
        }
        if (real_path_) {
            x_real_.resize(sensing.size());
            for (std::size_t i = 0; i < sensing.size(); ++i) {
                x_real_[i] = sensing.data()[i].real();
            }
        }
    }

    std::size_t measurements() const { return x_.rows(); }
    std::size_t unknowns() const { return x_.cols(); }

    // est(n, m) += scale * sum_t residual(t, n) * conj(x(t, m))
    void accumulate_adjoint(const ComplexMatrix& residual, double scale, ComplexMatrix& est) const {
        const std::size_t t_len = x_.rows(), m_len = x_.cols(), n_len = residual.cols();
        for (std::size_t t = 0; t < t_len; ++t) {
            const cplx* res_row = residual.row(t);
            for (std::size_t n = 0; n < n_len; ++n) {
                const cplx w = scale * res_row[n];
                if (w.real() == 0.0 && w.imag() == 0.0) continue;
                cplx* est_row = est.row(n);
                if (real_path_) {
                    const double* x_row = x_real_.data() + t * m_len;
                    for (std::size_t m = 0; m < m_len; ++m) {
                        est_row[m] += w * x_row[m];
                    }
                } else {
                    const cplx* x_row = x_.row(t);
                    for (std::size_t m = 0; m < m_len; ++m) {
                        est_row[m] += w * std::conj(x_row[m]);
                    }
                }
            }
        }
    }

    // fwd(t, n) = sum_m x(t, m) * est(n, m), optionally over a support only.
    void forward(const ComplexMatrix& est, const std::vector<std::size_t>* support,
                 ComplexMatrix& fwd) const {
        const std::size_t t_len = x_.rows(), m_len = x_.cols(), n_len = est.rows();
        for (std::size_t t = 0; t < t_len; ++t) {
            cplx* fwd_row = fwd.row(t);
            if (real_path_) {
                const double* x_row = x_real_.data() + t * m_len;
                for (std::size_t n = 0; n < n_len; ++n) {
                    const cplx* est_row = est.row(n);
                    cplx acc{0.0, 0.0};
                    if (support) {
                        for (std::size_t m : *support) acc += est_row[m] * x_row[m];
                    } else {
                        for (std::size_t m = 0; m < m_len; ++m) acc += est_row[m] * x_row[m];
                    }
                    fwd_row[n] = acc;
                }
            } else {
                const cplx* x_row = x_.row(t);
                for (std::size_t n = 0; n < n_len; ++n) {
                    const cplx* est_row = est.row(n);
                    cplx acc{0.0, 0.0};
                    if (support) {
                        for (std::size_t m : *support) acc += est_row[m] * x_row[m];
                    } else {
                        for (std::size_t m = 0; m < m_len; ++m) acc += est_row[m] * x_row[m];
                    }
                    fwd_row[n] = acc;
                }
            }
        }
    }

private:
    const ComplexMatrix& x_;
    std::vector<double> x_real_;
    bool real_path_ = false;
};

double sign_of(double v) { return v >= 0.0 ? 1.0 : -1.0; }

// residual = Q(prediction) - observation, components in {0, +-2}
void quantized_residual(const ComplexMatrix& prediction, const ComplexMatrix& observation,
                        ComplexMatrix& residual) {
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const cplx p = prediction.data()[i];
        const cplx y = observation.data()[i];
        residual.data()[i] =
            cplx{sign_of(p.real()) - y.real(), sign_of(p.imag()) - y.imag()};
    }
}

std::size_t count_sign_mismatches(const ComplexMatrix& prediction,
                                  const ComplexMatrix& observation) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const cplx p = prediction.data()[i];
        const cplx y = observation.data()[i];
        if (sign_of(p.real()) != y.real() || sign_of(p.imag()) != y.imag()) ++count;
    }
    return count;
}

void validate_input(const RecoveryInput& in) {
    if (in.observations.empty()) throw ConfigError("recovery requires at least one user");
    if (in.sensing.rows() == 0 || in.sensing.cols() == 0) {
        throw DimensionError("sensing matrix must be nonempty");
    }
    const std::size_t t_len = in.sensing.rows();
    const std::size_t n_len = in.observations.front().cols();
    for (const ComplexMatrix& obs : in.observations) {
        if (obs.rows() != t_len || obs.cols() != n_len || n_len == 0) {
            throw DimensionError("every observation block must be T x N");
        }
    }
    if (in.sparsity_bounds.size() != in.observations.size()) {
        throw ConfigError("one sparsity bound is required per user");
    }
    for (std::size_t s : in.sparsity_bounds) {
        if (s == 0 || s > in.sensing.cols()) {
            throw ConfigError("sparsity bounds must lie in [1, M]");
        }
    }
    const std::size_t min_s =
        *std::min_element(in.sparsity_bounds.begin(), in.sparsity_bounds.end());
    if (in.common_bound > min_s) {
        throw ConfigError("common support bound exceeds a user sparsity bound");
    }
    if (in.max_iterations == 0) throw ConfigError("max iterations must be at least 1");
    if (in.step_size < 0.0) throw ConfigError("step size must be nonnegative");
}

void validate_fixed_supports(const SupportSet& supports, std::size_t users, std::size_t m_len) {
    if (supports.per_user.size() != users) {
        throw ConfigError("fixed supports must cover every user");
    }
    for (const auto& s : supports.per_user) {
        if (s.empty()) throw ConfigError("fixed supports must be nonempty");
        for (std::size_t idx : s) {
            if (idx >= m_len) throw ConfigError("fixed support index out of range");
        }
    }
    for (std::size_t idx : supports.common) {
        if (idx >= m_len) throw ConfigError("fixed common support index out of range");
    }
}

void row_energies(const ComplexMatrix& est, std::vector<double>& energy) {
    const std::size_t n_len = est.rows(), m_len = est.cols();
    std::fill(energy.begin(), energy.end(), 0.0);
    for (std::size_t n = 0; n < n_len; ++n) {
        const cplx* row = est.row(n);
        for (std::size_t m = 0; m < m_len; ++m) {
            energy[m] += row[m].real() * row[m].real() + row[m].imag() * row[m].imag();
        }
    }
}

void zero_outside_support(ComplexMatrix& est, const std::vector<char>& keep) {
    const std::size_t n_len = est.rows(), m_len = est.cols();
    for (std::size_t n = 0; n < n_len; ++n) {
        cplx* row = est.row(n);
        for (std::size_t m = 0; m < m_len; ++m) {
            if (!keep[m]) row[m] = cplx{0.0, 0.0};
        }
    }
}

// Shared finalization: conjugate the transposed working estimate into row
// form, normalize, and map to the antenna domain.
void finalize_user(const ComplexMatrix& work, RecoveryResult& result) {
    if (!work.all_finite()) {
        throw DegenerateResultError("recovery iterate diverged to non-finite values");
    }
    const double norm = work.frobenius_norm();
    if (norm == 0.0) {
        throw DegenerateResultError("recovery produced an all-zero estimate");
    }
    const std::size_t n_len = work.rows(), m_len = work.cols();
    ComplexMatrix angular(n_len, m_len);
    const double inv = 1.0 / norm;
    for (std::size_t i = 0; i < work.size(); ++i) {
        angular.data()[i] = std::conj(work.data()[i]) * inv;
    }
    result.antenna_estimates.push_back(
        frobenius_normalize(to_antenna_domain(angular, m_len, n_len)));
    result.angular_estimates.push_back(std::move(angular));
}

RecoveryResult run_iterations(const RecoveryInput& in, const SupportSet* fixed) {
    validate_input(in);
    const std::size_t users = in.observations.size();
    const std::size_t t_len = in.sensing.rows();
    const std::size_t m_len = in.sensing.cols();
    const std::size_t n_len = in.observations.front().cols();
    if (fixed) validate_fixed_supports(*fixed, users, m_len);

    SensingKernel kernel(in.sensing);

    // Working estimates are stored transposed (N x M): row n holds the n-th
    // column of the M x N unknown.
    std::vector<ComplexMatrix> work(users, ComplexMatrix(n_len, m_len));
    std::vector<ComplexMatrix> forward(users, ComplexMatrix(t_len, n_len));
    for (std::size_t u = 0; u < users; ++u) {
        kernel.accumulate_adjoint(in.observations[u], 1.0, work[u]);
        kernel.forward(work[u], nullptr, forward[u]);
    }

    std::vector<std::vector<std::size_t>> selected(users);
    std::vector<std::vector<char>> keep(users, std::vector<char>(m_len, 0));
    std::vector<std::size_t> common;
    if (fixed) {
        selected = fixed->per_user;
        common = fixed->common;
        for (std::size_t u = 0; u < users; ++u) {
            for (std::size_t m : selected[u]) keep[u][m] = 1;
        }
    }

    std::vector<std::vector<double>> energy(users, std::vector<double>(m_len));
    std::vector<double> aggregate(m_len);
    std::vector<char> common_mask(m_len, 0);
    ComplexMatrix residual(t_len, n_len);

    RecoveryResult result;
    result.mismatch_history.reserve(in.max_iterations);

    for (std::size_t iter = 1; iter <= in.max_iterations; ++iter) {
        result.iterations = iter;

        for (std::size_t u = 0; u < users; ++u) {
            quantized_residual(forward[u], in.observations[u], residual);
            kernel.accumulate_adjoint(residual, -in.step_size, work[u]);
        }

        if (!fixed) {
            for (std::size_t u = 0; u < users; ++u) {
                row_energies(work[u], energy[u]);
            }
            if (in.common_bound > 0) {
                std::vector<std::vector<std::size_t>> candidates(users);
                for (std::size_t u = 0; u < users; ++u) {
                    candidates[u] = select_top_rows(energy[u], in.sparsity_bounds[u]);
                }
                std::fill(aggregate.begin(), aggregate.end(), 0.0);
                for (std::size_t u = 0; u < users; ++u) {
                    for (std::size_t m = 0; m < m_len; ++m) aggregate[m] += energy[u][m];
                }
                common = vote_common_support(candidates, aggregate, in.common_bound, m_len);
                std::fill(common_mask.begin(), common_mask.end(), 0);
                for (std::size_t m : common) common_mask[m] = 1;
                for (std::size_t u = 0; u < users; ++u) {
                    std::vector<std::size_t> extra = select_top_rows_excluding(
                        energy[u], in.sparsity_bounds[u] - in.common_bound, common_mask);
                    selected[u] = common;
                    selected[u].insert(selected[u].end(), extra.begin(), extra.end());
                    std::sort(selected[u].begin(), selected[u].end());
                }
            } else {
                common.clear();
                for (std::size_t u = 0; u < users; ++u) {
                    selected[u] = select_top_rows(energy[u], in.sparsity_bounds[u]);
                }
            }
            for (std::size_t u = 0; u < users; ++u) {
                std::fill(keep[u].begin(), keep[u].end(), 0);
                for (std::size_t m : selected[u]) keep[u][m] = 1;
            }
        }

        std::size_t mismatches = 0;
        for (std::size_t u = 0; u < users; ++u) {
            zero_outside_support(work[u], keep[u]);
            kernel.forward(work[u], &selected[u], forward[u]);
            mismatches += count_sign_mismatches(forward[u], in.observations[u]);
        }
        result.mismatch_history.push_back(mismatches);
        result.sign_mismatches = mismatches;
        if (mismatches == 0) {
            result.consistent = true;
            break;
        }
    }

    result.supports.per_user = selected;
    result.supports.common = common;
    result.antenna_estimates.reserve(users);
    result.angular_estimates.reserve(users);
    for (std::size_t u = 0; u < users; ++u) {
        finalize_user(work[u], result);
    }
    return result;
}

}  // namespace

RecoveryInput preprocess(const PilotMatrix& pilots, const std::vector<FeedbackFrame>& frames,
                         std::vector<std::size_t> sparsity_bounds, std::size_t common_bound,
                         double step_size, std::size_t max_iterations) {
    if (frames.empty()) throw ConfigError("preprocess requires at least one feedback frame");
    const std::size_t t_len = pilots.samples.cols();
    const std::size_t m_len = pilots.samples.rows();
    const std::size_t n_len = frames.front().rx_antennas;
    RecoveryInput input;
    input.observations.reserve(frames.size());
    for (const FeedbackFrame& frame : frames) {
        if (frame.pilot_count != t_len || frame.rx_antennas != n_len) {
            throw DimensionError("feedback frame shape does not match the pilot block");
        }
        input.observations.push_back(unpack_frame(frame));
    }
    input.sensing = multiply(pilots.samples.adjoint(), dft_unitary_cached(m_len));
    input.sparsity_bounds = std::move(sparsity_bounds);
    input.common_bound = common_bound;
    input.step_size = step_size;
    input.max_iterations = max_iterations;
    validate_input(input);
    return input;
}

RecoveryResult jbiht(const RecoveryInput& input) { return run_iterations(input, nullptr); }

RecoveryResult biht_individual(const RecoveryInput& input) {
    if (input.observations.size() != 1) {
        throw ConfigError("the per-user baseline takes exactly one observation block");
    }
    RecoveryInput single = input;
    single.common_bound = 0;
    return run_iterations(single, nullptr);
}

RecoveryResult jbiht_known_support(const RecoveryInput& input, const SupportSet& true_supports) {
    return run_iterations(input, &true_supports);
}

RecoveryResult genie_ls(const ComplexMatrix& received, const PilotMatrix& pilots,
                        const std::vector<std::size_t>& support) {
    return genie_ls(received,
                    multiply(pilots.samples.adjoint(), dft_unitary_cached(pilots.samples.rows())),
                    support);
}

RecoveryResult genie_ls(const ComplexMatrix& received, const ComplexMatrix& sensing,
                        const std::vector<std::size_t>& support) {
    const std::size_t m_len = sensing.cols();
    const std::size_t t_len = sensing.rows();
    const std::size_t n_len = received.rows();
    if (received.cols() != t_len) {
        throw DimensionError("received block must span the pilot interval");
    }
    if (support.empty()) throw ConfigError("least squares requires a nonempty support");
    if (support.size() > t_len) {
        throw ConfigError("least squares requires at least as many pilots as support entries");
    }
    for (std::size_t idx : support) {
        if (idx >= m_len) throw ConfigError("support index out of range");
    }

    const ComplexMatrix target = multiply(received.adjoint(), dft_unitary_cached(n_len));

    const std::size_t s_len = support.size();
    ComplexMatrix submatrix(t_len, s_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        for (std::size_t j = 0; j < s_len; ++j) {
            submatrix(t, j) = sensing(t, support[j]);
        }
    }

    // Normal equations with a Cholesky factorization; the support submatrix
    // is tall and well conditioned for sign-design pilots.
    ComplexMatrix gram = adjoint_multiply(submatrix, submatrix);
    ComplexMatrix rhs = adjoint_multiply(submatrix, target);

    double max_diag = 0.0;
    for (std::size_t j = 0; j < s_len; ++j) max_diag = std::max(max_diag, gram(j, j).real());
    const double pivot_floor = 1e-12 * max_diag;

    ComplexMatrix chol(s_len, s_len);
    for (std::size_t j = 0; j < s_len; ++j) {
        double diag = gram(j, j).real();
        for (std::size_t k = 0; k < j; ++k) {
            diag -= std::norm(chol(j, k));
        }
        if (!(diag > pivot_floor)) {
            throw SingularSystemError("support submatrix is rank deficient");
        }
        chol(j, j) = cplx{std::sqrt(diag), 0.0};
        for (std::size_t i = j + 1; i < s_len; ++i) {
            cplx acc = gram(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                acc -= chol(i, k) * std::conj(chol(j, k));
            }
            chol(i, j) = acc / chol(j, j).real();
        }
    }

    // Solve L z = rhs, then L^H w = z.
    ComplexMatrix coeffs = rhs;  // s x N
    for (std::size_t i = 0; i < s_len; ++i) {
        for (std::size_t n = 0; n < n_len; ++n) {
            cplx acc = coeffs(i, n);
            for (std::size_t k = 0; k < i; ++k) acc -= chol(i, k) * coeffs(k, n);
            coeffs(i, n) = acc / chol(i, i).real();
        }
    }
    for (std::size_t i = s_len; i-- > 0;) {
        for (std::size_t n = 0; n < n_len; ++n) {
            cplx acc = coeffs(i, n);
            for (std::size_t k = i + 1; k < s_len; ++k) {
                acc -= std::conj(chol(k, i)) * coeffs(k, n);
            }
            coeffs(i, n) = acc / chol(i, i).real();
        }
    }

    ComplexMatrix work(n_len, m_len);
    for (std::size_t j = 0; j < s_len; ++j) {
        for (std::size_t n = 0; n < n_len; ++n) {
            work(n, support[j]) = coeffs(j, n);
        }
    }

    RecoveryResult result;
    result.supports.per_user.push_back(support);
    result.iterations = 0;
    result.consistent = true;
    finalize_user(work, result);
    return result;
}

std::size_t consistency_check(const std::vector<ComplexMatrix>& hat_estimates,
                              const RecoveryInput& input) {
    if (hat_estimates.size() != input.observations.size()) {
        throw DimensionError("one estimate is required per user");
    }
    std::size_t total = 0;
    for (std::size_t u = 0; u < hat_estimates.size(); ++u) {
        const ComplexMatrix& est = hat_estimates[u];
        if (est.rows() != input.sensing.cols() || est.cols() != input.observations[u].cols()) {
            throw DimensionError("estimate must be M x N");
        }
        const ComplexMatrix prediction = multiply(input.sensing, est);
        total += count_sign_mismatches(prediction, input.observations[u]);
    }
    return total;
}

std::vector<std::size_t> select_top_rows(const std::vector<double>& row_energy, std::size_t k) {
    return select_top_rows_excluding(row_energy, k, std::vector<char>(row_energy.size(), 0));
}

std::vector<std::size_t> select_top_rows_excluding(const std::vector<double>& row_energy,
                                                   std::size_t k,
                                                   const std::vector<char>& excluded) {
    if (excluded.size() != row_energy.size()) {
        throw DimensionError("exclusion mask size mismatch");
    }
    std::vector<std::size_t> order;
    order.reserve(row_energy.size());
    for (std::size_t m = 0; m < row_energy.size(); ++m) {
        if (!excluded[m]) order.push_back(m);
    }
    if (k > order.size()) {
        throw ConfigError("cannot select more rows than are available");
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (row_energy[a] != row_energy[b]) return row_energy[a] > row_energy[b];
        return a < b;
    });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<std::size_t> vote_common_support(
    const std::vector<std::vector<std::size_t>>& candidate_supports,
    const std::vector<double>& aggregate_energy, std::size_t common_bound,
    std::size_t row_count) {
    if (common_bound > row_count) {
        throw ConfigError("common support bound exceeds the row count");
    }
    if (aggregate_energy.size() != row_count) {
        throw DimensionError("aggregate energy size mismatch");
    }
    std::vector<std::size_t> votes(row_count, 0);
    for (const auto& support : candidate_supports) {
        for (std::size_t m : support) {
            if (m >= row_count) throw DimensionError("candidate support index out of range");
            ++votes[m];
        }
    }
    std::vector<std::size_t> order(row_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (votes[a] != votes[b]) return votes[a] > votes[b];
        if (aggregate_energy[a] != aggregate_energy[b]) {
            return aggregate_energy[a] > aggregate_energy[b];
        }
        return a < b;
    });
    order.resize(common_bound);
    std::sort(order.begin(), order.end());
    return order;
}

}  // namespace csit
