#pragma once

#include <cstddef>
#include <vector>

#include "csit/airlink.hpp"
#include "csit/channel.hpp"
#include "csit/numerics.hpp"

namespace csit {

/// Inputs shared by the one-bit recovery algorithms, in the standard
/// measurement form: observations[i] is user i's T x N sign matrix, sensing
/// is the effective T x M matrix X^H A_T, and the unknowns are the M x N
/// conjugate-transposed angular channels. Consistency is exact sign
/// agreement between quantized predictions and the observations.
struct RecoveryInput {
    std::vector<ComplexMatrix> observations;   // T x N, entries in {+-1 +- j}
    ComplexMatrix sensing;                     // T x M
    std::vector<std::size_t> sparsity_bounds;  // s_i per user
    std::size_t common_bound = 0;              // c <= min s_i
    double step_size = 0.01;
    std::size_t max_iterations = 200;
};

/// Output of any recovery algorithm. Antenna-domain estimates carry unit
/// Frobenius norm; angular estimates are the matching N x M matrices with
/// exact zeros off the estimated support.
struct RecoveryResult {
    std::vector<ComplexMatrix> antenna_estimates;  // N x M, ||.||_F = 1
    std::vector<ComplexMatrix> angular_estimates;  // N x M
    SupportSet supports;                           // estimated S_i and C
    std::size_t iterations = 0;
    bool consistent = false;
    std::size_t sign_mismatches = 0;               // entries still violated at exit
    std::vector<std::size_t> mismatch_history;     // total per iteration
};

/// Builds the recovery input from a pilot block plus per-user feedback
/// frames: unpacks each frame and forms the effective sensing matrix.
RecoveryInput preprocess(const PilotMatrix& pilots, const std::vector<FeedbackFrame>& frames,
                         std::vector<std::size_t> sparsity_bounds, std::size_t common_bound,
                         double step_size, std::size_t max_iterations);

/// Joint binary iterative hard thresholding. Each iteration, in order:
/// a gradient step on every user's estimate, per-user candidate supports by
/// largest row group norms, a cross-user vote for the shared support,
/// per-user re-selection around the shared support, and hard thresholding.
/// Stops at exact sign consistency for all users or at max_iterations, then
/// maps estimates back to the antenna domain and normalizes.
RecoveryResult jbiht(const RecoveryInput& input);

/// Per-user baseline: the same iteration restricted to one user with the
/// shared-support steps skipped (equivalently c = 0). The input must hold
/// exactly one observation block.
RecoveryResult biht_individual(const RecoveryInput& input);

/// Genie baseline: the same gradient iteration, but every iteration hard
/// thresholds to the supplied true supports instead of estimating them.
RecoveryResult jbiht_known_support(const RecoveryInput& input, const SupportSet& true_supports);

/// Genie least squares on unquantized feedback: solves the support-restricted
/// LS problem per user via the normal equations and maps back. Requires
/// T >= |support|; throws SingularSystemError when the support submatrix is
/// rank deficient.
RecoveryResult genie_ls(const ComplexMatrix& received, const PilotMatrix& pilots,
                        const std::vector<std::size_t>& support);

/// Same solve with the effective sensing matrix already formed (it only
/// depends on the pilot block, so per-user calls can share it).
RecoveryResult genie_ls(const ComplexMatrix& received, const ComplexMatrix& sensing,
                        const std::vector<std::size_t>& support);

/// Number of measurement entries whose quantized prediction disagrees with
/// the observation, summed over users. Estimates are in the M x N working
/// shape. Zero means consistent.
std::size_t consistency_check(const std::vector<ComplexMatrix>& hat_estimates,
                              const RecoveryInput& input);

/// Indices of the k rows with the largest energies; ties broken toward the
/// lower index. Returned ascending.
std::vector<std::size_t> select_top_rows(const std::vector<double>& row_energy, std::size_t k);

/// Same selection restricted to rows not marked excluded.
std::vector<std::size_t> select_top_rows_excluding(const std::vector<double>& row_energy,
                                                   std::size_t k,
                                                   const std::vector<char>& excluded);

/// Shared-support vote: the c indices appearing in the most candidate
/// supports, ties broken by larger aggregate row energy then lower index.
std::vector<std::size_t> vote_common_support(
    const std::vector<std::vector<std::size_t>>& candidate_supports,
    const std::vector<double>& aggregate_energy, std::size_t common_bound, std::size_t row_count);

}  // namespace csit
