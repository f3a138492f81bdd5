#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "csit/errors.hpp"

namespace csit {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major storage. Values are immutable in spirit:
/// every operation returns a new matrix, so instances are safe to share
/// across threads once constructed.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return entries_.size(); }

    cplx& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    cplx* data() { return entries_.data(); }
    const cplx* data() const { return entries_.data(); }
    cplx* row(std::size_t r) { return entries_.data() + r * cols_; }
    const cplx* row(std::size_t r) const { return entries_.data() + r * cols_; }
    const std::vector<cplx>& entries() const { return entries_; }

    /// Conjugate transpose.
    ComplexMatrix adjoint() const;
    /// Plain transpose.
    ComplexMatrix transpose() const;
    ComplexMatrix conjugate() const;

    double frobenius_norm_sq() const;
    double frobenius_norm() const;
    bool all_finite() const;
    bool is_zero() const;

    ComplexMatrix& operator*=(double scale);
    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);

    friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> entries_;
};

/// out = a * b. Shapes must agree; throws DimensionError otherwise.
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);
void multiply_into(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out);

/// out = a^H * b without materializing the adjoint.
ComplexMatrix adjoint_multiply(const ComplexMatrix& a, const ComplexMatrix& b);

/// out = a * b^H without materializing the adjoint.
ComplexMatrix multiply_adjoint(const ComplexMatrix& a, const ComplexMatrix& b);

/// Unitary n-point DFT matrix: F[p][q] = exp(-j 2 pi p q / n) / sqrt(n).
/// Throws DimensionError for n = 0.
ComplexMatrix dft_unitary(std::size_t n);

/// Shared read-only cache of DFT matrices; safe across threads.
const ComplexMatrix& dft_unitary_cached(std::size_t n);

/// Scales a matrix to unit Frobenius norm. Inputs already within 1e-12 of
/// unit norm are returned unchanged, which makes the operation exactly
/// idempotent. Throws ZeroMatrixError on an all-zero input.
ComplexMatrix frobenius_normalize(const ComplexMatrix& a);

struct EigvecResult {
    std::vector<cplx> vector;  // unit l2 norm
    double rayleigh = 0.0;     // v^H A v at the returned vector
    int iterations = 0;
    bool converged = false;
};

/// Dominant eigenvector of a Hermitian PSD matrix by power iteration with a
/// deterministic all-ones start. Convergence: relative change of the iterate
/// norm below tol. On non-convergence the best iterate is returned with
/// converged = false.
EigvecResult top_eigvec(const ComplexMatrix& a, double tol = 1e-10, int max_iter = 1000);

/// Deterministic seed mixing for independent per-trial generators.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

/// Seeded deterministic random source. One owner at a time; parallel trials
/// must each construct their own from mix_seed(master, sweep, trial).
///
/// All continuous draws go through uniform01/gaussian below rather than
/// <random> distributions, so a seed reproduces the same stream on every
/// platform.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on (0, 1].
    double uniform01();

    /// Uniform integer in [0, n).
    std::size_t uniform_index(std::size_t n);

    /// Equiprobable +1 / -1.
    double rademacher();

    /// Circularly symmetric complex Gaussian CN(0,1): real and imaginary
    /// parts independent with variance 1/2 each.
    cplx gaussian();

    /// Noise draw: CN(0,1), or exactly zero when the noise channel is muted
    /// (test hook; muted draws consume no generator state).
    cplx noise();

    void mute_noise(bool muted) { noise_muted_ = muted; }
    bool noise_muted() const { return noise_muted_; }

    /// k distinct indices drawn uniformly from {0, ..., n-1}, ascending.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

    /// k distinct values drawn uniformly from the given pool, ascending.
    std::vector<std::size_t> sample_from_pool(std::vector<std::size_t> pool, std::size_t k);

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    bool noise_muted_ = false;
};

}  // namespace csit
