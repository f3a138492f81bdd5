#include "csit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

namespace csit {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        throw DimensionError("entry count does not match rows x cols");
    }
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = (*this)(r, c);
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
    ComplexMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        out.entries_[i] = std::conj(entries_[i]);
    }
    return out;
}

double ComplexMatrix::frobenius_norm_sq() const {
    double acc = 0.0;
    for (const cplx& v : entries_) {
        acc += v.real() * v.real() + v.imag() * v.imag();
    }
    return acc;
}

double ComplexMatrix::frobenius_norm() const { return std::sqrt(frobenius_norm_sq()); }

bool ComplexMatrix::all_finite() const {
    for (const cplx& v : entries_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

bool ComplexMatrix::is_zero() const {
    for (const cplx& v : entries_) {
        if (v.real() != 0.0 || v.imag() != 0.0) return false;
    }
    return true;
}

ComplexMatrix& ComplexMatrix::operator*=(double scale) {
    for (cplx& v : entries_) v *= scale;
    return *this;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionError("matrix addition shape mismatch");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionError("matrix subtraction shape mismatch");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
}

void multiply_into(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matrix product shape mismatch: " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
    out = ComplexMatrix(a.rows(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        cplx* out_row = out.row(i);
        const cplx* a_row = a.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const cplx aip = a_row[p];
            if (aip.real() == 0.0 && aip.imag() == 0.0) continue;
            const cplx* b_row = b.row(p);
            for (std::size_t j = 0; j < m; ++j) {
                out_row[j] += aip * b_row[j];
            }
        }
    }
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out;
    multiply_into(a, b, out);
    return out;
}

ComplexMatrix adjoint_multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows()) {
        throw DimensionError("adjoint product shape mismatch");
    }
    ComplexMatrix out(a.cols(), b.cols());
    const std::size_t k = a.rows(), n = a.cols(), m = b.cols();
    for (std::size_t p = 0; p < k; ++p) {
        const cplx* a_row = a.row(p);
        const cplx* b_row = b.row(p);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx aconj = std::conj(a_row[i]);
            cplx* out_row = out.row(i);
            for (std::size_t j = 0; j < m; ++j) {
                out_row[j] += aconj * b_row[j];
            }
        }
    }
    return out;
}

ComplexMatrix multiply_adjoint(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError("product-adjoint shape mismatch");
    }
    ComplexMatrix out(a.rows(), b.rows());
    const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx* a_row = a.row(i);
        cplx* out_row = out.row(i);
        for (std::size_t j = 0; j < m; ++j) {
            const cplx* b_row = b.row(j);
            cplx acc{0.0, 0.0};
            for (std::size_t p = 0; p < k; ++p) {
                acc += a_row[p] * std::conj(b_row[p]);
            }
            out_row[j] = acc;
        }
    }
    return out;
}

ComplexMatrix dft_unitary(std::size_t n) {
    if (n == 0) {
        throw DimensionError("DFT size must be at least 1");
    }
    ComplexMatrix f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            // Reduce p*q mod n before forming the angle to keep the phase accurate
            // for large n.
            const std::size_t pq = (p * q) % n;
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(pq) / static_cast<double>(n);
            f(p, q) = cplx{scale * std::cos(angle), scale * std::sin(angle)};
        }
    }
    return f;
}

const ComplexMatrix& dft_unitary_cached(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<const ComplexMatrix>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, std::make_unique<const ComplexMatrix>(dft_unitary(n))).first;
    }
    return *it->second;
}

ComplexMatrix frobenius_normalize(const ComplexMatrix& a) {
    const double norm = a.frobenius_norm();
    if (norm == 0.0) {
        throw ZeroMatrixError("cannot normalize an all-zero matrix");
    }
    if (std::abs(norm - 1.0) <= 1e-12) {
        return a;
    }
    ComplexMatrix out = a;
    out *= 1.0 / norm;
    return out;
}

namespace {

void matvec(const ComplexMatrix& a, const std::vector<cplx>& v, std::vector<cplx>& out) {
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx* row = a.row(i);
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            acc += row[j] * v[j];
        }
        out[i] = acc;
    }
}

double vec_norm(const std::vector<cplx>& v) {
    double acc = 0.0;
    for (const cplx& x : v) acc += x.real() * x.real() + x.imag() * x.imag();
    return std::sqrt(acc);
}

}  // namespace

EigvecResult top_eigvec(const ComplexMatrix& a, double tol, int max_iter) {
    if (a.rows() != a.cols()) {
        throw DimensionError("dominant eigenvector requires a square matrix");
    }
    const std::size_t n = a.rows();
    EigvecResult result;
    result.vector.assign(n, cplx{1.0 / std::sqrt(static_cast<double>(n)), 0.0});
    if (n == 0) {
        throw DimensionError("dominant eigenvector requires n >= 1");
    }

    std::vector<cplx> next(n);
    double prev_lambda = -1.0;
    for (int it = 1; it <= max_iter; ++it) {
        result.iterations = it;
        matvec(a, result.vector, next);
        const double lambda = vec_norm(next);
        if (lambda == 0.0) {
            // Zero operator on the current iterate: the Rayleigh quotient is 0,
            // which is the top eigenvalue iff the matrix itself is zero.
            result.rayleigh = 0.0;
            result.converged = a.is_zero();
            return result;
        }
        const double inv = 1.0 / lambda;
        for (std::size_t i = 0; i < n; ++i) result.vector[i] = next[i] * inv;
        if (prev_lambda >= 0.0 && std::abs(lambda - prev_lambda) <= tol * lambda) {
            result.converged = true;
            break;
        }
        prev_lambda = lambda;
    }

    matvec(a, result.vector, next);
    cplx quad{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) quad += std::conj(result.vector[i]) * next[i];
    result.rayleigh = quad.real();
    return result;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ (a + 0x9E3779B97F4A7C15ULL));
    h = splitmix64(h ^ (b + 0xD1B54A32D192ED03ULL));
    return h;
}

double RandomSource::uniform01() {
    const std::uint64_t bits = gen_() >> 11;  // 53 random bits
    return static_cast<double>(bits + 1) * 0x1.0p-53;
}

std::size_t RandomSource::uniform_index(std::size_t n) {
    if (n == 0) {
        throw ConfigError("uniform_index requires n >= 1");
    }
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = (UINT64_MAX / span) * span;
    std::uint64_t x;
    do {
        x = gen_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % span);
}

double RandomSource::rademacher() { return (gen_() >> 63) ? 1.0 : -1.0; }

cplx RandomSource::gaussian() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return cplx{radius * std::cos(angle), radius * std::sin(angle)};
}

cplx RandomSource::noise() {
    if (noise_muted_) return cplx{0.0, 0.0};
    return gaussian();
}

std::vector<std::size_t> RandomSource::sample_without_replacement(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    return sample_from_pool(std::move(pool), k);
}

std::vector<std::size_t> RandomSource::sample_from_pool(std::vector<std::size_t> pool, std::size_t k) {
    if (k > pool.size()) {
        throw ConfigError("cannot sample more values than the pool holds");
    }
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_index(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace csit
