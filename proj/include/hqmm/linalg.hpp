// linalg.hpp
// Small dense helpers: Jacobi eigenvalues for Hermitian matrices, column
// orthonormalization, and seeded random matrix constructors. Everything here
// targets the tiny dimensions this library works at (n*s*w in the tens).

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hqmm/complex_matrix.hpp"
#include "hqmm/rng.hpp"

namespace hqmm {

// Cyclic Jacobi sweeps on a real symmetric matrix (row-major, n*n).
// Returns the eigenvalues in ascending order.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double app = at(p, p);
                const double aqq = at(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

// Eigenvalues of a Hermitian matrix through the real-symmetric embedding
// [[Re H, -Im H], [Im H, Re H]]; each eigenvalue of H shows up twice.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
    if (!h.square()) throw std::invalid_argument("hermitian_eigenvalues: matrix not square");
    const std::size_t n = h.rows();
    std::vector<double> big(4 * n * n, 0.0);
    const std::size_t m = 2 * n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double re = h(i, j).real();
            const double im = h(i, j).imag();
            big[i * m + j] = re;
            big[(i + n) * m + (j + n)] = re;
            big[i * m + (j + n)] = -im;
            big[(i + n) * m + j] = im;
        }
    }
    const std::vector<double> doubled = symmetric_eigenvalues(std::move(big), m);
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
    return eig;
}

inline double hermitian_min_eigenvalue(const ComplexMatrix& h) {
    return hermitian_eigenvalues(h).front();
}

// Modified Gram-Schmidt on the columns of m, in place. Columns whose residual
// norm falls below drop_tol are rejected. Returns the number of columns kept;
// kept columns are packed to the left.
inline std::size_t orthonormalize_columns(ComplexMatrix& m, double drop_tol = 1e-12) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::size_t kept = 0;
    for (std::size_t j = 0; j < cols; ++j) {
        std::vector<cdouble> v(rows);
        for (std::size_t i = 0; i < rows; ++i) v[i] = m(i, j);
        for (std::size_t k = 0; k < kept; ++k) {
            cdouble dot = 0.0;
            for (std::size_t i = 0; i < rows; ++i) dot += std::conj(m(i, k)) * v[i];
            for (std::size_t i = 0; i < rows; ++i) v[i] -= dot * m(i, k);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < rows; ++i) norm += std::norm(v[i]);
        norm = std::sqrt(norm);
        if (norm <= drop_tol) continue;
        for (std::size_t i = 0; i < rows; ++i) m(i, kept) = v[i] / norm;
        ++kept;
    }
    for (std::size_t j = kept; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = 0.0;
    return kept;
}

inline ComplexMatrix random_gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = cdouble{rng.gaussian(), rng.gaussian()};
    return m;
}

// Orthonormal columns drawn from complex Gaussians (rows >= cols).
inline ComplexMatrix random_orthonormal_columns(std::size_t rows, std::size_t cols, Rng& rng) {
    if (cols > rows)
        throw std::invalid_argument("random_orthonormal_columns: more columns than rows");
    for (int attempt = 0; attempt < 16; ++attempt) {
        ComplexMatrix m = random_gaussian_matrix(rows, cols, rng);
        if (orthonormalize_columns(m) == cols) return m;
    }
    throw std::runtime_error("random_orthonormal_columns: degenerate draws");
}

inline ComplexMatrix random_unitary(std::size_t n, Rng& rng) {
    return random_orthonormal_columns(n, n, rng);
}

}  // namespace hqmm
