// density.hpp
// Density matrices and the quantum analogues of probability operations:
// tensor product (joint distribution), partial trace (marginalization) and
// von Neumann projection (conditioning).

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hqmm/complex_matrix.hpp"
#include "hqmm/errors.hpp"
#include "hqmm/linalg.hpp"

namespace hqmm {

inline constexpr double kValidationTol = 1e-10;

// Hermitian, PSD, unit-trace complex matrix; the quantum belief state.
// Validation is opt-in: hot loops construct these without paying for an
// eigenvalue check.
struct DensityMatrix {
    std::size_t dim = 0;
    ComplexMatrix mat;

    DensityMatrix() = default;

    explicit DensityMatrix(ComplexMatrix m) : dim(m.rows()), mat(std::move(m)) {
        if (!mat.square()) throw std::invalid_argument("DensityMatrix: matrix not square");
    }

    static DensityMatrix maximally_mixed(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0 / static_cast<double>(n);
        return DensityMatrix(std::move(m));
    }

    static DensityMatrix basis_state(std::size_t n, std::size_t index) {
        if (index >= n) throw std::invalid_argument("basis_state: index out of range");
        ComplexMatrix m(n, n);
        m(index, index) = 1.0;
        return DensityMatrix(std::move(m));
    }

    static DensityMatrix from_diagonal(const std::vector<double>& probs) {
        ComplexMatrix m(probs.size(), probs.size());
        for (std::size_t i = 0; i < probs.size(); ++i) m(i, i) = probs[i];
        return DensityMatrix(std::move(m));
    }

    std::vector<double> diagonal() const {
        std::vector<double> d(dim);
        for (std::size_t i = 0; i < dim; ++i) d[i] = mat(i, i).real();
        return d;
    }

    bool is_valid(double herm_tol = kValidationTol, double trace_tol = kValidationTol,
                  double psd_tol = kValidationTol) const {
        if (!mat.all_finite()) return false;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = i; j < dim; ++j)
                if (std::abs(mat(i, j) - std::conj(mat(j, i))) > herm_tol) return false;
        if (std::abs(mat.trace() - cdouble{1.0, 0.0}) > trace_tol) return false;
        return hermitian_min_eigenvalue(mat) >= -psd_tol;
    }

    void validate(double herm_tol = kValidationTol, double trace_tol = kValidationTol,
                  double psd_tol = kValidationTol) const {
        if (!is_valid(herm_tol, trace_tol, psd_tol))
            throw std::invalid_argument("DensityMatrix: not Hermitian PSD with unit trace");
    }

    // Averages the matrix with its adjoint; cancels the asymmetry that builds
    // up over long filtering runs.
    void rehermitize() {
        for (std::size_t i = 0; i < dim; ++i) {
            mat(i, i) = cdouble{mat(i, i).real(), 0.0};
            for (std::size_t j = i + 1; j < dim; ++j) {
                const cdouble avg = 0.5 * (mat(i, j) + std::conj(mat(j, i)));
                mat(i, j) = avg;
                mat(j, i) = std::conj(avg);
            }
        }
    }
};

// Joint state of two systems; the second factor's basis index varies fastest,
// so basis order is |0>|0>, |0>|1>, ..., |1>|0>, ...
inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix(kron(a.mat, b.mat));
}

// Reduced state of the first subsystem: rho_A[i][j] = sum_k <ik|rho|jk>.
inline DensityMatrix partial_trace_second(const DensityMatrix& rho_ab, std::size_t n,
                                          std::size_t s) {
    if (n * s != rho_ab.dim)
        throw std::invalid_argument("partial_trace_second: dims (" + std::to_string(n) + "," +
                                    std::to_string(s) + ") do not factor " +
                                    std::to_string(rho_ab.dim));
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cdouble sum = 0.0;
            for (std::size_t k = 0; k < s; ++k) sum += rho_ab.mat(i * s + k, j * s + k);
            out(i, j) = sum;
        }
    return DensityMatrix(std::move(out));
}

// Reduced state of the second subsystem: rho_B[k][l] = sum_i <ik|rho|il>.
inline DensityMatrix partial_trace_first(const DensityMatrix& rho_ab, std::size_t n,
                                         std::size_t s) {
    if (n * s != rho_ab.dim)
        throw std::invalid_argument("partial_trace_first: dims (" + std::to_string(n) + "," +
                                    std::to_string(s) + ") do not factor " +
                                    std::to_string(rho_ab.dim));
    ComplexMatrix out(s, s);
    for (std::size_t k = 0; k < s; ++k)
        for (std::size_t l = 0; l < s; ++l) {
            cdouble sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += rho_ab.mat(i * s + k, i * s + l);
            out(k, l) = sum;
        }
    return DensityMatrix(std::move(out));
}

// Diagonal 0/1 matrix selecting the basis states compatible with an
// observation. Idempotent by construction.
struct ProjectionMatrix {
    std::size_t dim = 0;
    std::vector<std::size_t> observed;  // sorted, unique indices

    ProjectionMatrix(std::size_t d, std::vector<std::size_t> indices)
        : dim(d), observed(std::move(indices)) {
        for (std::size_t idx : observed)
            if (idx >= dim) throw std::invalid_argument("ProjectionMatrix: index out of range");
    }

    // Projector onto outcome y of the second subsystem of an (n x s) joint
    // state: keeps indices i*s + y.
    static ProjectionMatrix second_subsystem(std::size_t n, std::size_t s, std::size_t y) {
        if (y >= s) throw std::invalid_argument("ProjectionMatrix: outcome out of range");
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i * s + y;
        return ProjectionMatrix(n * s, std::move(idx));
    }

    ComplexMatrix to_matrix() const {
        ComplexMatrix m(dim, dim);
        for (std::size_t idx : observed) m(idx, idx) = 1.0;
        return m;
    }
};

// P rho P^dag and its trace (the outcome probability). The matrix comes back
// unnormalized; the caller renormalizes.
inline std::pair<ComplexMatrix, double> apply_projection(const DensityMatrix& rho,
                                                         const ProjectionMatrix& p) {
    if (rho.dim != p.dim)
        throw std::invalid_argument("apply_projection: dimension mismatch");
    ComplexMatrix out(rho.dim, rho.dim);
    double prob = 0.0;
    for (std::size_t a : p.observed) {
        prob += rho.mat(a, a).real();
        for (std::size_t b : p.observed) out(a, b) = rho.mat(a, b);
    }
    if (prob < kZeroProbability)
        throw impossible_observation("apply_projection: outcome has zero probability");
    return {std::move(out), prob};
}

}  // namespace hqmm
