// conversion.hpp
// Constructive bridges from classical HMMs to Kraus-operator models: the
// block-diagonal unitary built from a column-stochastic matrix, the full
// circuit-derived construction (ancilla + unitary + measurement), and the
// direct square-root construction. Both constructions reproduce classical
// filtering; they are compared at the level of sequence likelihoods since the
// unitary completion leaves phase freedom in the operators.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hqmm/complex_matrix.hpp"
#include "hqmm/density.hpp"
#include "hqmm/embeddings.hpp"
#include "hqmm/hmm.hpp"
#include "hqmm/kraus.hpp"
#include "hqmm/linalg.hpp"

namespace hqmm {

struct UnitaryMatrix {
    std::size_t dim = 0;
    ComplexMatrix mat;

    UnitaryMatrix() = default;
    explicit UnitaryMatrix(ComplexMatrix m) : dim(m.rows()), mat(std::move(m)) {
        if (!mat.square()) throw std::invalid_argument("UnitaryMatrix: matrix not square");
    }

    double unitarity_defect() const {
        return max_abs_diff(mat.adjoint() * mat, ComplexMatrix::identity(dim));
    }

    bool is_unitary(double tol = 1e-10) const { return unitarity_defect() <= tol; }

    void validate(double tol = 1e-10) const {
        if (!is_unitary(tol)) throw std::invalid_argument("UnitaryMatrix: U^dag U != I");
    }
};

namespace detail {

// s x s unitary whose first column is the elementwise square root of a
// stochastic column. The rest is a deterministic modified-Gram-Schmidt
// completion over the standard basis, so repeated runs agree exactly.
inline ComplexMatrix unitary_block_from_column(const std::vector<double>& column) {
    const std::size_t s = column.size();
    ComplexMatrix block(s, s);
    for (std::size_t i = 0; i < s; ++i) block(i, 0) = std::sqrt(column[i]);
    std::size_t filled = 1;
    for (std::size_t e = 0; e < s && filled < s; ++e) {
        std::vector<cdouble> v(s, 0.0);
        v[e] = 1.0;
        for (std::size_t k = 0; k < filled; ++k) {
            cdouble dot = 0.0;
            for (std::size_t i = 0; i < s; ++i) dot += std::conj(block(i, k)) * v[i];
            for (std::size_t i = 0; i < s; ++i) v[i] -= dot * block(i, k);
        }
        double norm = 0.0;
        for (const auto& z : v) norm += std::norm(z);
        norm = std::sqrt(norm);
        if (norm <= 1e-10) continue;
        for (std::size_t i = 0; i < s; ++i) block(i, filled) = v[i] / norm;
        ++filled;
    }
    if (filled != s)
        throw std::runtime_error("unitary_block_from_column: completion failed");
    return block;
}

}  // namespace detail

// Block-diagonal ns x ns unitary with one s x s block per column of the
// s x n column-stochastic input; block j's first column is sqrt(column j).
inline UnitaryMatrix col_stochastic_to_unitary(const RealMatrix& a, std::size_t s,
                                               std::size_t n) {
    if (a.size() != s) throw std::invalid_argument("col_stochastic_to_unitary: bad row count");
    for (const auto& row : a)
        if (row.size() != n)
            throw std::invalid_argument("col_stochastic_to_unitary: ragged matrix");
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
            if (a[i][j] < 0.0)
                throw std::invalid_argument("col_stochastic_to_unitary: negative entry");
            col += a[i][j];
        }
        if (std::abs(col - 1.0) > 1e-8)
            throw std::invalid_argument("col_stochastic_to_unitary: column does not sum to 1");
    }
    ComplexMatrix u(n * s, n * s);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> column(s);
        for (std::size_t i = 0; i < s; ++i) column[i] = a[i][j];
        const ComplexMatrix block = detail::unitary_block_from_column(column);
        for (std::size_t r = 0; r < s; ++r)
            for (std::size_t c = 0; c < s; ++c) u(j * s + r, j * s + c) = block(r, c);
    }
    return UnitaryMatrix(std::move(u));
}

// Circuit-derived construction: U1 from A evolves (state x ancilla) and is
// reduced to n operators K_w = V_w U1 W by tracing the old state; U2 from C
// plus a measurement gives s operators K_y = V_y P_y U2 W. The composite set
// K_y K_w (w branches per output) filters exactly like the classical HMM.
inline KrausSet hmm_to_hqmm_circuit(const HmmParams& params) {
    params.validate(1e-8);
    const std::size_t n = params.n, s = params.s;

    const UnitaryMatrix u1 = col_stochastic_to_unitary(params.A, n, n);
    const UnitaryMatrix u2 = col_stochastic_to_unitary(params.C, s, n);
    const EmbeddingMatrices em_nn = build_embeddings(n, n);
    const EmbeddingMatrices em_ns = build_embeddings(n, s);

    std::vector<ComplexMatrix> k_trans;
    k_trans.reserve(n);
    for (std::size_t w = 0; w < n; ++w)
        k_trans.push_back((em_nn.v_trace[w] * u1.mat) * em_nn.W);

    std::vector<ComplexMatrix> k_emit;
    k_emit.reserve(s);
    for (std::size_t y = 0; y < s; ++y) {
        const ComplexMatrix p = ProjectionMatrix::second_subsystem(n, s, y).to_matrix();
        k_emit.push_back(((em_ns.v_measured[y] * p) * u2.mat) * em_ns.W);
    }

    KrausSet ks = KrausSet::zeros(n, s, n);
    for (std::size_t y = 0; y < s; ++y)
        for (std::size_t w = 0; w < n; ++w) ks.ops[y][w] = k_emit[y] * k_trans[w];
    return ks;
}

// Direct construction: column w of K_{w,y} is the elementwise square root of
// column w of the observable operator T_y, everything else zero. Completeness
// is exact because sum_y T_y is column-stochastic.
inline KrausSet hmm_to_hqmm_sqrt(const HmmParams& params) {
    params.validate(1e-8);
    const std::size_t n = params.n, s = params.s;
    const ObservableOperatorSet t = observable_operators(params);
    KrausSet ks = KrausSet::zeros(n, s, n);
    for (std::size_t y = 0; y < s; ++y)
        for (std::size_t w = 0; w < n; ++w)
            for (std::size_t i = 0; i < n; ++i)
                ks.ops[y][w](i, w) = std::sqrt(t.T[y][i][w]);
    return ks;
}

}  // namespace hqmm
