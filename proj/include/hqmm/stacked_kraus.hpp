// stacked_kraus.hpp
// The learner's optimization variable: all Kraus operators stacked vertically
// into an (n*s*w) x n matrix kappa with orthonormal columns. Row block
// (y, k) occupies rows [(y*w + k)*n, (y*w + k)*n + n).

#pragma once

#include <cstddef>
#include <stdexcept>

#include "hqmm/complex_matrix.hpp"
#include "hqmm/givens.hpp"
#include "hqmm/kraus.hpp"
#include "hqmm/linalg.hpp"
#include "hqmm/rng.hpp"

namespace hqmm {

struct StackedKraus {
    std::size_t n = 0;
    std::size_t s = 0;
    std::size_t w = 0;
    ComplexMatrix kappa;  // (n*s*w) x n

    std::size_t num_rows() const { return n * s * w; }

    double orthonormality_defect() const {
        return max_abs_diff(kappa.adjoint() * kappa, ComplexMatrix::identity(n));
    }

    void validate(double tol = 1e-8) const {
        if (kappa.rows() != num_rows() || kappa.cols() != n)
            throw std::invalid_argument("StackedKraus: kappa has wrong shape");
        if (orthonormality_defect() > tol)
            throw std::invalid_argument("StackedKraus: columns are not orthonormal");
    }
};

inline StackedKraus stack(const KrausSet& kraus) {
    StackedKraus sk;
    sk.n = kraus.n;
    sk.s = kraus.s;
    sk.w = kraus.w;
    sk.kappa = ComplexMatrix(sk.num_rows(), sk.n);
    for (std::size_t y = 0; y < kraus.s; ++y)
        for (std::size_t k = 0; k < kraus.w; ++k) {
            const std::size_t base = (y * kraus.w + k) * kraus.n;
            const ComplexMatrix& op = kraus.ops[y][k];
            if (op.rows() != kraus.n || op.cols() != kraus.n)
                throw std::invalid_argument("stack: operator has wrong shape");
            for (std::size_t r = 0; r < kraus.n; ++r)
                for (std::size_t c = 0; c < kraus.n; ++c) sk.kappa(base + r, c) = op(r, c);
        }
    return sk;
}

inline KrausSet unstack(const StackedKraus& sk) {
    if (sk.kappa.rows() != sk.num_rows() || sk.kappa.cols() != sk.n)
        throw std::invalid_argument("unstack: kappa has wrong shape");
    KrausSet ks = KrausSet::zeros(sk.n, sk.s, sk.w);
    for (std::size_t y = 0; y < sk.s; ++y)
        for (std::size_t k = 0; k < sk.w; ++k) {
            const std::size_t base = (y * sk.w + k) * sk.n;
            for (std::size_t r = 0; r < sk.n; ++r)
                for (std::size_t c = 0; c < sk.n; ++c) ks.ops[y][k](r, c) = sk.kappa(base + r, c);
        }
    return ks;
}

// Rotated copy; H is unitary so orthonormal columns stay orthonormal.
inline StackedKraus apply_rotation(const StackedKraus& sk, const HRotation& rot) {
    if (rot.i >= rot.j || rot.j >= sk.num_rows())
        throw std::invalid_argument("apply_rotation: row pair out of range");
    StackedKraus out = sk;
    apply_h_rows(out.kappa, rot);
    return out;
}

// Uniform draw over the orthonormal-column constraint set.
inline StackedKraus random_stacked_kraus(std::size_t n, std::size_t s, std::size_t w,
                                         Rng& rng) {
    StackedKraus sk;
    sk.n = n;
    sk.s = s;
    sk.w = w;
    sk.kappa = random_orthonormal_columns(n * s * w, n, rng);
    return sk;
}

}  // namespace hqmm
