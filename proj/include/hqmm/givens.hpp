// givens.hpp
// Complex two-row Givens-style rotations H(i, j, theta, phi, psi, delta) and
// the factorization of any unitary matrix into a product of them.
//
// The 2x2 core acting on rows (i, j) is
//   [  e^{i phi/2} e^{i psi}   cos(theta)    e^{i phi/2} e^{i delta} sin(theta) ]
//   [ -e^{i phi/2} e^{-i delta} sin(theta)   e^{i phi/2} e^{-i psi}  cos(theta) ]
// which is unitary for every angle choice, and exhausts U(2).

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hqmm/complex_matrix.hpp"
#include "hqmm/conversion.hpp"

namespace hqmm {

struct HRotation {
    std::size_t i = 0;
    std::size_t j = 1;  // i < j
    double theta = 0.0;
    double phi = 0.0;
    double psi = 0.0;
    double delta = 0.0;

    struct Core {
        cdouble ii, ij, ji, jj;
    };

    Core core() const {
        const cdouble half_phase = std::polar(1.0, 0.5 * phi);
        const double c = std::cos(theta);
        const double sn = std::sin(theta);
        return {half_phase * std::polar(1.0, psi) * c, half_phase * std::polar(1.0, delta) * sn,
                -half_phase * std::polar(1.0, -delta) * sn,
                half_phase * std::polar(1.0, -psi) * c};
    }

    HRotation adjoint() const { return {i, j, -theta, -phi, -psi, delta}; }

    bool is_identity(double tol = 1e-12) const {
        const Core c = core();
        return std::abs(c.ii - cdouble{1.0, 0.0}) <= tol && std::abs(c.ij) <= tol &&
               std::abs(c.ji) <= tol && std::abs(c.jj - cdouble{1.0, 0.0}) <= tol;
    }
};

inline UnitaryMatrix h_matrix(const HRotation& rot, std::size_t dim) {
    if (rot.i >= rot.j) throw std::invalid_argument("h_matrix: requires i < j");
    if (rot.j >= dim) throw std::invalid_argument("h_matrix: row index out of range");
    ComplexMatrix m = ComplexMatrix::identity(dim);
    const HRotation::Core c = rot.core();
    m(rot.i, rot.i) = c.ii;
    m(rot.i, rot.j) = c.ij;
    m(rot.j, rot.i) = c.ji;
    m(rot.j, rot.j) = c.jj;
    return UnitaryMatrix(std::move(m));
}

// Left-multiplies by H(rot) in place: rows i and j are combined, all other
// rows untouched.
inline void apply_h_rows(ComplexMatrix& m, const HRotation& rot) {
    if (rot.i >= rot.j) throw std::invalid_argument("apply_h_rows: requires i < j");
    if (rot.j >= m.rows()) throw std::invalid_argument("apply_h_rows: row index out of range");
    const HRotation::Core c = rot.core();
    for (std::size_t col = 0; col < m.cols(); ++col) {
        const cdouble ri = m(rot.i, col);
        const cdouble rj = m(rot.j, col);
        m(rot.i, col) = c.ii * ri + c.ij * rj;
        m(rot.j, col) = c.ji * ri + c.jj * rj;
    }
}

namespace detail {

// Rotation on rows (i, j) sending (x1, x2) to (sqrt(|x1|^2 + |x2|^2), 0);
// identity when both entries vanish.
inline HRotation zeroing_rotation(std::size_t i, std::size_t j, cdouble x1, cdouble x2) {
    HRotation rot{i, j, 0.0, 0.0, 0.0, 0.0};
    const double r1 = std::abs(x1);
    const double r2 = std::abs(x2);
    if (r1 < 1e-300 && r2 < 1e-300) return rot;
    rot.theta = std::atan2(r2, r1);
    rot.psi = r1 > 0.0 ? -std::arg(x1) : 0.0;
    rot.delta = r2 > 0.0 ? -std::arg(x2) : 0.0;
    return rot;
}

// Angles with H(i, j, ...) equal to a given 2x2 unitary block: pull the
// determinant phase out, then read the SU(2) remainder off directly.
inline HRotation rotation_from_2x2(std::size_t i, std::size_t j, cdouble b00, cdouble b01,
                                   cdouble b10, cdouble b11) {
    const cdouble det = b00 * b11 - b01 * b10;
    HRotation rot{i, j, 0.0, 0.0, 0.0, 0.0};
    rot.phi = std::arg(det);
    const cdouble unphase = std::polar(1.0, -0.5 * rot.phi);
    const cdouble a = unphase * b00;
    const cdouble b = unphase * b01;
    rot.theta = std::atan2(std::abs(b), std::abs(a));
    rot.psi = std::abs(a) > 1e-300 ? std::arg(a) : 0.0;
    rot.delta = std::abs(b) > 1e-300 ? std::arg(b) : 0.0;
    return rot;
}

}  // namespace detail

// Writes U as an ordered product of H rotations (first list element is the
// leftmost factor). Each leading column is reduced to a unit vector by
// zeroing rotations, which shrinks the live block by one; the surviving 2x2
// block is read off in closed form, so a 2x2 unitary factors into exactly
// one nontrivial rotation.
inline std::vector<HRotation> factor_unitary(const UnitaryMatrix& u, double tol = 1e-10) {
    u.validate(tol);
    const std::size_t dim = u.dim;
    if (dim == 0) return {};
    if (dim == 1) {
        if (std::abs(u.mat(0, 0) - cdouble{1.0, 0.0}) > 1e-10)
            throw std::invalid_argument("factor_unitary: 1x1 phase is not an H product");
        return {};
    }

    ComplexMatrix m = u.mat;
    std::vector<HRotation> applied;  // rotations with (applied_k ... applied_1) U = I

    for (std::size_t k = 0; k + 2 < dim; ++k) {
        for (std::size_t r = k + 1; r < dim; ++r) {
            const HRotation rot = detail::zeroing_rotation(k, r, m(k, k), m(r, k));
            if (rot.is_identity()) continue;
            apply_h_rows(m, rot);
            applied.push_back(rot);
        }
        // A residual diagonal phase would survive the zeroing pass only if the
        // whole subcolumn was already zero; push it into the next row.
        const cdouble d = m(k, k);
        if (std::abs(d - cdouble{1.0, 0.0}) > 1e-14) {
            const double alpha = std::arg(d);
            const HRotation fix{k, k + 1, 0.0, -alpha, -alpha / 2.0, 0.0};
            apply_h_rows(m, fix);
            applied.push_back(fix);
        }
    }

    // The remaining live block is 2x2 and unitary; fold it in one rotation.
    const std::size_t p = dim - 2, q = dim - 1;
    const HRotation tail =
        detail::rotation_from_2x2(p, q, m(p, p), m(p, q), m(q, p), m(q, q));
    std::vector<HRotation> factors;
    factors.reserve(applied.size() + 1);
    for (const HRotation& rot : applied) factors.push_back(rot.adjoint());
    if (!tail.is_identity()) factors.push_back(tail);
    return factors;
}

inline UnitaryMatrix product_of_rotations(const std::vector<HRotation>& factors,
                                          std::size_t dim) {
    ComplexMatrix m = ComplexMatrix::identity(dim);
    // Right-to-left application builds factors[0] * factors[1] * ... * I.
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) apply_h_rows(m, *it);
    return UnitaryMatrix(std::move(m));
}

}  // namespace hqmm
