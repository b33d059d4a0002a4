// complex_matrix.hpp
// Dense complex matrices with value semantics, row-major storage.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqmm {

using cdouble = std::complex<double>;

class ComplexMatrix {
public:
    ComplexMatrix() : rows_(0), cols_(0) {}

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix zero(std::size_t rows, std::size_t cols) {
        return ComplexMatrix(rows, cols);
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cdouble& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cdouble& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<cdouble>& data() const { return data_; }
    std::vector<cdouble>& data() { return data_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                out(j, i) = (*this)(i, j);
        return out;
    }

    cdouble trace() const {
        require_square("trace");
        cdouble t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double sum = 0.0;
        for (const auto& z : data_) sum += std::norm(z);
        return std::sqrt(sum);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : data_) m = std::max(m, std::abs(z));
        return m;
    }

    bool all_finite() const {
        for (const auto& z : data_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& other) {
        require_same_shape(other, "operator+=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
        return *this;
    }

    ComplexMatrix& operator-=(const ComplexMatrix& other) {
        require_same_shape(other, "operator-=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
        return *this;
    }

    ComplexMatrix& operator*=(cdouble scale) {
        for (auto& z : data_) z *= scale;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cdouble scale) { return a *= scale; }
    friend ComplexMatrix operator*(cdouble scale, ComplexMatrix a) { return a *= scale; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_)
            throw std::invalid_argument("matrix product: inner dimensions disagree (" +
                                        std::to_string(a.cols_) + " vs " + std::to_string(b.rows_) + ")");
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cdouble aik = a(i, k);
                if (aik == cdouble{0.0, 0.0}) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    out(i, j) += aik * b(k, j);
            }
        }
        return out;
    }

private:
    void require_square(const char* what) const {
        if (!square())
            throw std::invalid_argument(std::string(what) + ": matrix is not square");
    }
    void require_same_shape(const ComplexMatrix& other, const char* what) const {
        if (rows_ != other.rows_ || cols_ != other.cols_)
            throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }

    std::size_t rows_;
    std::size_t cols_;
    std::vector<cdouble> data_;
};

// Kronecker product; the second factor's index varies fastest.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
    if (ar != 0 && br != 0 && (ar > SIZE_MAX / br || ac > SIZE_MAX / bc))
        throw std::overflow_error("kron: product dimension overflows");
    ComplexMatrix out(ar * br, ac * bc);
    for (std::size_t i = 0; i < ar; ++i)
        for (std::size_t j = 0; j < ac; ++j) {
            const cdouble aij = a(i, j);
            if (aij == cdouble{0.0, 0.0}) continue;
            for (std::size_t k = 0; k < br; ++k)
                for (std::size_t l = 0; l < bc; ++l)
                    out(i * br + k, j * bc + l) = aij * b(k, l);
        }
    return out;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
    return a.rows() == b.rows() && a.cols() == b.cols() && max_abs_diff(a, b) <= tol;
}

}  // namespace hqmm
