#pragma once

// Dense symmetric matrices and cyclic Jacobi eigendecomposition.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vcgap/errors.hpp"

namespace vcgap {

/// Row-major square matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t dim, double fill = 0.0) : dim_(dim), data_(dim * dim, fill) {}

    static Matrix identity(std::size_t dim) {
        Matrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const noexcept { return dim_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

inline double frobenius_distance(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) {
        const double d = a.data()[k] - b.data()[k];
        s += d * d;
    }
    return std::sqrt(s);
}

/// C = Aᵀ B
inline Matrix multiply_transposed(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.dim();
    Matrix c(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double aki = a(k, i);
            if (aki == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aki * b(k, j);
        }
    }
    return c;
}

/// C = A B
inline Matrix multiply(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.dim();
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

/// A = Q diag(values) Qᵀ; column k of Q is the eigenvector of values[k].
struct EigenDecomposition {
    std::vector<double> values;
    Matrix vectors;
    std::size_t sweeps = 0;
};

inline Matrix reconstruct(const EigenDecomposition& e) {
    const std::size_t n = e.vectors.dim();
    Matrix m(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lambda = e.values[k];
        if (lambda == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const double qi = e.vectors(i, k) * lambda;
            for (std::size_t j = 0; j < n; ++j) m(i, j) += qi * e.vectors(j, k);
        }
    }
    return m;
}

/**
 * Cyclic Jacobi sweeps until the off-diagonal mass falls below
 * tol·‖A‖_F. When `warm` is given the matrix is first rotated into that
 * basis, which is nearly diagonalizing for slowly changing inputs.
 */
inline EigenDecomposition jacobi_eigen(const Matrix& input, const Matrix* warm = nullptr, double tol = 1e-14,
                                       std::size_t max_sweeps = 100) {
    const std::size_t n = input.dim();
    Matrix a = input;
    // Row k of qt is eigenvector k, so rotations touch contiguous memory.
    Matrix qt = Matrix::identity(n);
    if (warm != nullptr && warm->dim() == n) {
        a = multiply_transposed(*warm, multiply(input, *warm));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) qt(k, i) = (*warm)(i, k);
    }
    double norm = 0.0;
    for (double x : input.data()) norm += x * x;
    norm = std::sqrt(norm);
    const double target = tol * std::max(norm, 1e-300);

    EigenDecomposition out;
    for (; out.sweeps < max_sweeps; ++out.sweeps) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (std::sqrt(2.0 * off) <= target) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                const double apr = a(p, r);
                if (std::abs(apr) <= 1e-300) continue;
                const double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // Rows p and r are contiguous; columns are mirrored afterwards.
                double* row_p = &a(p, 0);
                double* row_r = &a(r, 0);
                const double app = a(p, p);
                const double arr = a(r, r);
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = row_p[k];
                    const double ark = row_r[k];
                    row_p[k] = c * apk - s * ark;
                    row_r[k] = s * apk + c * ark;
                }
                a(p, p) = app - t * apr;
                a(r, r) = arr + t * apr;
                a(p, r) = 0.0;
                a(r, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == r) continue;
                    a(k, p) = row_p[k];
                    a(k, r) = row_r[k];
                }
                double* vec_p = &qt(p, 0);
                double* vec_r = &qt(r, 0);
                for (std::size_t k = 0; k < n; ++k) {
                    const double qp = vec_p[k];
                    const double qr = vec_r[k];
                    vec_p[k] = c * qp - s * qr;
                    vec_r[k] = s * qp + c * qr;
                }
            }
        }
    }
    if (out.sweeps == max_sweeps) throw SolverError("Jacobi eigensolver did not converge", out.sweeps);
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
    out.vectors = Matrix(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) out.vectors(i, k) = qt(k, i);
    return out;
}

} // namespace vcgap
