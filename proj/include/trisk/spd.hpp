// Symmetric positive-definite matrix kernel: Jacobi eigendecomposition,
// matrix square root, linear solve and log-determinant.
//
// All SPD checks share one tolerance rule: an eigenvalue is accepted only if
// it exceeds 1e-12 * (1 + largest diagonal entry). Smaller eigenvalues raise
// NotSPD instead of being clamped, so regularization is always an explicit
// caller decision.
#pragma once

#include <cstddef>

#include "trisk/linalg.hpp"

namespace trisk {

// Symmetric matrix with exact entrywise symmetry. Construction from a
// general square matrix symmetrizes as (A + A^T) / 2; mutation through set()
// writes both mirror entries.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    static SymMatrix from_matrix(const Matrix& a);
    static SymMatrix identity(std::size_t n);
    static SymMatrix diagonal(const Vector& d);

    std::size_t dim() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        data_[i * n_ + j] = v;
        data_[j * n_ + i] = v;
    }

    double trace() const;
    double max_diagonal() const;
    double max_abs() const;
    Matrix to_matrix() const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct EigenDecomposition {
    Vector values;    // unsorted, as produced by the rotation sweeps
    Matrix vectors;   // orthogonal; column j pairs with values[j]
};

// Cyclic Jacobi rotations; converges when every off-diagonal entry is below
// 1e-14 times the sum of absolute diagonal entries.
EigenDecomposition jacobi_eigen(const SymMatrix& a);

// Eigenvalue acceptance threshold: 1e-12 * (1 + max diagonal entry).
double spd_tolerance(const SymMatrix& a);

bool is_spd(const SymMatrix& a);

// Principal square root. r * r reproduces the input to roughly
// 1e-10 * (1 + max|a|). Throws NotSPD.
SymMatrix spd_sqrt(const SymMatrix& a);

// Solves a x = b through the eigendecomposition. Throws NotSPD,
// DimensionMismatch.
Vector spd_solve(const SymMatrix& a, const Vector& b);

// Column-wise solve: returns a^{-1} b. Throws NotSPD, DimensionMismatch.
Matrix spd_solve(const SymMatrix& a, const Matrix& b);

// log det a as the sum of eigenvalue logs. Throws NotSPD.
double spd_logdet(const SymMatrix& a);

}  // namespace trisk
