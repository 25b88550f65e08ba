#include "trisk/spd.hpp"

#include <algorithm>
#include <cmath>

namespace trisk {

SymMatrix SymMatrix::from_matrix(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("SymMatrix: input is not square");
    SymMatrix s(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            s.set(i, j, v);
        }
    }
    return s;
}

SymMatrix SymMatrix::identity(std::size_t n) {
    SymMatrix s(n);
    for (std::size_t i = 0; i < n; ++i) s.set(i, i, 1.0);
    return s;
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
    SymMatrix s(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) s.set(i, i, d[i]);
    return s;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double SymMatrix::max_diagonal() const {
    double m = n_ == 0 ? 0.0 : (*this)(0, 0);
    for (std::size_t i = 1; i < n_; ++i) m = std::max(m, (*this)(i, i));
    return m;
}

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

Matrix SymMatrix::to_matrix() const {
    Matrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
    return m;
}

namespace {

double off_diagonal_max(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

}  // namespace

EigenDecomposition jacobi_eigen(const SymMatrix& sym) {
    const std::size_t n = sym.dim();
    Matrix a = sym.to_matrix();
    Matrix v = Matrix::identity(n);
    if (n <= 1) {
        Vector vals(n);
        if (n == 1) vals[0] = a(0, 0);
        return {vals, v};
    }

    double diag_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) diag_scale += std::abs(a(i, i));
    // Absolute floor keeps the threshold meaningful for zero-trace inputs.
    const double threshold = 1e-14 * std::max(diag_scale, sym.max_abs() + 1e-300);

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps && off_diagonal_max(a) > threshold; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= threshold) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p);
                const double aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = akp - s * (akq + tau * akp);
                    a(p, k) = a(k, p);
                    a(k, q) = akq + s * (akp - tau * akq);
                    a(q, k) = a(k, q);
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = vkp - s * (vkq + tau * vkp);
                    v(k, q) = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }

    Vector values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
    return {values, v};
}

double spd_tolerance(const SymMatrix& a) { return 1e-12 * (1.0 + a.max_diagonal()); }

namespace {

// Shared entry point: decompose and validate positivity in one place.
EigenDecomposition spd_eigen(const SymMatrix& a) {
    EigenDecomposition eig = jacobi_eigen(a);
    const double tol = spd_tolerance(a);
    for (double lambda : eig.values) {
        if (!(lambda > tol)) throw NotSPD("matrix has an eigenvalue at or below the SPD tolerance");
    }
    return eig;
}

}  // namespace

bool is_spd(const SymMatrix& a) {
    if (a.dim() == 0) return false;
    EigenDecomposition eig = jacobi_eigen(a);
    const double tol = spd_tolerance(a);
    for (double lambda : eig.values) {
        if (!(lambda > tol)) return false;
    }
    return true;
}

SymMatrix spd_sqrt(const SymMatrix& a) {
    const EigenDecomposition eig = spd_eigen(a);
    const std::size_t n = a.dim();
    Matrix r(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += eig.vectors(i, k) * std::sqrt(eig.values[k]) * eig.vectors(j, k);
            r(i, j) = s;
        }
    }
    return SymMatrix::from_matrix(r);
}

Vector spd_solve(const SymMatrix& a, const Vector& b) {
    if (a.dim() != b.size()) throw DimensionMismatch("spd_solve: matrix/vector sizes differ");
    const EigenDecomposition eig = spd_eigen(a);
    const std::size_t n = a.dim();
    // x = V diag(1/lambda) V^T b
    Vector vtb(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) vtb[k] += eig.vectors(i, k) * b[i];
    for (std::size_t k = 0; k < n; ++k) vtb[k] /= eig.values[k];
    Vector x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) x[i] += eig.vectors(i, k) * vtb[k];
    return x;
}

Matrix spd_solve(const SymMatrix& a, const Matrix& b) {
    if (a.dim() != b.rows()) throw DimensionMismatch("spd_solve: matrix sizes differ");
    Matrix x(b.rows(), b.cols());
    Vector col(b.rows());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
        Vector xj = spd_solve(a, col);
        for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = xj[i];
    }
    return x;
}

double spd_logdet(const SymMatrix& a) {
    const EigenDecomposition eig = spd_eigen(a);
    double s = 0.0;
    for (double lambda : eig.values) s += std::log(lambda);
    return s;
}

}  // namespace trisk
