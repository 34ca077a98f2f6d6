#pragma once

// Symmetric / SPD matrix primitives and the coordinate system on the space of
// symmetric matrices (basis E_(ij), i <= j, row-major) used by every other
// module.  Dense algebra is delegated to Eigen.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "geomdl/errors.hpp"

namespace geomdl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative eigenvalue floor below which a matrix is treated as not PD.
inline constexpr double kSpdTolerance = 1e-12;

// Symmetric matrix; symmetry holds exactly because construction mirrors the
// upper triangle onto the lower one.
struct SymMatrix {
    Matrix entries;

    SymMatrix() = default;
    explicit SymMatrix(const Matrix& a) {
        if (a.rows() != a.cols())
            throw invalid_input("SymMatrix: matrix must be square");
        entries = a;
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = i + 1; j < a.cols(); ++j)
                entries(j, i) = entries(i, j);
    }

    int dim() const { return static_cast<int>(entries.rows()); }
    double operator()(int i, int j) const { return entries(i, j); }
};

inline SymMatrix sym_identity(int m) { return SymMatrix(Matrix::Identity(m, m)); }
inline SymMatrix sym_zero(int m) { return SymMatrix(Matrix::Zero(m, m)); }

// eigh: eigenvalues sorted descending, eigenvector columns to match.
inline std::pair<Vector, Matrix> eigh(const SymMatrix& a) {
    if (!a.entries.allFinite())
        throw invalid_input("eigh: non-finite entries");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.entries);
    if (solver.info() != Eigen::Success)
        throw accuracy_error("eigh: eigendecomposition failed to converge");
    const int d = a.dim();
    Vector lam(d);
    Matrix vec(d, d);
    for (int i = 0; i < d; ++i) {           // Eigen sorts ascending; flip
        lam(i) = solver.eigenvalues()(d - 1 - i);
        vec.col(i) = solver.eigenvectors().col(d - 1 - i);
    }
    return {lam, vec};
}

// SPD matrix bundled with its spectral decomposition (computed once, reused
// for inverses, log-dets and constraint checks).
struct SpdMatrix {
    SymMatrix base;
    Vector eigenvalues;   // descending, all strictly positive
    Matrix eigenvectors;  // orthogonal, columns match eigenvalues

    int dim() const { return base.dim(); }
    const Matrix& mat() const { return base.entries; }

    Matrix inverse() const {
        return eigenvectors * eigenvalues.cwiseInverse().asDiagonal() *
               eigenvectors.transpose();
    }
    // q^{-1} x without forming the inverse
    Matrix solve(const Matrix& x) const {
        return eigenvectors * eigenvalues.cwiseInverse().asDiagonal() *
               (eigenvectors.transpose() * x);
    }
};

inline SpdMatrix spd_from_sym(const SymMatrix& a) {
    auto [lam, vec] = eigh(a);
    const double lam_max = lam(0);
    const double lam_min = lam(a.dim() - 1);
    if (!(lam_max > 0.0) || lam_min <= kSpdTolerance * lam_max)
        throw not_positive_definite(
            "spd_from_sym: eigenvalue " + std::to_string(lam_min) +
            " below positive-definiteness floor (max " + std::to_string(lam_max) + ")");
    return SpdMatrix{a, std::move(lam), std::move(vec)};
}

inline SpdMatrix spd_from_eigen(const Vector& lam, const Matrix& vec) {
    SymMatrix base(vec * lam.asDiagonal() * vec.transpose());
    const double lam_max = lam.maxCoeff();
    const double lam_min = lam.minCoeff();
    if (!(lam_max > 0.0) || lam_min <= kSpdTolerance * lam_max)
        throw not_positive_definite("spd_from_eigen: eigenvalues not positive definite");
    // re-sort descending so the SpdMatrix invariant holds regardless of input order
    std::vector<int> idx(lam.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return lam(i) > lam(j); });
    Vector lam_sorted(lam.size());
    Matrix vec_sorted(vec.rows(), vec.cols());
    for (size_t i = 0; i < idx.size(); ++i) {
        lam_sorted(static_cast<Eigen::Index>(i)) = lam(idx[i]);
        vec_sorted.col(static_cast<Eigen::Index>(i)) = vec.col(idx[i]);
    }
    return SpdMatrix{std::move(base), std::move(lam_sorted), std::move(vec_sorted)};
}

inline SpdMatrix spd_identity(int m) {
    return SpdMatrix{sym_identity(m), Vector::Ones(m), Matrix::Identity(m, m)};
}

inline SpdMatrix spd_diag(const Vector& diag) {
    const int m = static_cast<int>(diag.size());
    return spd_from_eigen(diag, Matrix::Identity(m, m));
}

// log det via the eigenvalues; never forms the product (overflow safety).
inline double logdet(const SpdMatrix& a) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.eigenvalues.size(); ++i) {
        if (a.eigenvalues(i) <= 0.0)
            throw not_positive_definite("logdet: non-positive eigenvalue");
        acc += std::log(a.eigenvalues(i));
    }
    return acc;
}

// Basis E_(ij), i <= j, row-major: unit at (i,i) on the diagonal, ones at
// (i,j) and (j,i) off it.  Length m(m+1)/2.
inline std::vector<SymMatrix> sym_basis(int m) {
    if (m < 1) throw invalid_input("sym_basis: m must be >= 1");
    std::vector<SymMatrix> basis;
    basis.reserve(static_cast<size_t>(m) * (m + 1) / 2);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            Matrix e = Matrix::Zero(m, m);
            e(i, j) = 1.0;
            e(j, i) = 1.0;
            basis.push_back(SymMatrix(e));
        }
    return basis;
}

// Coordinates of a symmetric matrix over sym_basis ordering: the (i,j)
// entries with i <= j, row-major.  coords_to_sym is the exact inverse.
inline Vector sym_to_coords(const SymMatrix& a) {
    const int m = a.dim();
    Vector c(m * (m + 1) / 2);
    int k = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) c(k++) = a(i, j);
    return c;
}

inline SymMatrix coords_to_sym(int m, const Vector& c) {
    if (c.size() != m * (m + 1) / 2)
        throw invalid_input("coords_to_sym: coordinate length mismatch");
    Matrix a = Matrix::Zero(m, m);
    int k = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            a(i, j) = c(k);
            a(j, i) = c(k);
            ++k;
        }
    return SymMatrix(a);
}

} // namespace geomdl
