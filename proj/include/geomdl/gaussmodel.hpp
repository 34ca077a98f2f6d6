#pragma once

// Zero-mean Gaussian model over d-dimensional observations: dataset handling
// (centering, unit normalization), empirical covariance, the dyadic scale
// exponent s (smallest integer with Sigma <= 2^{2s} I), the PCA split
// Sigma_r = S (diag(l_1..l_m) + lbar I_{d-m}) S^T, the reduced covariance
// Q = A q A^T + lbar B B^T, the log-likelihood, and the constrained MLE
// q_hat = clip(diag(l_1..l_m), [1, 2^{2s}]).

#include <cmath>
#include <string>
#include <vector>

#include "geomdl/errors.hpp"
#include "geomdl/symspace.hpp"

namespace geomdl {

struct Dataset {
    int d = 0;
    long N = 0;
    Matrix values;     // d x N, one observation per column
    Vector precision;  // fundamental precision per coordinate
};

inline Dataset make_dataset(const Matrix& values, const Vector& precision) {
    if (values.rows() < 1 || values.cols() < 1)
        throw invalid_input("make_dataset: empty data");
    if (!values.allFinite()) throw invalid_input("make_dataset: non-finite entries");
    if (precision.size() != values.rows())
        throw invalid_input("make_dataset: precision length must equal the dimension");
    for (Eigen::Index i = 0; i < precision.size(); ++i)
        if (!(precision[i] > 0.0)) throw invalid_input("make_dataset: precision must be positive");
    Dataset out;
    out.d = static_cast<int>(values.rows());
    out.N = static_cast<long>(values.cols());
    out.values = values;
    out.precision = precision;
    return out;
}

inline Dataset make_dataset(const Matrix& values) {
    return make_dataset(values, Vector::Ones(values.rows()));
}

// Subtracts the per-coordinate empirical mean.
inline Dataset center(const Dataset& data) {
    if (data.N < 2) throw insufficient_data("center: need at least 2 observations");
    Dataset out = data;
    const Vector mean = data.values.rowwise().mean();
    out.values = data.values.colwise() - mean;
    return out;
}

// Divides coordinate i by precision[i], removing the unit system; the result
// carries precision 1.
inline Dataset normalize(const Dataset& data) {
    Dataset out = data;
    for (int i = 0; i < data.d; ++i) out.values.row(i) /= data.precision[i];
    out.precision = Vector::Ones(data.d);
    return out;
}

// True when every entry is an integer multiple of 1 within tol (the quantized
// data convention callers may want to warn about).
inline bool near_integer_entries(const Dataset& data, double tol = 1e-9) {
    for (int i = 0; i < data.d; ++i)
        for (long j = 0; j < data.N; ++j) {
            const double v = data.values(i, j);
            if (std::abs(v - std::round(v)) > tol) return false;
        }
    return true;
}

// Sigma = x^N (x^N)^T / N (data assumed centered).
inline SpdMatrix empirical_cov(const Dataset& data) {
    const SymMatrix sigma(Matrix(data.values * data.values.transpose() / static_cast<double>(data.N)));
    const auto [lam, vec] = eigh(sigma);
    if (!(lam(0) > 0.0) || lam(data.d - 1) <= kSpdTolerance * lam(0))
        throw rank_deficient(
            "empirical covariance is numerically rank-deficient; reduce the dimension or add samples");
    return spd_from_eigen(lam, vec);
}

// Smallest non-negative integer s with lambda_max(Sigma) <= 2^{2s} = 4^s.
inline int scale_exponent(const SpdMatrix& sigma) {
    const double lam_max = sigma.eigenvalues(0);
    int s = 0;
    double bound = 1.0;
    while (lam_max > bound) {
        bound *= 4.0;
        ++s;
    }
    return s;
}

struct PcaSplit {
    SpdMatrix sigma;      // full empirical covariance
    int m = 0;            // retained dimension
    Vector lambdas;       // all d eigenvalues, descending
    Matrix S;             // orthogonal eigenvector matrix
    Matrix A_block;       // d x m, top eigenvectors
    Matrix B_block;       // d x (d-m), isotropic complement (empty for m = d)
    double lambda_bar = 0.0;  // tail average (unused for m = d)
    SpdMatrix sigma_r;    // reduced covariance S (diag(l_1..l_m) + lbar I) S^T
    double Lambda = 0.0;  // Tr Sigma
};

// Keeps the top-m eigenspace and averages the tail variance so the trace is
// preserved: lbar = (Lambda - sum_{i<=m} l_i) / (d-m).
inline PcaSplit pca_split(const SpdMatrix& sigma, int m) {
    const int d = sigma.dim();
    if (m < 1 || m > d) throw invalid_input("pca_split: m must lie in [1, d]");
    PcaSplit out;
    out.sigma = sigma;
    out.m = m;
    out.lambdas = sigma.eigenvalues;
    out.S = sigma.eigenvectors;
    out.A_block = out.S.leftCols(m);
    out.B_block = out.S.rightCols(d - m);
    out.Lambda = out.lambdas.sum();
    Vector reduced = out.lambdas;
    if (m < d) {
        const double head = out.lambdas.head(m).sum();
        out.lambda_bar = (out.Lambda - head) / (d - m);
        for (int i = m; i < d; ++i) reduced[i] = out.lambda_bar;
    }
    out.sigma_r = spd_from_eigen(reduced, out.S);
    return out;
}

struct ReducedModel {
    PcaSplit split;
    SpdMatrix q;  // m x m, constrained to I <= q <= 2^{2s} I
    int s = 0;
    SpdMatrix Q;  // d x d, A q A^T + lbar B B^T
};

// Assembles Q from the split and a constrained q, validating membership of q
// in [I, 2^{2s} I] to tolerance 1e-9.
inline ReducedModel reduced_cov(const PcaSplit& split, const SpdMatrix& q, int s) {
    if (q.dim() != split.m) throw invalid_input("reduced_cov: q must be m x m");
    if (s < 0) throw invalid_input("reduced_cov: s must be >= 0");
    const double hi = std::pow(4.0, s);
    std::string offenders;
    for (Eigen::Index i = 0; i < q.eigenvalues.size(); ++i) {
        const double lam = q.eigenvalues(i);
        if (lam < 1.0 - 1e-9 || lam > hi * (1.0 + 1e-9) + 1e-9)
            offenders += (offenders.empty() ? "" : ", ") + std::to_string(lam);
    }
    if (!offenders.empty())
        throw constraint_violation("reduced_cov: q eigenvalues outside [1, 4^s]: " + offenders);
    Matrix Q = split.A_block * q.mat() * split.A_block.transpose();
    if (split.m < split.sigma.dim())
        Q += split.lambda_bar * split.B_block * split.B_block.transpose();
    ReducedModel out;
    out.split = split;
    out.q = q;
    out.s = s;
    out.Q = spd_from_sym(SymMatrix(Q));
    return out;
}

// log p(x^N | Q) = -(N/2) [d log 2pi + log det Q + Tr(Q^{-1} Sigma)]
// (data assumed centered; Sigma is its second-moment matrix).
inline double gauss_loglik(const Dataset& data, const SpdMatrix& Q) {
    if (Q.dim() != data.d) throw invalid_input("gauss_loglik: dimension mismatch");
    const double two_pi = 6.283185307179586476925286766559;
    const Matrix sigma = data.values * data.values.transpose() / static_cast<double>(data.N);
    const double trace_term = Q.solve(sigma).trace();
    return -0.5 * data.N * (data.d * std::log(two_pi) + logdet(Q) + trace_term);
}

// Constrained MLE q_hat = diag(clip(l_1..l_m, [1, 4^s])); exact when no
// clipping occurs (then Q(q_hat) = Sigma_r).
inline SpdMatrix mle_q(const PcaSplit& split, int s) {
    if (s < 0) throw invalid_input("mle_q: s must be >= 0");
    const double hi = std::pow(4.0, s);
    Vector diag(split.m);
    for (int i = 0; i < split.m; ++i)
        diag[i] = std::min(std::max(split.lambdas[i], 1.0), hi);
    return spd_diag(diag);
}

}  // namespace geomdl
