#pragma once

// Fisher information geometry: the metric in its outer-product and Hessian
// forms for finite-outcome models, the affine-invariant metric and scalar
// curvature of the SPD manifold P_m, and a finite-difference Ricci oracle
// for generic metric fields given in chart coordinates.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "geomdl/errors.hpp"
#include "geomdl/symspace.hpp"

namespace geomdl {

struct AxisSpec {
    double lower = 0.0;
    double upper = 1.0;
    bool periodic = false;
};

// Metric components theta -> g(theta) over an axis-aligned chart box.
struct MetricField {
    int n = 0;
    std::vector<AxisSpec> domain;
    std::function<SymMatrix(const Vector&)> components;
};

// Finite-outcome statistical model theta -> (p_1..p_K).
struct DiscreteModel {
    int n = 0;         // parameter dimension
    int outcomes = 0;  // K
    std::vector<AxisSpec> domain;
    std::function<Vector(const Vector&)> prob;
};

struct CurvatureData {
    Vector point;
    SymMatrix ricci;
    double scalar = 0.0;
};

namespace detail {

inline double axis_length(const AxisSpec& axis) { return axis.upper - axis.lower; }

// Central-difference step along one axis, shrunk near the (open) box edges so
// stencil points stay strictly inside.
inline double fd_step(const AxisSpec& axis, double x, double rel) {
    double h = rel * axis_length(axis);
    if (!axis.periodic) {
        const double room = 0.45 * std::min(x - axis.lower, axis.upper - x);
        if (room <= 0.0) throw domain_error("finite differences: point not interior to the domain");
        h = std::min(h, room);
    }
    return h;
}

inline Vector checked_prob(const DiscreteModel& model, const Vector& theta) {
    Vector p = model.prob(theta);
    if (p.size() != model.outcomes)
        throw invalid_input("discrete model: prob() returned wrong number of outcomes");
    double total = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]) || p[i] < -1e-12)
            throw invalid_input("discrete model: probabilities must be finite and nonnegative");
        total += p[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw invalid_input("discrete model: probabilities do not sum to 1");
    return p;
}

inline Vector positive_prob(const DiscreteModel& model, const Vector& theta) {
    Vector p = checked_prob(model, theta);
    for (int i = 0; i < p.size(); ++i)
        if (p[i] <= 1e-12) throw degenerate_model("discrete model: vanishing outcome probability");
    return p;
}

}  // namespace detail

// Outer-product form: g_{uv} = sum_i (1/p_i) (dp_i/dtheta^u)(dp_i/dtheta^v),
// derivatives by central differences.
inline SymMatrix fisher_outer(const DiscreteModel& model, const Vector& theta) {
    if (theta.size() != model.n) throw invalid_input("fisher_outer: theta has wrong dimension");
    const Vector p0 = detail::positive_prob(model, theta);
    const int n = model.n, K = model.outcomes;
    Matrix dp(K, n);
    for (int u = 0; u < n; ++u) {
        const double h = detail::fd_step(model.domain[u], theta[u], 1e-5);
        Vector lo = theta, hi = theta;
        hi[u] += h;
        lo[u] -= h;
        dp.col(u) = (detail::checked_prob(model, hi) - detail::checked_prob(model, lo)) / (2.0 * h);
    }
    Matrix g = Matrix::Zero(n, n);
    for (int i = 0; i < K; ++i) g += dp.row(i).transpose() * dp.row(i) / p0[i];
    return SymMatrix(g);
}

// Hessian form: g_{uv} = -E_theta[d^2 log p / dtheta^u dtheta^v], second
// derivatives of log p_i by central differences.
inline SymMatrix fisher_hessian(const DiscreteModel& model, const Vector& theta) {
    if (theta.size() != model.n) throw invalid_input("fisher_hessian: theta has wrong dimension");
    const Vector p0 = detail::positive_prob(model, theta);
    const int n = model.n, K = model.outcomes;
    auto log_p = [&](const Vector& t) {
        Vector p = detail::positive_prob(model, t);
        for (int i = 0; i < K; ++i) p[i] = std::log(p[i]);
        return p;
    };
    const Vector l0 = log_p(theta);
    std::vector<double> h(n);
    for (int u = 0; u < n; ++u) h[u] = detail::fd_step(model.domain[u], theta[u], 1e-4);
    Matrix g = Matrix::Zero(n, n);
    for (int u = 0; u < n; ++u) {
        for (int v = u; v < n; ++v) {
            Vector d2;
            if (u == v) {
                Vector hi = theta, lo = theta;
                hi[u] += h[u];
                lo[u] -= h[u];
                d2 = (log_p(hi) - 2.0 * l0 + log_p(lo)) / (h[u] * h[u]);
            } else {
                Vector pp = theta, pm = theta, mp = theta, mm = theta;
                pp[u] += h[u]; pp[v] += h[v];
                pm[u] += h[u]; pm[v] -= h[v];
                mp[u] -= h[u]; mp[v] += h[v];
                mm[u] -= h[u]; mm[v] -= h[v];
                d2 = (log_p(pp) - log_p(pm) - log_p(mp) + log_p(mm)) / (4.0 * h[u] * h[v]);
            }
            double acc = 0.0;
            for (int i = 0; i < K; ++i) acc -= p0[i] * d2[i];
            g(u, v) = g(v, u) = acc;
        }
    }
    return SymMatrix(g);
}

// Fisher matrix of the N-fold product model over K^N outcomes, returned next
// to the base matrix so callers can assert g_N = N * g.
inline std::pair<SymMatrix, SymMatrix> extensive_check(const DiscreteModel& model,
                                                       const Vector& theta, int N) {
    if (N < 1) throw invalid_input("extensive_check: N must be >= 1");
    double count = 1.0;
    for (int t = 0; t < N; ++t) count *= model.outcomes;
    if (count > 1e5) throw resource_error("extensive_check: K^N exceeds the enumeration budget");
    const long total = static_cast<long>(count);
    DiscreteModel product;
    product.n = model.n;
    product.outcomes = static_cast<int>(total);
    product.domain = model.domain;
    const int K = model.outcomes;
    product.prob = [&model, total, N, K](const Vector& t) {
        const Vector p = model.prob(t);
        Vector out(total);
        for (long idx = 0; idx < total; ++idx) {
            double prod = 1.0;
            long rest = idx;
            for (int pos = 0; pos < N; ++pos) {
                prod *= p[rest % K];
                rest /= K;
            }
            out[idx] = prod;
        }
        return out;
    };
    return {fisher_outer(product, theta), fisher_outer(model, theta)};
}

// Ratio between the Fisher metric and the pullback of the round-sphere metric
// under p -> (sqrt(p_1)..sqrt(p_K)); classically equal to 4 * identity.
inline Matrix simplex_sphere_factor(const DiscreteModel& model, const Vector& theta) {
    if (theta.size() != model.n) throw invalid_input("simplex_sphere_factor: theta has wrong dimension");
    detail::positive_prob(model, theta);
    const int n = model.n, K = model.outcomes;
    auto sqrt_p = [&](const Vector& t) {
        Vector p = detail::positive_prob(model, t);
        for (int i = 0; i < K; ++i) p[i] = std::sqrt(p[i]);
        return p;
    };
    Matrix ds(K, n);
    for (int u = 0; u < n; ++u) {
        const double h = detail::fd_step(model.domain[u], theta[u], 1e-5);
        Vector hi = theta, lo = theta;
        hi[u] += h;
        lo[u] -= h;
        ds.col(u) = (sqrt_p(hi) - sqrt_p(lo)) / (2.0 * h);
    }
    const Matrix pullback = ds.transpose() * ds;
    const Matrix fisher = fisher_outer(model, theta).entries;
    return pullback.ldlt().solve(fisher);
}

// Affine-invariant metric on P_m: <U, V>_q = (1/2) Tr(q^{-1} U q^{-1} V).
inline double pm_metric(const SpdMatrix& q, const SymMatrix& U, const SymMatrix& V) {
    const int m = q.dim();
    if (U.dim() != m || V.dim() != m) throw invalid_input("pm_metric: dimension mismatch");
    const Matrix qu = q.solve(U.entries);
    const Matrix qv = q.solve(V.entries);
    return 0.5 * (qu * qv).trace();
}

// Gram matrix of pm_metric over sym_basis(m): the metric in q_{ij} coordinates.
inline SymMatrix pm_metric_matrix(const SpdMatrix& q) {
    const int m = q.dim();
    const auto basis = sym_basis(m);
    const int n = static_cast<int>(basis.size());
    std::vector<Matrix> w(n);
    for (int a = 0; a < n; ++a) w[a] = q.solve(basis[a].entries);
    Matrix g(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) g(a, b) = g(b, a) = 0.5 * (w[a] * w[b]).trace();
    return SymMatrix(g);
}

// Scalar curvature of P_m (constant): R = -(m+2) m (m-1) / 4.
inline double pm_scalar_curvature(int m) {
    if (m < 1) throw invalid_input("pm_scalar_curvature: m must be >= 1");
    return -0.25 * (m + 2) * m * (m - 1);
}

// MetricField for P_m in q_{ij} coordinates (row-major over i <= j, matching
// sym_basis), on a box that comfortably contains q near the identity.
inline MetricField pm_metric_field(int m, double diag_hi = 6.0, double offdiag_hi = 3.0) {
    MetricField field;
    field.n = m * (m + 1) / 2;
    field.domain.resize(field.n);
    int a = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            field.domain[a++] = (i == j) ? AxisSpec{0.05, diag_hi, false}
                                         : AxisSpec{-offdiag_hi, offdiag_hi, false};
    field.components = [m](const Vector& coords) {
        const SymMatrix q = coords_to_sym(m, coords);
        return pm_metric_matrix(spd_from_sym(q));
    };
    return field;
}

namespace detail {

inline Matrix metric_at(const MetricField& field, const Vector& x) {
    const SymMatrix g = field.components(x);
    if (g.dim() != field.n) throw invalid_input("metric field returned wrong dimension");
    return g.entries;
}

inline Matrix metric_spd_at(const MetricField& field, const Vector& x) {
    const Matrix g = metric_at(field, x);
    const auto [evals, evecs] = eigh(SymMatrix(g));
    if (evals[evals.size() - 1] <= 0.0)
        throw domain_error("metric field not positive definite at a stencil point");
    return g;
}

// Christoffel symbols Gamma^r_{uv} at x from central differences of g.
// gamma[r](u, v) layout.
inline std::vector<Matrix> christoffels(const MetricField& field, const Vector& x,
                                        const std::vector<double>& h) {
    const int n = field.n;
    const Matrix g0 = metric_spd_at(field, x);
    std::vector<Matrix> dg(n);
    for (int u = 0; u < n; ++u) {
        Vector hi = x, lo = x;
        hi[u] += h[u];
        lo[u] -= h[u];
        dg[u] = (metric_spd_at(field, hi) - metric_spd_at(field, lo)) / (2.0 * h[u]);
    }
    const Matrix ginv = g0.ldlt().solve(Matrix::Identity(n, n));
    std::vector<Matrix> gamma(n, Matrix::Zero(n, n));
    for (int r = 0; r < n; ++r)
        for (int u = 0; u < n; ++u)
            for (int v = u; v < n; ++v) {
                double acc = 0.0;
                for (int l = 0; l < n; ++l)
                    acc += ginv(r, l) * (dg[u](l, v) + dg[v](l, u) - dg[l](u, v));
                gamma[r](u, v) = gamma[r](v, u) = 0.5 * acc;
            }
    return gamma;
}

// One finite-difference pass of the Ricci tensor at step scale h.
inline Matrix ricci_pass(const MetricField& field, const Vector& x, const std::vector<double>& h) {
    const int n = field.n;
    const std::vector<Matrix> gamma0 = christoffels(field, x, h);
    // dgamma[u][r](v, s) = d_u Gamma^r_{vs}
    std::vector<std::vector<Matrix>> dgamma(n);
    for (int u = 0; u < n; ++u) {
        Vector hi = x, lo = x;
        hi[u] += h[u];
        lo[u] -= h[u];
        const std::vector<Matrix> gp = christoffels(field, hi, h);
        const std::vector<Matrix> gm = christoffels(field, lo, h);
        dgamma[u].resize(n);
        for (int r = 0; r < n; ++r) dgamma[u][r] = (gp[r] - gm[r]) / (2.0 * h[u]);
    }
    // Ricci_{sv} = R^u_{suv} with
    // R^r_{suv} = d_u Gamma^r_{vs} - d_v Gamma^r_{us}
    //           + Gamma^r_{ul} Gamma^l_{vs} - Gamma^r_{vl} Gamma^l_{us}
    Matrix ricci = Matrix::Zero(n, n);
    for (int s = 0; s < n; ++s)
        for (int v = 0; v < n; ++v) {
            double acc = 0.0;
            for (int u = 0; u < n; ++u) {
                acc += dgamma[u][u](v, s) - dgamma[v][u](u, s);
                for (int l = 0; l < n; ++l)
                    acc += gamma0[u](u, l) * gamma0[l](v, s) - gamma0[u](v, l) * gamma0[l](u, s);
            }
            ricci(s, v) = acc;
        }
    return 0.5 * (ricci + ricci.transpose());
}

}  // namespace detail

// Finite-difference Ricci tensor and scalar with one Richardson step
// (4 R_{h/2} - R_h) / 3, calibrated so the unit 2-sphere has scalar +2.
inline CurvatureData ricci_numeric(const MetricField& field, const Vector& theta,
                                   double step_rel = 1e-3) {
    if (theta.size() != field.n) throw invalid_input("ricci_numeric: theta has wrong dimension");
    const int n = field.n;
    std::vector<double> h(n), h2(n);
    for (int u = 0; u < n; ++u) {
        const AxisSpec& axis = field.domain[u];
        h[u] = step_rel * detail::axis_length(axis);
        if (!axis.periodic) {
            const double room = std::min(theta[u] - axis.lower, axis.upper - theta[u]);
            if (room < 3.0 * h[u])
                throw domain_error("ricci_numeric: point too close to the domain boundary");
        }
        h2[u] = 0.5 * h[u];
    }
    const Matrix coarse = detail::ricci_pass(field, theta, h);
    const Matrix fine = detail::ricci_pass(field, theta, h2);
    const Matrix ricci = (4.0 * fine - coarse) / 3.0;
    const Matrix g = detail::metric_spd_at(field, theta);
    CurvatureData out;
    out.point = theta;
    out.ricci = SymMatrix(ricci);
    out.scalar = g.ldlt().solve(ricci).trace();
    return out;
}

// Jeffreys density sqrt(det g(theta)) / vol_g(M).
inline double jeffreys_density(const MetricField& field, const Vector& theta, double log_volume) {
    if (!std::isfinite(log_volume)) throw invalid_input("jeffreys_density: log_volume must be finite");
    const Matrix g = detail::metric_spd_at(field, theta);
    const auto [evals, evecs] = eigh(SymMatrix(g));
    double half_logdet = 0.0;
    for (int i = 0; i < evals.size(); ++i) half_logdet += 0.5 * std::log(evals[i]);
    return std::exp(half_logdet - log_volume);
}

}  // namespace geomdl
