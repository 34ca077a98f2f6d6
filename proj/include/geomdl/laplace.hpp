#pragma once

// Laplace/saddle-point machinery on Riemannian manifolds:
//
//   int_M e^{N f} dV_g ~ (2pi/N)^{n/2} e^{N f(p0)}
//                        sqrt(det g(p0) / det A) [1 - tr(A^{-1} R(p0)) / (6N)]
//
// with A = -Hess f(p0) in chart coordinates and R the Ricci tensor, plus the
// flat-space special case, a deterministic tensor-quadrature oracle for the
// left side, and a check of the normal-coordinate volume expansion
// sqrt(det g) = 1 - (1/6) R_{ij} x^i x^j + O(|x|^3).

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "geomdl/detail/quadrature.hpp"
#include "geomdl/errors.hpp"
#include "geomdl/fishergeom.hpp"
#include "geomdl/symspace.hpp"

namespace geomdl {

struct LaplaceInput {
    int n = 0;
    double f_max = 0.0;     // f(p0)
    SymMatrix hess;         // Hessian of f at p0 (negative definite)
    SymMatrix g_p0;         // metric at p0
    SymMatrix ricci_p0;     // Ricci tensor at p0
    double N = 1.0;         // sharpness parameter
};

// The integral oracle's input: a chart box with metric plus log-integrand
// theta -> N f(theta); the sqrt(det g) volume weight is applied internally.
struct IntegrableManifold {
    MetricField field;
    std::function<double(const Vector&)> integrand_log;
};

namespace detail {

inline SpdMatrix neg_hess_spd(const SymMatrix& hess) {
    try {
        return spd_from_sym(SymMatrix(Matrix(-hess.entries)));
    } catch (const not_positive_definite&) {
        throw not_positive_definite("laplace: -Hess not positive definite (no interior maximum)");
    }
}

}  // namespace detail

// Leading order + curvature bracket.
inline double laplace_approx(const LaplaceInput& inp) {
    if (inp.hess.dim() != inp.n || inp.g_p0.dim() != inp.n || inp.ricci_p0.dim() != inp.n)
        throw invalid_input("laplace_approx: dimension mismatch");
    if (!(inp.N > 0.0)) throw invalid_input("laplace_approx: N must be positive");
    const SpdMatrix a = detail::neg_hess_spd(inp.hess);
    const SpdMatrix g = spd_from_sym(inp.g_p0);
    const double det_ratio = std::exp(0.5 * (logdet(g) - logdet(a)));
    const double bracket = 1.0 - a.solve(inp.ricci_p0.entries).trace() / (6.0 * inp.N);
    const double two_pi = 6.283185307179586476925286766559;
    return std::pow(two_pi / inp.N, 0.5 * inp.n) * std::exp(inp.N * inp.f_max) * det_ratio * bracket;
}

// -log of the approximation with the bracket expanded, log(1+x) ~ x:
//   -N f(p0) + (n/2) log(N/2pi) - (1/2)(log det g - log det A) + tr(A^{-1}R)/(6N).
inline double laplace_log_expansion(const LaplaceInput& inp) {
    if (inp.hess.dim() != inp.n || inp.g_p0.dim() != inp.n || inp.ricci_p0.dim() != inp.n)
        throw invalid_input("laplace_log_expansion: dimension mismatch");
    if (!(inp.N > 0.0)) throw invalid_input("laplace_log_expansion: N must be positive");
    const SpdMatrix a = detail::neg_hess_spd(inp.hess);
    const SpdMatrix g = spd_from_sym(inp.g_p0);
    const double two_pi = 6.283185307179586476925286766559;
    return -inp.N * inp.f_max + 0.5 * inp.n * std::log(inp.N / two_pi) -
           0.5 * (logdet(g) - logdet(a)) + a.solve(inp.ricci_p0.entries).trace() / (6.0 * inp.N);
}

// Flat-space leading order e^{N f(x0)} sqrt(det(2 pi (-N Hess)^{-1})), with an
// optional density weight h0 evaluated at the maximum.
inline double laplace_rn(double f_max, const SymMatrix& hess, double N, int n, double h0 = 1.0) {
    if (hess.dim() != n) throw invalid_input("laplace_rn: dimension mismatch");
    if (!(N > 0.0)) throw invalid_input("laplace_rn: N must be positive");
    const SpdMatrix a = detail::neg_hess_spd(hess);
    const double two_pi = 6.283185307179586476925286766559;
    return h0 * std::exp(N * f_max) * std::pow(two_pi / N, 0.5 * n) * std::exp(-0.5 * logdet(a));
}

namespace detail {

struct AxisNodes {
    std::vector<double> x, w;
};

// Bounded axes get Gauss-Legendre (no endpoint evaluation, so integrable
// boundary behavior is safe); periodic axes get the trapezoid rule, which is
// spectrally accurate for smooth periodic integrands.
inline AxisNodes axis_nodes(const AxisSpec& axis, int count) {
    AxisNodes out;
    out.x.resize(count);
    out.w.resize(count);
    const double lo = axis.lower, len = axis_length(axis);
    if (axis.periodic) {
        for (int i = 0; i < count; ++i) {
            out.x[i] = lo + len * i / count;
            out.w[i] = len / count;
        }
    } else {
        const QuadRule rule = gauss_legendre(count);
        for (int i = 0; i < count; ++i) {
            out.x[i] = lo + 0.5 * len * (rule.nodes[i] + 1.0);
            out.w[i] = 0.5 * len * rule.weights[i];
        }
    }
    return out;
}

}  // namespace detail

// Deterministic tensor quadrature of int e^{integrand_log} sqrt(det g) over
// the chart box (<= 3 axes), doubling the per-axis node count until two
// successive log-estimates agree to tol.  Evaluations are accumulated in
// max-shifted form so sharply peaked exponents stay finite.
inline double integrate_manifold(const IntegrableManifold& im, double tol) {
    const int n = im.field.n;
    if (n < 1 || n > 3) throw invalid_input("integrate_manifold: supports 1 to 3 axes");
    if (static_cast<int>(im.field.domain.size()) != n)
        throw invalid_input("integrate_manifold: domain/axis count mismatch");
    if (!(tol > 0.0)) throw invalid_input("integrate_manifold: tol must be positive");

    constexpr long kMaxNodesPerAxis = 1 << 20;
    constexpr double kMaxEvals = 1e7;
    double previous_log = std::numeric_limits<double>::quiet_NaN();
    for (long count = 8;; count *= 2) {
        std::vector<detail::AxisNodes> axes(n);
        for (int u = 0; u < n; ++u) axes[u] = detail::axis_nodes(im.field.domain[u], static_cast<int>(count));
        // streaming max-shifted accumulation over the tensor grid
        double peak = -std::numeric_limits<double>::infinity();
        double acc = 0.0;
        std::vector<int> idx(n, 0);
        Vector theta(n);
        for (;;) {
            double log_w = 0.0;
            for (int u = 0; u < n; ++u) {
                theta[u] = axes[u].x[idx[u]];
                log_w += std::log(axes[u].w[idx[u]]);
            }
            const double det = detail::metric_at(im.field, theta).determinant();
            if (det > 0.0) {
                const double l = im.integrand_log(theta) + 0.5 * std::log(det) + log_w;
                // -inf marks a zero-mass node; folding it into the running
                // max-shifted sum would turn the accumulator into exp(nan).
                if (l != -std::numeric_limits<double>::infinity()) {
                    if (l > peak) {
                        acc *= std::exp(peak - l);
                        peak = l;
                    }
                    acc += std::exp(l - peak);
                }
            }
            int u = 0;
            while (u < n && ++idx[u] == static_cast<int>(count)) idx[u++] = 0;
            if (u == n) break;
        }
        if (acc == 0.0) return 0.0;  // integrand vanishes on every node
        const double log_value = peak + std::log(acc);
        if (std::isfinite(previous_log) && std::abs(log_value - previous_log) <= tol)
            return std::exp(log_value);
        previous_log = log_value;
        double next_evals = 1.0;
        for (int u = 0; u < n; ++u) next_evals *= 2.0 * count;
        if (2 * count > kMaxNodesPerAxis || next_evals > kMaxEvals)
            throw accuracy_error("integrate_manifold: did not reach tol " + std::to_string(tol) +
                                 "; achieved log-integral ~" + std::to_string(log_value));
    }
}

// For a chart in Riemann normal coordinates centered at p (so g(p) = I),
// compares sqrt(det g(p + r d)) against 1 - (1/6) (r d)^T Ricci (r d) over a
// fixed direction set; returns the max residual scaled by r^3.
inline double normal_expansion_check(const MetricField& field, const Vector& p,
                                     const std::vector<double>& radii) {
    const int n = field.n;
    if (p.size() != n) throw invalid_input("normal_expansion_check: point has wrong dimension");
    {
        const Matrix g0 = detail::metric_at(field, p);
        if ((g0 - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8)
            throw invalid_input("normal_expansion_check: chart is not in normal coordinates at p");
    }
    const Matrix ricci = ricci_numeric(field, p).ricci.entries;
    // axis directions plus all diagonal sign patterns
    std::vector<Vector> dirs;
    for (int u = 0; u < n; ++u) {
        Vector d = Vector::Zero(n);
        d[u] = 1.0;
        dirs.push_back(d);
        dirs.push_back(-d);
    }
    for (long mask = 0; mask < (1L << n); ++mask) {
        Vector d(n);
        for (int u = 0; u < n; ++u) d[u] = (mask >> u) & 1 ? 1.0 : -1.0;
        dirs.push_back(d / d.norm());
    }
    double worst = 0.0;
    for (double r : radii) {
        if (!(r > 0.0)) throw invalid_input("normal_expansion_check: radii must be positive");
        for (const Vector& d : dirs) {
            const Vector x = p + r * d;
            for (int u = 0; u < n; ++u) {
                const AxisSpec& axis = field.domain[u];
                if (x[u] <= axis.lower || x[u] >= axis.upper)
                    throw domain_error("normal_expansion_check: radius exceeds the chart domain");
            }
            const double det = detail::metric_at(field, x).determinant();
            if (!(det > 0.0)) throw domain_error("normal_expansion_check: degenerate metric");
            const Vector rel = r * d;
            const double predicted = 1.0 - rel.dot(ricci * rel) / 6.0;
            worst = std::max(worst, std::abs(std::sqrt(det) - predicted) / (r * r * r));
        }
    }
    return worst;
}

}  // namespace geomdl
