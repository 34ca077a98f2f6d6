#pragma once

// 1-D quadrature building blocks shared by the volume / Laplace / regret
// pipelines:
//   - Gauss-Legendre nodes (Newton on the Legendre recurrence),
//   - a deterministic adaptive Gauss-Kronrod (G7, K15) integrator driven by
//     a worst-interval queue (handles integrable endpoint singularities),
//   - a log-domain wrapper that integrates exp(lf(x)) after factoring out
//     the scouted maximum (for likelihood-scale integrands ~ e^{-700}).

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "geomdl/errors.hpp"

namespace geomdl::detail {

struct QuadRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre by Newton iteration on P_n; ~1e-15 accurate for n <= 64.
inline QuadRule gauss_legendre(int n) {
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev initial guess
        double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

// Kronrod 15 / Gauss 7 pair on [-1,1] (nodes symmetric; odd K-indices are
// the embedded Gauss nodes).
struct GK15 {
    static constexpr double xk[15] = {
        -0.9914553711208126, -0.9491079123427585, -0.8648644233597691,
        -0.7415311855993945, -0.5860872354676911, -0.4058451513773972,
        -0.2077849550078985,  0.0,                 0.2077849550078985,
         0.4058451513773972,  0.5860872354676911,  0.7415311855993945,
         0.8648644233597691,  0.9491079123427585,  0.9914553711208126};
    static constexpr double wk[15] = {
        0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
        0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
        0.2044329400752989, 0.2094821410847278, 0.2044329400752989,
        0.1903505780647854, 0.1690047266392679, 0.1406532597155259,
        0.1047900103222502, 0.0630920926299786, 0.0229353220105292};
    static constexpr double wg[7] = {
        0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
        0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
        0.1294849661688697};
};

struct GKSegment {
    double a, b, integral, error;
    bool operator<(const GKSegment& o) const { return error < o.error; }
};

inline GKSegment gk15_segment(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double ik = 0.0, ig = 0.0;
    for (int i = 0; i < 15; ++i) {
        double v = f(c + h * GK15::xk[i]);
        ik += GK15::wk[i] * v;
        if (i % 2 == 1) ig += GK15::wg[i / 2] * v;
    }
    ik *= h;
    ig *= h;
    double err = std::pow(200.0 * std::abs(ik - ig), 1.5);  // QUADPACK-style estimate
    if (!(err < std::abs(ik - ig))) err = std::abs(ik - ig);
    return GKSegment{a, b, ik, err};
}

// Adaptive GK15: bisects the worst segment until the summed error estimate
// meets max(abs_tol, rel_tol*|I|) or the evaluation budget runs out.
inline double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, double abs_tol = 0.0,
                          int max_segments = 4000) {
    std::priority_queue<GKSegment> queue;
    queue.push(gk15_segment(f, a, b));
    double total = queue.top().integral, total_err = queue.top().error;
    int segments = 1;
    while (segments < max_segments) {
        if (total_err <= std::max(abs_tol, rel_tol * std::abs(total))) break;
        GKSegment worst = queue.top();
        queue.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // interval exhausted by rounding
            queue.push(GKSegment{worst.a, worst.b, worst.integral, 0.0});
            total_err -= worst.error;
            continue;
        }
        GKSegment left = gk15_segment(f, worst.a, mid);
        GKSegment right = gk15_segment(f, mid, worst.b);
        total += left.integral + right.integral - worst.integral;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++segments;
    }
    return total;
}

// log of integral of exp(lf(x)) dx over [a,b]; the maximum is scouted on a
// uniform grid first so narrow likelihood peaks are not missed.
inline double log_integrate_1d(const std::function<double(double)>& lf, double a, double b,
                               double rel_tol = 1e-10, int scout_points = 513) {
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < scout_points; ++i) {
        double x = a + (b - a) * i / scout_points;
        peak = std::max(peak, lf(x));
    }
    if (!std::isfinite(peak))
        throw accuracy_error("log_integrate_1d: integrand has no finite values on scout grid");
    auto scaled = [&](double x) {
        double v = lf(x);
        return std::isfinite(v) ? std::exp(v - peak) : 0.0;
    };
    double integral = adaptive_gk(scaled, a, b, rel_tol);
    if (!(integral > 0.0))
        throw accuracy_error("log_integrate_1d: integral not positive after scaling");
    return peak + std::log(integral);
}

} // namespace geomdl::detail
