#pragma once

// Shared fixtures and oracles for the test suite. Everything here is computed
// by a route independent of the code under test (series, closed forms, plain
// composite quadrature), so agreement is evidence rather than tautology.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <geomdl/cli.hpp>
#include <geomdl/fishergeom.hpp>
#include <geomdl/gaussmodel.hpp>
#include <geomdl/laplace.hpp>
#include <geomdl/regret.hpp>
#include <geomdl/symspace.hpp>
#include <geomdl/volume.hpp>

#ifndef GEOMDL_DATA_DIR
#define GEOMDL_DATA_DIR "data"
#endif

namespace support {

using geomdl::AxisSpec;
using geomdl::DiscreteModel;
using geomdl::Matrix;
using geomdl::MetricField;
using geomdl::Vector;

constexpr double kPi = 3.14159265358979323846264338328;

// ---------------------------------------------------------------------------
// numeric helpers

inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Composite Simpson on a uniform grid; intervals must be even. Deliberately
// primitive so oracle integrals do not depend on the library's quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
    double s = f(a) + f(b);
    const double h = (b - a) / intervals;
    for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// log I_0(x) by the ascending series sum_k ((x/2)^k / k!)^2, accumulated in
// log space under a running peak so large arguments do not overflow.
inline double bessel_log_i0(double x) {
    const double lh = std::log(0.5 * x);
    double peak = -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 100000; ++k) {
        const double lt = 2.0 * (k * lh - std::lgamma(k + 1.0));
        if (lt > peak) {
            acc *= std::exp(peak - lt);
            peak = lt;
        }
        acc += std::exp(lt - peak);
        if (lt < prev && lt < peak - 60.0) break;  // past the mode and negligible
        prev = lt;
    }
    return peak + std::log(acc);
}

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Glaisher log A from the defining limit
//   f(n) = sum_{k<=n} k log k - (n^2/2 + n/2 + 1/12) log n + n^2/4,
// whose error expands in powers of 1/n^2; two Richardson stages on
// n = 200, 400, 800 leave ~1e-13.
inline double glaisher_limit_oracle() {
    auto f = [](long n) {
        double s = 0.0;
        for (long k = 2; k <= n; ++k) s += k * std::log(static_cast<double>(k));
        const double nd = static_cast<double>(n);
        return s - (0.5 * nd * nd + 0.5 * nd + 1.0 / 12.0) * std::log(nd) + 0.25 * nd * nd;
    };
    const double f1 = f(200), f2 = f(400), f3 = f(800);
    const double g1 = (4.0 * f2 - f1) / 3.0;
    const double g2 = (4.0 * f3 - f2) / 3.0;
    return (16.0 * g2 - g1) / 15.0;
}

// ---------------------------------------------------------------------------
// discrete models

inline DiscreteModel bernoulli() {
    DiscreteModel m;
    m.n = 1;
    m.outcomes = 2;
    m.domain = {AxisSpec{0.0, 1.0, false}};
    m.prob = [](const Vector& t) {
        Vector p(2);
        p[0] = t[0];
        p[1] = 1.0 - t[0];
        return p;
    };
    return m;
}

// Simplex chart p = (t1, t2, 1 - t1 - t2) on a box bounded away from the
// simplex boundary; good for pointwise Fisher checks, unusable for count-MLE
// grid scans (the box corners leave the simplex).
inline DiscreteModel trinomial_simplex() {
    DiscreteModel m;
    m.n = 2;
    m.outcomes = 3;
    m.domain = {AxisSpec{0.02, 0.6, false}, AxisSpec{0.02, 0.6, false}};
    m.prob = [](const Vector& t) {
        Vector p(3);
        p[0] = t[0];
        p[1] = t[1];
        p[2] = 1.0 - t[0] - t[1];
        return p;
    };
    return m;
}

// Stick-breaking chart p = (t1, (1-t1) t2, (1-t1)(1-t2)): every point of the
// box [0,1]^2 is a valid distribution, so NML scans stay in-domain.
inline DiscreteModel trinomial_stick() {
    DiscreteModel m;
    m.n = 2;
    m.outcomes = 3;
    m.domain = {AxisSpec{0.0, 1.0, false}, AxisSpec{0.0, 1.0, false}};
    m.prob = [](const Vector& t) {
        Vector p(3);
        p[0] = t[0];
        p[1] = (1.0 - t[0]) * t[1];
        p[2] = (1.0 - t[0]) * (1.0 - t[1]);
        return p;
    };
    return m;
}

// Two independent Bernoulli bits: K = 4 outcomes ordered (00, 10, 01, 11).
// Everything factorizes, which gives closed-form mixture oracles in 2-D.
inline DiscreteModel bernoulli_pair() {
    DiscreteModel m;
    m.n = 2;
    m.outcomes = 4;
    m.domain = {AxisSpec{0.0, 1.0, false}, AxisSpec{0.0, 1.0, false}};
    m.prob = [](const Vector& t) {
        const double a = t[0], b = t[1];
        Vector p(4);
        p[0] = (1.0 - a) * (1.0 - b);
        p[1] = a * (1.0 - b);
        p[2] = (1.0 - a) * b;
        p[3] = a * b;
        return p;
    };
    return m;
}

// ---------------------------------------------------------------------------
// metric fields

inline MetricField flat_field(int n) {
    MetricField f;
    f.n = n;
    f.domain.assign(n, AxisSpec{-1.0, 1.0, false});
    f.components = [n](const Vector&) { return geomdl::SymMatrix(Matrix::Identity(n, n)); };
    return f;
}

// Round sphere of radius a in polar coordinates: g = diag(a^2, a^2 sin^2 t).
// The chart keeps clear of the poles where the metric degenerates.
inline MetricField sphere_polar(double a = 1.0) {
    MetricField f;
    f.n = 2;
    f.domain = {AxisSpec{0.3, kPi - 0.3, false}, AxisSpec{0.0, 2.0 * kPi, true}};
    f.components = [a](const Vector& x) {
        Matrix g = Matrix::Zero(2, 2);
        const double st = std::sin(x[0]);
        g(0, 0) = a * a;
        g(1, 1) = a * a * st * st;
        return geomdl::SymMatrix(g);
    };
    return f;
}

// Unit sphere in Riemann normal coordinates centered at a point:
//   g(x) = f(r) I + ((1 - f(r)) / r^2) x x^T,   f(r) = (sin r / r)^2,
// with the small-r limits filled in by series so the field is smooth at 0.
inline MetricField sphere_normal_chart() {
    MetricField f;
    f.n = 2;
    f.domain = {AxisSpec{-1.2, 1.2, false}, AxisSpec{-1.2, 1.2, false}};
    f.components = [](const Vector& x) {
        const double r2 = x.squaredNorm();
        double fr, coef;
        if (r2 < 1e-8) {
            fr = 1.0 - r2 / 3.0;
            coef = 1.0 / 3.0 - 2.0 * r2 / 45.0;
        } else {
            const double r = std::sqrt(r2);
            const double sr = std::sin(r) / r;
            fr = sr * sr;
            coef = (1.0 - fr) / r2;
        }
        const Matrix g = fr * Matrix::Identity(2, 2) + coef * (x * x.transpose());
        return geomdl::SymMatrix(g);
    };
    return f;
}

// Analytic Bernoulli Fisher metric 1/(t(1-t)) as a field on (0, 1).
inline MetricField bernoulli_field() {
    MetricField f;
    f.n = 1;
    f.domain = {AxisSpec{0.0, 1.0, false}};
    f.components = [](const Vector& t) {
        Matrix g(1, 1);
        g(0, 0) = 1.0 / (t[0] * (1.0 - t[0]));
        return geomdl::SymMatrix(g);
    };
    return f;
}

// ---------------------------------------------------------------------------
// priors

// Midpoint grid prior on Bernoulli theta with analytic weight choices.
inline geomdl::GridPrior bernoulli_grid_prior(int J, const std::string& kind) {
    geomdl::GridPrior prior;
    for (int j = 0; j < J; ++j) {
        Vector t(1);
        t[0] = (j + 0.5) / J;
        double w = 1.0;
        if (kind == "jeffreys")
            w = 1.0 / std::sqrt(t[0] * (1.0 - t[0]));
        else if (kind == "beta22")
            w = t[0] * (1.0 - t[0]);
        else if (kind != "uniform")
            throw std::runtime_error("unknown prior kind: " + kind);
        prior.thetas.push_back(t);
        prior.weights.push_back(w);
    }
    return prior;
}

// ---------------------------------------------------------------------------
// ambient volume oracle for m = 2

// Brute-force volume of the m = 2 eigenvalue body by ambient integration:
// q = [[q11, b], [b, q22]] with volume density (1/2) det(q)^{-3/2}. The
// eigenvalue constraints pin |b| <= b_max with
//   b_max^2 = min((q11-1)(q22-1), (U-q11)(U-q22)),   U = 4^s,
// and the b-integral has the closed form b_max / (D sqrt(D - b_max^2)),
// D = q11 q22. The remaining 2-D integral is done with the generic adaptive
// rule on an explicit integrand, nothing shared with the spectral pipeline.
inline double ambient_log_vol_m2(int s) {
    const double U = std::pow(4.0, s);
    auto inner = [U](double q11) {
        return geomdl::detail::adaptive_gk(
            [U, q11](double q22) {
                const double b2 =
                    std::min((q11 - 1.0) * (q22 - 1.0), (U - q11) * (U - q22));
                if (b2 <= 0.0) return 0.0;
                const double d = q11 * q22;
                return std::sqrt(b2) / (d * std::sqrt(d - b2));
            },
            1.0, U, 1e-9);
    };
    return std::log(geomdl::detail::adaptive_gk(inner, 1.0, U, 1e-8));
}

// ---------------------------------------------------------------------------
// Gaussian helpers

inline geomdl::Dataset load_fixture(const std::string& name) {
    const std::string path = std::string(GEOMDL_DATA_DIR) + "/" + name;
    return geomdl::center(geomdl::make_dataset(geomdl::cli::load_csv(path)));
}

// Observed information of the reduced Gaussian family in q_{ij} coordinates,
// by direct central differences of the exact log-likelihood. Builds the
// covariance embedding itself so none of the library's differencing is reused.
inline Matrix fd_gauss_observed_info(const geomdl::Dataset& data, int m, int s) {
    const geomdl::SpdMatrix sigma = geomdl::empirical_cov(data);
    const geomdl::PcaSplit split = geomdl::pca_split(sigma, m);
    const geomdl::SpdMatrix qhat = geomdl::mle_q(split, s);
    const int n = m * (m + 1) / 2;
    const Vector c0 = geomdl::sym_to_coords(qhat.base);
    auto loglik = [&](const Vector& c) {
        const Matrix qm = geomdl::coords_to_sym(m, c).entries;
        Matrix big = split.A_block * qm * split.A_block.transpose();
        if (m < data.d) big += split.lambda_bar * split.B_block * split.B_block.transpose();
        return geomdl::gauss_loglik(data, geomdl::spd_from_sym(geomdl::SymMatrix(big)));
    };
    Vector h(n);
    for (int a = 0; a < n; ++a) h[a] = 1e-3 * std::max(1.0, std::abs(c0[a]));
    const double f0 = loglik(c0);
    Matrix hess(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            double v;
            if (a == b) {
                Vector hi = c0, lo = c0;
                hi[a] += h[a];
                lo[a] -= h[a];
                v = (loglik(hi) - 2.0 * f0 + loglik(lo)) / (h[a] * h[a]);
            } else {
                Vector pp = c0, pm = c0, mp = c0, mm = c0;
                pp[a] += h[a];
                pp[b] += h[b];
                pm[a] += h[a];
                pm[b] -= h[b];
                mp[a] -= h[a];
                mp[b] += h[b];
                mm[a] -= h[a];
                mm[b] -= h[b];
                v = (loglik(pp) - loglik(pm) - loglik(mp) + loglik(mm)) / (4.0 * h[a] * h[b]);
            }
            hess(a, b) = hess(b, a) = v;
        }
    }
    return -hess / static_cast<double>(data.N);
}

// ---------------------------------------------------------------------------
// subprocess helper

struct RunResult {
    int exit_code = -1;
    std::string output;
};

// Run a shell command and capture stdout (append 2>&1 to also capture stderr).
inline RunResult run_binary(const std::string& cmd) {
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed: " + cmd);
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.output.append(buf, got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

}  // namespace support
