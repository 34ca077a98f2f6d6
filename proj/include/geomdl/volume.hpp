#pragma once

// Riemannian volume of the truncated SPD manifold
//   M(s) = { q symmetric positive definite : I <= q <= 2^{2s} I }
// under the affine-invariant metric ds^2 = (1/2) Tr(q^{-1}dq q^{-1}dq),
// whose volume element is 2^{-m/2} det(q)^{-(m+1)/2} dq.
//
// Diagonalizing q = K a K^T (K in O(m), a = diag(e^{r_1..r_m}),
// r_i in [0, 2 s log 2]) and substituting r_i = 2 s log 2 * u_i yields
//
//   vol(M(s)) = 2^{-3m/2} (1/m!) vol(O(m)) I(s),
//   I(s)      = (2 s log 2)^m 2^{m(m-1)/2}
//               E_{u ~ U[0,1]^m} [ prod_{i<j} sinh(s log 2 |u_i - u_j|) ],
//
// using |e^{r_i} - e^{r_j}| = 2 e^{(r_i+r_j)/2} sinh(|r_i - r_j|/2): the
// half-sum exponentials cancel exactly against the det(q)^{-(m+1)/2} weight.
// The m=1 volume integral int_1^{4^s} 2^{-1/2} q^{-1} dq = sqrt(2) s log 2
// pins the constants, and the m=2 case has the closed form
// I(s) = 16 (sinh(s log 2) - s log 2) used by the tests.
//
// All estimators work on log I(s) so that large (m, s) stay finite.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "geomdl/detail/quadrature.hpp"
#include "geomdl/detail/rng.hpp"
#include "geomdl/errors.hpp"

namespace geomdl {

enum class VolMode { monte_carlo, quadrature, upper_bound, lower_bound };

inline const char* vol_mode_name(VolMode mode) {
    switch (mode) {
        case VolMode::monte_carlo: return "mc";
        case VolMode::quadrature: return "quad";
        case VolMode::upper_bound: return "upper";
        case VolMode::lower_bound: return "lower";
    }
    return "?";
}

struct VolumeResult {
    int m = 0;
    int s = 0;
    double log_I = 0.0;
    double log_I_stderr = 0.0;  // 0 for the deterministic modes
    VolMode mode = VolMode::monte_carlo;
    double log_vol = 0.0;
};

// sum_{j=1}^m log Gamma(j/2), by direct summation.
inline double log_gamma_half_sum(int m) {
    if (m < 1) throw invalid_input("log_gamma_half_sum: m must be >= 1");
    double acc = 0.0;
    for (int j = 1; j <= m; ++j) acc += std::lgamma(0.5 * j);
    return acc;
}

// log of Glaisher's constant A (A = exp(1/12 - zeta'(-1))); the unit tests
// re-derive this value from the defining limit of sum k log k.
inline constexpr double glaisher_log_a = 0.2487544770337843;

// log G(n) for integer n >= 1, Barnes G via log G(z+1) = log Gamma(z) + log G(z),
// seeded at G(1) = 1.
inline double barnes_log_g_int(int n) {
    if (n < 1) throw invalid_input("barnes_log_g_int: n must be >= 1");
    double acc = 0.0;
    for (int z = 1; z < n; ++z) acc += std::lgamma(static_cast<double>(z));
    return acc;
}

// log G(k + 1/2) for k >= 0, recursing up from the closed form
//   log G(1/2) = (1/24) log 2 + 1/8 - (1/4) log pi - (3/2) log A.
inline double barnes_log_g_half(int k) {
    if (k < 0) throw invalid_input("barnes_log_g_half: k must be >= 0");
    const double log_pi = std::log(3.14159265358979323846);
    double acc = std::log(2.0) / 24.0 + 0.125 - 0.25 * log_pi - 1.5 * glaisher_log_a;
    for (int j = 0; j < k; ++j) acc += std::lgamma(j + 0.5);
    return acc;
}

// Barnes-G/Glaisher closed form of sum_j log Gamma(j/2): splitting the sum by
// parity of j telescopes into
//   log G(ceil(m/2) + 1/2) - log G(1/2) + log G(floor(m/2) + 1).
inline double log_gamma_half_sum_closed(int m) {
    if (m < 1) throw invalid_input("log_gamma_half_sum_closed: m must be >= 1");
    const int odd_terms = (m + 1) / 2, even_terms = m / 2;
    return barnes_log_g_half(odd_terms) - barnes_log_g_half(0) + barnes_log_g_int(even_terms + 1);
}

// log vol(O(m)) = m log 2 + (m(m+1)/4) log pi - sum_j log Gamma(j/2).
inline double log_vol_orthogonal(int m) {
    if (m < 1) throw invalid_input("log_vol_orthogonal: m must be >= 1");
    const double log_pi = std::log(3.14159265358979323846);
    return m * std::log(2.0) + 0.25 * m * (m + 1) * log_pi - log_gamma_half_sum(m);
}

namespace detail {

// log sinh(x) for x >= 0 without overflow: x - log 2 + log1p(-e^{-2x}).
inline double log_sinh(double x) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
}

// log of the pair-product integrand at u in [0,1]^m, with c = s log 2.
inline double log_pair_product(const std::vector<double>& u, double c) {
    double acc = 0.0;
    const int m = static_cast<int>(u.size());
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) acc += log_sinh(c * std::abs(u[i] - u[j]));
    return acc;
}

// Deterministic prefactor log[(2 s log 2)^m 2^{m(m-1)/2}].
inline double log_I_prefactor(int m, int s) {
    const double c = s * std::log(2.0);
    return m * std::log(2.0 * c) + 0.5 * m * (m - 1) * std::log(2.0);
}

}  // namespace detail

// Monte Carlo estimate of log I(s). Returns (log_I, stderr of log_I).
// Samples are drawn in fixed-width chunks with per-chunk counter-based seeds,
// so the stream (and hence the report) is reproducible.
inline std::pair<double, double> log_I_mc(int m, int s, long samples, std::uint64_t seed) {
    if (m < 1) throw invalid_input("log_I_mc: m must be >= 1");
    if (s < 0) throw invalid_input("log_I_mc: s must be >= 0");
    if (samples < 1000) throw invalid_input("log_I_mc: need at least 1000 samples");
    if (s == 0)  // M(0) is the single point q = I: vanishing volume
        return {-std::numeric_limits<double>::infinity(), 0.0};
    const double c = s * std::log(2.0);
    if (m == 1)  // empty pair product: I(s) = 2 s log 2 exactly
        return {std::log(2.0 * c), 0.0};

    // Streaming log-sum-exp of exp(l_k) and exp(2 l_k) under a running max.
    constexpr long kChunk = 4096;
    double peak = -std::numeric_limits<double>::infinity();
    double sum_exp = 0.0, sum_exp2 = 0.0;
    std::vector<double> u(m);
    long done = 0;
    for (std::uint64_t chunk = 0; done < samples; ++chunk) {
        detail::Rng rng(seed, chunk);
        const long want = std::min(kChunk, samples - done);
        for (long k = 0; k < want; ++k) {
            for (int i = 0; i < m; ++i) u[i] = rng.uniform();
            const double l = detail::log_pair_product(u, c);
            if (l > peak) {
                const double shrink = std::exp(peak - l);
                sum_exp *= shrink;
                sum_exp2 *= shrink * shrink;
                peak = l;
            }
            const double e = std::exp(l - peak);
            sum_exp += e;
            sum_exp2 += e * e;
        }
        done += want;
    }
    const double n = static_cast<double>(samples);
    const double log_mean = peak + std::log(sum_exp / n);           // log E[f]
    const double log_mean_sq = 2.0 * peak + std::log(sum_exp2 / n); // log E[f^2]
    // stderr of a log via the delta method: sd(mean)/mean.
    const double ratio = std::expm1(log_mean_sq - 2.0 * log_mean);  // Var[f]/E[f]^2
    const double stderr_log = std::sqrt(std::max(ratio, 0.0) / n);
    return {detail::log_I_prefactor(m, s) + log_mean, stderr_log};
}

namespace detail {

// E[prod sinh] over the ordered simplex 0 < u_1 < ... < u_m < 1, mapped to the
// unit cube by u_k = prod_{j>=k} t_j (Jacobian prod_k t_k^{k-1}), which removes
// the |.| kinks; tensor Gauss-Legendre then converges spectrally. Returns the
// log of the full (symmetrized) expectation.
inline double log_pair_expectation_quad(int m, double c, int nodes) {
    const QuadRule rule = gauss_legendre(nodes);
    std::vector<double> x(nodes), w(nodes);
    for (int i = 0; i < nodes; ++i) {
        x[i] = 0.5 * (rule.nodes[i] + 1.0);  // map to (0,1)
        w[i] = 0.5 * rule.weights[i];
    }
    std::vector<int> idx(m, 0);
    std::vector<double> u(m), t(m);
    // streaming log-sum-exp in fixed lexicographic node order
    double peak = -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (;;) {
        double log_w = 0.0;
        for (int k = 0; k < m; ++k) {
            t[k] = x[idx[k]];
            log_w += std::log(w[idx[k]]);
            if (k > 0) log_w += k * std::log(t[k]);  // Jacobian factor t_k^k
        }
        double running = 1.0;
        for (int k = m - 1; k >= 0; --k) {
            running *= t[k];
            u[k] = running;  // u_k = t_k t_{k+1} ... t_{m-1} (ascending order)
        }
        const double l = log_pair_product(u, c) + log_w;
        if (l > peak) {
            acc *= std::exp(peak - l);
            peak = l;
        }
        acc += std::exp(l - peak);
        int k = 0;
        while (k < m && ++idx[k] == nodes) idx[k++] = 0;
        if (k == m) break;
    }
    double log_factorial = 0.0;
    for (int k = 2; k <= m; ++k) log_factorial += std::log(static_cast<double>(k));
    return peak + std::log(acc) + log_factorial;
}

}  // namespace detail

// Deterministic quadrature value of log I(s) for m in {1,2,3}; grid refinement
// until successive doublings agree to 1e-8 relative on the log scale.
inline double log_I_quad(int m, int s) {
    if (m < 1 || m > 3) throw invalid_input("log_I_quad: m must be in {1,2,3}");
    if (s < 0) throw invalid_input("log_I_quad: s must be >= 0");
    if (s == 0) return -std::numeric_limits<double>::infinity();
    const double c = s * std::log(2.0);
    if (m == 1) return std::log(2.0 * c);
    double previous = std::numeric_limits<double>::quiet_NaN();
    const int max_nodes = (m == 3) ? 256 : 512;  // keeps the tensor grid <= ~16M points
    for (int nodes = 16; nodes <= max_nodes; nodes *= 2) {
        const double value = detail::log_pair_expectation_quad(m, c, nodes);
        if (std::isfinite(previous) && std::abs(value - previous) <= 1e-9 * std::max(1.0, std::abs(value)))
            return detail::log_I_prefactor(m, s) + value;
        previous = value;
    }
    throw accuracy_error("log_I_quad: grid refinement did not converge");
}

// Analytic bracket on log I(s):
//   upper: sinh x <= e^x / 2 and |u_i - u_j| <= 1 (rigorous),
//   lower: Jensen on the exponential surrogate, E|u_i - u_j| = 1/3 (asymptotic).
// The 2^{m(m-1)/2} prefactor cancels exactly against the product of the 1/2's.
inline std::pair<double, double> i_bounds(int m, int s) {
    if (m < 1) throw invalid_input("i_bounds: m must be >= 1");
    if (s < 0) throw invalid_input("i_bounds: s must be >= 0");
    if (s == 0) {
        const double neg_inf = -std::numeric_limits<double>::infinity();
        return {neg_inf, neg_inf};
    }
    const double c = s * std::log(2.0);
    const double base = m * std::log(2.0 * c);
    const double pairs = 0.5 * m * (m - 1);
    return {base + c * pairs / 3.0, base + c * pairs};
}

// Assembled log vol_g(M(s)) =
//   -(3m/2) log 2 - log m! + log vol(O(m)) + log I(s).
inline VolumeResult log_vol_Ms(int m, int s, VolMode mode, long samples = 100000,
                               std::uint64_t seed = 0xC0FFEE) {
    if (m < 1) throw invalid_input("log_vol_Ms: m must be >= 1");
    if (s < 0) throw invalid_input("log_vol_Ms: s must be >= 0");
    VolumeResult out;
    out.m = m;
    out.s = s;
    out.mode = mode;
    switch (mode) {
        case VolMode::monte_carlo: {
            auto [log_I, se] = log_I_mc(m, s, samples, seed);
            out.log_I = log_I;
            out.log_I_stderr = se;
            break;
        }
        case VolMode::quadrature:
            out.log_I = log_I_quad(m, s);
            break;
        case VolMode::upper_bound:
            out.log_I = i_bounds(m, s).second;
            break;
        case VolMode::lower_bound:
            out.log_I = i_bounds(m, s).first;
            break;
    }
    double log_factorial = 0.0;
    for (int k = 2; k <= m; ++k) log_factorial += std::log(static_cast<double>(k));
    out.log_vol = -1.5 * m * std::log(2.0) - log_factorial + log_vol_orthogonal(m) + out.log_I;
    return out;
}

}  // namespace geomdl
