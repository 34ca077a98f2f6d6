#pragma once

// Complexity reports and regret oracles.  The five-term geometric complexity
//
//   total = -log p(x^N|th^) + (n/2) log(N/2pi) + log vol_g(M)
//           - log( sqrt(det g) / sqrt(det I) ) - R(th^)/(6N)
//
// together with Rissanen's three-term baseline, the zero-mean Gaussian / PCA
// specialization (where the det-ratio term vanishes identically and the
// curvature term is +(m+2)m(m-1)/(24N)), and exact small-model oracles:
// brute-force NML normalization over count classes, Jeffreys-mixture code
// lengths by adaptive quadrature, the mixture KL decomposition, and the
// Bayes-regret expansion against a discretized prior.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "geomdl/detail/quadrature.hpp"
#include "geomdl/errors.hpp"
#include "geomdl/fishergeom.hpp"
#include "geomdl/gaussmodel.hpp"
#include "geomdl/symspace.hpp"
#include "geomdl/volume.hpp"

namespace geomdl {

struct ComplexityReport {
    double neg_loglik = 0.0;      // -log p(x^N | th^)
    double dim_term = 0.0;        // (n/2) log(N / 2pi)
    double log_vol = 0.0;         // log vol_g of the model manifold
    double ratio_term = 0.0;      // -log( sqrt(det g) / sqrt(det I) ) at th^
    double curvature_term = 0.0;  // -R(th^) / (6N)
    double total = 0.0;           // literal sum of the five terms above
    int n = 0;                    // manifold dimension
    long N = 0;                   // sample count
    int m = 0;                    // retained PCA dimension (Gaussian reports)
    int s = 0;                    // scale exponent (Gaussian reports)
    VolMode vol_mode = VolMode::quadrature;
    double log_I = 0.0;           // spectral-factor value used for log_vol
    double log_I_stderr = 0.0;    // MC standard error of log_I (mc mode only)
    std::vector<std::string> warnings;
};

struct ObservedInfo {
    SymMatrix matrix;  // I(x^N, th) = -(1/N) Hess_th log p(x^N | th)
    Vector point;
};

// Observed information of a discrete model from sufficient counts, by central
// finite differences of sum_i c_i log p_i(th).
inline ObservedInfo observed_info_discrete(const DiscreteModel& model,
                                           const std::vector<long>& counts,
                                           const Vector& theta) {
    if (static_cast<int>(counts.size()) != model.outcomes)
        throw invalid_input("observed_info_discrete: counts length must equal outcome count");
    if (theta.size() != model.n)
        throw invalid_input("observed_info_discrete: theta has wrong dimension");
    long N = 0;
    for (long c : counts) {
        if (c < 0) throw invalid_input("observed_info_discrete: negative count");
        N += c;
    }
    if (N < 1) throw invalid_input("observed_info_discrete: counts must sum to N >= 1");
    auto loglik = [&](const Vector& t) {
        const Vector p = detail::checked_prob(model, t);
        double acc = 0.0;
        for (int i = 0; i < model.outcomes; ++i) {
            if (counts[i] == 0) continue;  // 0 log 0 = 0
            if (p[i] <= 0.0)
                throw degenerate_model(
                    "observed_info_discrete: zero probability on an observed outcome");
            acc += counts[i] * std::log(p[i]);
        }
        return acc;
    };
    const int n = model.n;
    std::vector<double> h(n);
    for (int u = 0; u < n; ++u) h[u] = detail::fd_step(model.domain[u], theta[u], 1e-4);
    const double l0 = loglik(theta);
    Matrix hess = Matrix::Zero(n, n);
    for (int u = 0; u < n; ++u) {
        for (int v = u; v < n; ++v) {
            if (u == v) {
                Vector hi = theta, lo = theta;
                hi[u] += h[u];
                lo[u] -= h[u];
                hess(u, u) = (loglik(hi) - 2.0 * l0 + loglik(lo)) / (h[u] * h[u]);
            } else {
                Vector pp = theta, pm = theta, mp = theta, mm = theta;
                pp[u] += h[u]; pp[v] += h[v];
                pm[u] += h[u]; pm[v] -= h[v];
                mp[u] -= h[u]; mp[v] += h[v];
                mm[u] -= h[u]; mm[v] -= h[v];
                hess(u, v) = (loglik(pp) - loglik(pm) - loglik(mp) + loglik(mm)) /
                             (4.0 * h[u] * h[v]);
                hess(v, u) = hess(u, v);
            }
        }
    }
    ObservedInfo out{SymMatrix(Matrix(-hess / static_cast<double>(N))), theta};
    return out;
}

// Assembles the five-term report from precomputed parts.  curvature_term is
// -scalar_curvature/(6N); total is the literal left-to-right sum.
inline ComplexityReport geometric_complexity(double neg_loglik, int n, long N, double log_vol,
                                             double ratio_term, double scalar_curvature) {
    if (n < 1 || N < 1) throw invalid_input("geometric_complexity: need n >= 1 and N >= 1");
    if (!std::isfinite(neg_loglik) || !std::isfinite(log_vol) || !std::isfinite(ratio_term) ||
        !std::isfinite(scalar_curvature))
        throw invalid_input("geometric_complexity: non-finite input");
    const double two_pi = 6.283185307179586476925286766559;
    ComplexityReport r;
    r.n = n;
    r.N = N;
    r.neg_loglik = neg_loglik;
    r.dim_term = 0.5 * n * std::log(N / two_pi);
    r.log_vol = log_vol;
    r.ratio_term = ratio_term;
    r.curvature_term = -scalar_curvature / (6.0 * N);
    r.total = neg_loglik + r.dim_term + log_vol + ratio_term + r.curvature_term;
    return r;
}

// Rissanen's baseline: the same expression without ratio and curvature terms.
inline double rissanen_complexity(double neg_loglik, int n, long N, double log_vol) {
    if (n < 1 || N < 1) throw invalid_input("rissanen_complexity: need n >= 1 and N >= 1");
    const double two_pi = 6.283185307179586476925286766559;
    return neg_loglik + 0.5 * n * std::log(N / two_pi) + log_vol;
}

// Full report for the reduced zero-mean Gaussian family at retained dimension
// m and scale exponent s.  The det-ratio term is identically zero (observed
// information equals the Fisher metric at the constrained MLE), and the
// curvature term is +(m+2)m(m-1)/(24N) >= 0.
inline ComplexityReport gaussian_geometric_complexity(const Dataset& data, int m, int s,
                                                      VolMode mode, long samples = 100000,
                                                      std::uint64_t seed = 0xC0FFEEull) {
    if (s < 0) throw invalid_input("gaussian_geometric_complexity: s must be >= 0");
    const SpdMatrix sigma = empirical_cov(data);
    const PcaSplit split = pca_split(sigma, m);
    ComplexityReport r;
    r.N = data.N;
    r.m = m;
    r.s = s;
    r.vol_mode = mode;
    if (sigma.eigenvalues(0) < 1.0)
        r.warnings.push_back(
            "largest eigenvalue < 1: data variance is below the fundamental precision");
    if (m < data.d && split.lambda_bar < 1.0)
        r.warnings.push_back("discarded-eigenvalue average < 1: tail below fundamental precision");
    if (s == 0) {
        // M(0) = {I}: a single distribution, nothing to encode beyond the data.
        const ReducedModel rm = reduced_cov(split, spd_identity(m), 0);
        r.neg_loglik = -gauss_loglik(data, rm.Q);
        r.n = 0;
        r.total = r.neg_loglik;
        r.log_I = -std::numeric_limits<double>::infinity();
        r.warnings.push_back("s = 0: model manifold is the single point q = I");
        return r;
    }
    const SpdMatrix qhat = mle_q(split, s);
    for (int i = 0; i < m; ++i)
        if (split.lambdas[i] < 1.0) {
            r.warnings.push_back("MLE clipped at the lower boundary q >= I");
            break;
        }
    const ReducedModel rm = reduced_cov(split, qhat, s);
    const int n = m * (m + 1) / 2;
    if (data.N <= n)
        r.warnings.push_back("N <= m(m+1)/2: asymptotic expansion unreliable");
    const VolumeResult vol = log_vol_Ms(m, s, mode, samples, seed);
    r.neg_loglik = -gauss_loglik(data, rm.Q);
    r.n = n;
    const double two_pi = 6.283185307179586476925286766559;
    r.dim_term = 0.5 * n * std::log(data.N / two_pi);
    r.log_vol = vol.log_vol;
    r.ratio_term = 0.0;
    r.curvature_term = -pm_scalar_curvature(m) / (6.0 * data.N);
    r.total = r.neg_loglik + r.dim_term + r.log_vol + r.ratio_term + r.curvature_term;
    r.log_I = vol.log_I;
    r.log_I_stderr = vol.log_I_stderr;
    return r;
}

// Sweeps m over [m_lo, m_hi], scoring each with the same scale exponent s
// (fixed once from the full covariance).  Returns the smallest minimizer of
// the total together with the per-m table.
inline std::pair<int, std::vector<ComplexityReport>> select_pca_dim(
    const Dataset& data, int m_lo, int m_hi, VolMode mode, long samples = 100000,
    std::uint64_t seed = 0xC0FFEEull) {
    if (m_lo < 1 || m_hi > data.d || m_lo > m_hi)
        throw invalid_input("select_pca_dim: m range must be a non-empty subset of [1, d]");
    const SpdMatrix sigma = empirical_cov(data);
    const int s = scale_exponent(sigma);
    std::vector<ComplexityReport> table;
    table.reserve(m_hi - m_lo + 1);
    for (int m = m_lo; m <= m_hi; ++m)
        table.push_back(gaussian_geometric_complexity(data, m, s, mode, samples, seed));
    int best = 0;
    for (int i = 1; i < static_cast<int>(table.size()); ++i)
        if (table[i].total < table[best].total) best = i;
    return {m_lo + best, table};
}

namespace detail {

// log-likelihood of a count vector at theta, with the 0 log 0 = 0 convention;
// -inf when a positively-counted outcome has zero probability.
inline double count_loglik(const DiscreteModel& model, const std::vector<long>& counts,
                           const Vector& theta) {
    const Vector p = checked_prob(model, theta);
    double acc = 0.0;
    for (int i = 0; i < model.outcomes; ++i) {
        if (counts[i] == 0) continue;
        if (p[i] <= 0.0) return -std::numeric_limits<double>::infinity();
        acc += counts[i] * std::log(p[i]);
    }
    return acc;
}

// Golden-section maximization of f on [a, b] (unimodal assumption).
inline double golden_max(const std::function<double(double)>& f, double a, double b) {
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80 && (b - a) > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a); f2 = f(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a); f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// Maximized count log-likelihood over the model domain: dense grid scan
// (endpoints included; boundary MLEs such as Bernoulli counts (N,0) are
// legitimate) refined by golden section, coordinate-wise for n = 2.
inline double max_count_loglik(const DiscreteModel& model, const std::vector<long>& counts) {
    if (model.n == 0) return count_loglik(model, counts, Vector(0));
    if (model.n == 1) {
        const AxisSpec ax = model.domain[0];
        const int G = 257;
        int best = 0;
        double best_val = -std::numeric_limits<double>::infinity();
        auto eval = [&](double t) {
            Vector th(1);
            th[0] = t;
            return count_loglik(model, counts, th);
        };
        for (int i = 0; i < G; ++i) {
            const double t = ax.lower + (ax.upper - ax.lower) * i / (G - 1);
            const double v = eval(t);
            if (v > best_val) { best_val = v; best = i; }
        }
        const double lo = ax.lower + (ax.upper - ax.lower) * std::max(best - 1, 0) / (G - 1);
        const double hi = ax.lower + (ax.upper - ax.lower) * std::min(best + 1, G - 1) / (G - 1);
        const double t_star = golden_max(eval, lo, hi);
        return std::max(best_val, eval(t_star));
    }
    if (model.n == 2) {
        const AxisSpec ax0 = model.domain[0], ax1 = model.domain[1];
        const int G = 65;
        Vector th(2);
        double best_val = -std::numeric_limits<double>::infinity();
        Vector best_th(2);
        for (int i = 0; i < G; ++i)
            for (int j = 0; j < G; ++j) {
                th[0] = ax0.lower + (ax0.upper - ax0.lower) * i / (G - 1);
                th[1] = ax1.lower + (ax1.upper - ax1.lower) * j / (G - 1);
                const double v = count_loglik(model, counts, th);
                if (v > best_val) { best_val = v; best_th = th; }
            }
        th = best_th;
        const double w0 = (ax0.upper - ax0.lower) / (G - 1);
        const double w1 = (ax1.upper - ax1.lower) / (G - 1);
        for (int round = 0; round < 4; ++round) {
            th[0] = golden_max(
                [&](double t) { Vector u = th; u[0] = t; return count_loglik(model, counts, u); },
                std::max(ax0.lower, th[0] - w0), std::min(ax0.upper, th[0] + w0));
            th[1] = golden_max(
                [&](double t) { Vector u = th; u[1] = t; return count_loglik(model, counts, u); },
                std::max(ax1.lower, th[1] - w1), std::min(ax1.upper, th[1] + w1));
        }
        return std::max(best_val, count_loglik(model, counts, th));
    }
    throw invalid_input("max_count_loglik: grid MLE supports at most 2 parameters");
}

// Enumerates count vectors of K non-negative integers summing to N in
// lexicographic order, invoking fn(counts).
inline void for_each_count_class(int K, long N, const std::function<void(const std::vector<long>&)>& fn) {
    std::vector<long> c(K, 0);
    if (K == 1) {
        c[0] = N;
        fn(c);
        return;
    }
    if (K == 2) {
        for (long k = 0; k <= N; ++k) {
            c[0] = k;
            c[1] = N - k;
            fn(c);
        }
        return;
    }
    for (long a = 0; a <= N; ++a)
        for (long b = 0; b <= N - a; ++b) {
            c[0] = a;
            c[1] = b;
            c[2] = N - a - b;
            fn(c);
        }
}

inline double log_multinomial_coeff(long N, const std::vector<long>& counts) {
    double acc = std::lgamma(N + 1.0);
    for (long c : counts) acc -= std::lgamma(c + 1.0);
    return acc;
}

}  // namespace detail

// Exact log parametric complexity log sum_{y^N} p(y^N | th^(y^N)), accumulated
// over sufficient count classes in log space.
inline double nml_bruteforce(const DiscreteModel& model, long N) {
    if (N < 1) throw invalid_input("nml_bruteforce: N must be >= 1");
    if (model.outcomes > 3)
        throw resource_error("nml_bruteforce: enumeration supports at most 3 outcomes");
    if (N > 5000) throw resource_error("nml_bruteforce: N capped at 5000");
    const double classes =
        model.outcomes == 3 ? 0.5 * (N + 1.0) * (N + 2.0) : static_cast<double>(N + 1);
    if (classes > 2e6) throw resource_error("nml_bruteforce: too many count classes");
    double peak = -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    detail::for_each_count_class(model.outcomes, N, [&](const std::vector<long>& counts) {
        const double term =
            detail::log_multinomial_coeff(N, counts) + detail::max_count_loglik(model, counts);
        if (!std::isfinite(term)) return;
        if (term <= peak) {
            acc += std::exp(term - peak);
        } else {
            acc = acc * std::exp(peak - term) + 1.0;
            peak = term;
        }
    });
    if (!(acc > 0.0) || !std::isfinite(peak))
        throw accuracy_error("nml_bruteforce: empty accumulation");
    return peak + std::log(acc);
}

namespace detail {

// log of sqrt(det g) at theta, with degenerate boundary neighborhoods
// truncated to zero mass (the Fisher FD stencil needs p > 0).
inline double log_sqrt_det_metric(const DiscreteModel& model, const Vector& theta) {
    try {
        const SymMatrix g = fisher_outer(model, theta);
        const auto [lam, vec] = eigh(g);
        (void)vec;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
            if (!(lam[i] > 0.0)) return -std::numeric_limits<double>::infinity();
            acc += std::log(lam[i]);
        }
        return 0.5 * acc;
    } catch (const degenerate_model&) {
        return -std::numeric_limits<double>::infinity();
    } catch (const domain_error&) {
        return -std::numeric_limits<double>::infinity();
    }
}

}  // namespace detail

// Code length of the Jeffreys-mixture code: -log m_N(x^N) with
// m_N = (1/vol_g) * integral of p(x^N|th) sqrt(det g) dth, for a specific
// sequence with the given sufficient counts (no multinomial coefficient).
inline double jeffreys_mixture_length(const DiscreteModel& model, const std::vector<long>& counts,
                                      long N) {
    if (static_cast<int>(counts.size()) != model.outcomes)
        throw invalid_input("jeffreys_mixture_length: counts length must equal outcome count");
    long total = 0;
    for (long c : counts) {
        if (c < 0) throw invalid_input("jeffreys_mixture_length: negative count");
        total += c;
    }
    if (total != N) throw invalid_input("jeffreys_mixture_length: counts must sum to N");
    if (N < 1) throw invalid_input("jeffreys_mixture_length: N must be >= 1");
    if (model.n == 1) {
        const AxisSpec ax = model.domain[0];
        const double log_vol = std::log(detail::adaptive_gk(
            [&](double t) {
                Vector th(1);
                th[0] = t;
                return std::exp(detail::log_sqrt_det_metric(model, th));
            },
            ax.lower, ax.upper, 1e-10));
        const double log_integral = detail::log_integrate_1d(
            [&](double t) {
                Vector th(1);
                th[0] = t;
                const double l = detail::count_loglik(model, counts, th);
                return l + detail::log_sqrt_det_metric(model, th);
            },
            ax.lower, ax.upper, 1e-10);
        return log_vol - log_integral;
    }
    if (model.n == 2) {
        const AxisSpec ax0 = model.domain[0], ax1 = model.domain[1];
        auto inner = [&](double t0, const std::function<double(const Vector&)>& lf) {
            try {
                return detail::log_integrate_1d(
                    [&](double t1) {
                        Vector th(2);
                        th[0] = t0;
                        th[1] = t1;
                        return lf(th);
                    },
                    ax1.lower, ax1.upper, 1e-10, 129);
            } catch (const accuracy_error&) {
                // Outer refinement can push nodes into the boundary sliver
                // where the probability floor truncates the whole line to
                // zero mass; score it as such instead of failing the run.
                return -std::numeric_limits<double>::infinity();
            }
        };
        const std::function<double(const Vector&)> l_vol = [&](const Vector& th) {
            return detail::log_sqrt_det_metric(model, th);
        };
        const std::function<double(const Vector&)> l_mix = [&](const Vector& th) {
            return detail::count_loglik(model, counts, th) + detail::log_sqrt_det_metric(model, th);
        };
        const double log_vol = detail::log_integrate_1d(
            [&](double t0) { return inner(t0, l_vol); }, ax0.lower, ax0.upper, 1e-8, 129);
        const double log_integral = detail::log_integrate_1d(
            [&](double t0) { return inner(t0, l_mix); }, ax0.lower, ax0.upper, 1e-8, 129);
        return log_vol - log_integral;
    }
    throw invalid_input("jeffreys_mixture_length: quadrature supports 1 or 2 parameters");
}

struct GridPrior {
    std::vector<Vector> thetas;
    std::vector<double> weights;  // normalized internally by consumers
};

struct KlDecomposition {
    double lhs = 0.0;        // sum_j w_j D(P_j^N || Q)
    double rhs_part1 = 0.0;  // sum_j w_j D(P_j^N || M), M = sum_j w_j P_j^N
    double rhs_part2 = 0.0;  // D(M || Q)
};

namespace detail {

inline std::vector<double> normalized_weights(const GridPrior& prior) {
    if (prior.thetas.size() != prior.weights.size() || prior.thetas.empty())
        throw invalid_input("grid prior: thetas and weights must be non-empty and equal length");
    double total = 0.0;
    for (double w : prior.weights) {
        if (!(w >= 0.0)) throw invalid_input("grid prior: weights must be non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw invalid_input("grid prior: weights sum to zero");
    std::vector<double> out(prior.weights);
    for (double& w : out) w /= total;
    return out;
}

}  // namespace detail

// Mixture distribution over outcome sequences of length N, indexed by the
// little-endian base-K encoding idx = sum_t x_t K^t.
inline std::vector<double> mixture_sequence_dist(const DiscreteModel& model,
                                                 const GridPrior& prior, long N) {
    const std::vector<double> w = detail::normalized_weights(prior);
    const int K = model.outcomes;
    double pow_seq = 1.0;
    for (long t = 0; t < N; ++t) pow_seq *= K;
    if (pow_seq > 1e4) throw resource_error("sequence enumeration exceeds 10^4");
    const long S = static_cast<long>(pow_seq);
    std::vector<Vector> probs;
    probs.reserve(w.size());
    for (const Vector& th : prior.thetas) probs.push_back(detail::checked_prob(model, th));
    std::vector<double> mix(S, 0.0);
    for (long idx = 0; idx < S; ++idx) {
        long rem = idx;
        std::vector<int> digits(N);
        for (long t = 0; t < N; ++t) {
            digits[t] = static_cast<int>(rem % K);
            rem /= K;
        }
        for (size_t j = 0; j < w.size(); ++j) {
            double p = w[j];
            for (long t = 0; t < N; ++t) p *= probs[j][digits[t]];
            mix[idx] += p;
        }
    }
    return mix;
}

// Exact check of the mixture KL decomposition
//   sum_j w_j D(P_j || Q) = sum_j w_j D(P_j || M) + D(M || Q)
// over all K^N sequences, with q an arbitrary distribution over sequences.
// Conventions: P = 0 contributes 0; Q = 0 with P > 0 yields +inf.
inline KlDecomposition kl_decomposition_check(const DiscreteModel& model, const GridPrior& prior,
                                              const std::vector<double>& q, long N) {
    const std::vector<double> w = detail::normalized_weights(prior);
    const int K = model.outcomes;
    double pow_seq = 1.0;
    for (long t = 0; t < N; ++t) pow_seq *= K;
    if (pow_seq > 1e4) throw resource_error("kl_decomposition_check: K^N exceeds 10^4");
    const long S = static_cast<long>(pow_seq);
    if (static_cast<long>(q.size()) != S)
        throw invalid_input("kl_decomposition_check: q must have one entry per sequence");
    double q_total = 0.0;
    for (double v : q) {
        if (!(v >= 0.0)) throw invalid_input("kl_decomposition_check: q must be non-negative");
        q_total += v;
    }
    if (std::abs(q_total - 1.0) > 1e-9)
        throw invalid_input("kl_decomposition_check: q must sum to 1");
    std::vector<Vector> probs;
    probs.reserve(w.size());
    for (const Vector& th : prior.thetas) probs.push_back(detail::checked_prob(model, th));
    KlDecomposition out;
    std::vector<double> pj(w.size());
    for (long idx = 0; idx < S; ++idx) {
        long rem = idx;
        double mix = 0.0;
        for (long t = 0; t < N; ++t) {
            const int digit = static_cast<int>(rem % K);
            rem /= K;
            for (size_t j = 0; j < w.size(); ++j)
                pj[j] = (t == 0 ? 1.0 : pj[j]) * probs[j][digit];
        }
        if (N == 0)
            for (size_t j = 0; j < w.size(); ++j) pj[j] = 1.0;
        for (size_t j = 0; j < w.size(); ++j) mix += w[j] * pj[j];
        const double log_q = std::log(q[idx]);
        const double log_mix = std::log(mix);
        for (size_t j = 0; j < w.size(); ++j) {
            if (w[j] == 0.0 || pj[j] <= 0.0) continue;
            const double log_p = std::log(pj[j]);
            out.lhs += w[j] * pj[j] * (log_p - log_q);
            out.rhs_part1 += w[j] * pj[j] * (log_p - log_mix);
        }
        if (mix > 0.0) out.rhs_part2 += mix * (log_mix - log_q);
    }
    return out;
}

// Bayes regret of the mixture code against the discretized prior,
//   exact = sum_j w_j D(P_j^N || M_N),
// computed over sufficient count classes, together with the two-term
// expansion (n/2) log(N/2pi) - D(w || w_Jeffreys), where the Jeffreys grid
// weights are proportional to sqrt(det g(th_j)) (uniformly spaced atoms).
inline std::pair<double, double> bayes_regret_expansion_check(const DiscreteModel& model,
                                                              const GridPrior& prior, long N) {
    if (N < 1) throw invalid_input("bayes_regret_expansion_check: N must be >= 1");
    if (model.outcomes > 3)
        throw resource_error("bayes_regret_expansion_check: at most 3 outcomes");
    if (N > 5000) throw resource_error("bayes_regret_expansion_check: N capped at 5000");
    const std::vector<double> w = detail::normalized_weights(prior);
    const long J = static_cast<long>(w.size());
    const double classes =
        model.outcomes == 3 ? 0.5 * (N + 1.0) * (N + 2.0) : static_cast<double>(N + 1);
    if (classes * J > 5e7)
        throw resource_error("bayes_regret_expansion_check: class-grid product too large");
    const int K = model.outcomes;
    // Per-atom log outcome probabilities (-inf where an outcome vanishes).
    std::vector<std::vector<double>> logp(J, std::vector<double>(K));
    for (long j = 0; j < J; ++j) {
        const Vector p = detail::checked_prob(model, prior.thetas[j]);
        for (int i = 0; i < K; ++i)
            logp[j][i] = p[i] > 0.0 ? std::log(p[i]) : -std::numeric_limits<double>::infinity();
    }
    double exact = 0.0;
    std::vector<double> lp(J);
    detail::for_each_count_class(K, N, [&](const std::vector<long>& counts) {
        const double log_coeff = detail::log_multinomial_coeff(N, counts);
        double peak = -std::numeric_limits<double>::infinity();
        for (long j = 0; j < J; ++j) {
            double acc = 0.0;
            for (int i = 0; i < K; ++i)
                if (counts[i] > 0) acc += counts[i] * logp[j][i];
            lp[j] = acc;
            if (w[j] > 0.0 && std::isfinite(acc))
                peak = std::max(peak, std::log(w[j]) + acc);
        }
        if (!std::isfinite(peak)) return;  // class unreachable under the prior
        double mix = 0.0;
        for (long j = 0; j < J; ++j)
            if (w[j] > 0.0 && std::isfinite(lp[j])) mix += std::exp(std::log(w[j]) + lp[j] - peak);
        const double log_mix = peak + std::log(mix);
        for (long j = 0; j < J; ++j) {
            if (w[j] == 0.0 || !std::isfinite(lp[j])) continue;
            const double class_prob = std::exp(log_coeff + lp[j]);
            exact += w[j] * class_prob * (lp[j] - log_mix);
        }
    });
    // Jeffreys grid weights on the same atoms.
    std::vector<double> log_wj(J);
    double peak = -std::numeric_limits<double>::infinity();
    for (long j = 0; j < J; ++j) {
        log_wj[j] = detail::log_sqrt_det_metric(model, prior.thetas[j]);
        peak = std::max(peak, log_wj[j]);
    }
    if (!std::isfinite(peak))
        throw degenerate_model("bayes_regret_expansion_check: Fisher metric vanishes on the grid");
    double z = 0.0;
    for (long j = 0; j < J; ++j) z += std::exp(log_wj[j] - peak);
    const double log_z = peak + std::log(z);
    double kl = 0.0;
    for (long j = 0; j < J; ++j) {
        if (w[j] == 0.0) continue;
        if (!std::isfinite(log_wj[j]))
            throw degenerate_model(
                "bayes_regret_expansion_check: prior mass on a degenerate atom");
        kl += w[j] * (std::log(w[j]) - (log_wj[j] - log_z));
    }
    const double two_pi = 6.283185307179586476925286766559;
    const double expansion = 0.5 * model.n * std::log(N / two_pi) - kl;
    return {exact, expansion};
}

}  // namespace geomdl
