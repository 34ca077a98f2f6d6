// Acceptance gate: ten end-to-end checks with pinned tolerances.  Each prints
// one [PASS]/[FAIL] line; the exit status is the number of failures.  Oracles
// are built from the primitive helpers in support.hpp, not from the library
// routines they certify.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "geomdl/cli.hpp"
#include "geomdl/fishergeom.hpp"
#include "geomdl/gaussmodel.hpp"
#include "geomdl/laplace.hpp"
#include "geomdl/regret.hpp"
#include "geomdl/symspace.hpp"
#include "geomdl/volume.hpp"
#include "support.hpp"

using geomdl::Matrix;
using geomdl::SymMatrix;
using geomdl::Vector;

namespace {

std::string strf(const char* fmt, ...) {
    char buf[1024];
    va_list args;
    va_start(args, fmt);
    vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return std::string(buf);
}

struct Verdict {
    bool ok = false;
    std::string detail;
};

// --- 1: curvature bracket upgrades the sphere error from O(1/N) to O(1/N^2)

Verdict criterion_sphere_order() {
    const std::vector<long> ladder{25, 50, 100, 200};
    geomdl::LaplaceInput inp;
    inp.n = 2;
    inp.f_max = 0.0;
    inp.hess = SymMatrix(-Matrix::Identity(2, 2));
    inp.g_p0 = SymMatrix(Matrix::Identity(2, 2));
    inp.ricci_p0 = SymMatrix(Matrix::Identity(2, 2));  // unit 2-sphere: Ric = g
    std::vector<double> logn, log_curved, log_plain;
    double err200_curved = 0.0;
    for (long N : ladder) {
        const double oracle =
            2.0 * support::kPi *
            support::simpson([N](double r) { return std::exp(-0.5 * N * r * r) * std::sin(r); },
                             0.0, support::kPi, 20000);
        inp.N = static_cast<double>(N);
        const double ec = std::abs(geomdl::laplace_approx(inp) / oracle - 1.0);
        const double ep = std::abs(geomdl::laplace_rn(0.0, inp.hess, inp.N, 2, 1.0) / oracle - 1.0);
        logn.push_back(std::log(static_cast<double>(N)));
        log_curved.push_back(std::log(ec));
        log_plain.push_back(std::log(ep));
        if (N == 200) err200_curved = ec;
    }
    const double sc = support::fit_slope(logn, log_curved);
    const double sp = support::fit_slope(logn, log_plain);
    Verdict v;
    v.ok = std::abs(sc + 2.0) <= 0.3 && err200_curved <= 5e-5 && std::abs(sp + 1.0) <= 0.3;
    v.detail = strf("slope with bracket %.3f (want -2 +/- 0.3), err(200) = %.2e (cap 5e-5), "
                    "slope without %.3f (want -1 +/- 0.3)",
                    sc, err200_curved, sp);
    return v;
}

// --- 2: circle integral vs Bessel series; approximation error O(1/N)

Verdict criterion_circle_sanity() {
    const std::vector<long> ladder{25, 50, 100, 200};
    geomdl::LaplaceInput inp;
    inp.n = 1;
    inp.f_max = 1.0;
    inp.hess = SymMatrix(-Matrix::Identity(1, 1));
    inp.g_p0 = SymMatrix(Matrix::Identity(1, 1));
    inp.ricci_p0 = SymMatrix(Matrix::Zero(1, 1));
    double worst_series = 0.0, worst_ratio = 0.0;
    std::vector<double> logn, logerr;
    for (long N : ladder) {
        // Quadrature in the scaled form exp(N(cos t - 1)) keeps every node finite.
        const double log_oracle =
            N + std::log(support::simpson(
                    [N](double t) { return std::exp(N * (std::cos(t) - 1.0)); }, 0.0,
                    2.0 * support::kPi, 20000));
        const double log_series = std::log(2.0 * support::kPi) + support::bessel_log_i0(N);
        worst_series = std::max(worst_series, std::abs(std::expm1(log_oracle - log_series)));
        inp.N = static_cast<double>(N);
        const double err = std::abs(geomdl::laplace_approx(inp) / std::exp(log_oracle) - 1.0);
        worst_ratio = std::max(worst_ratio, std::abs(err * 8.0 * N - 1.0));
        logn.push_back(std::log(static_cast<double>(N)));
        logerr.push_back(std::log(err));
    }
    const double slope = support::fit_slope(logn, logerr);
    Verdict v;
    v.ok = worst_series <= 1e-8 && std::abs(slope + 1.0) <= 0.3 && worst_ratio < 0.5;
    v.detail = strf("oracle-vs-Bessel rel err %.2e (cap 1e-8), error slope %.3f "
                    "(want -1 +/- 0.3), max |8N err - 1| = %.3f",
                    worst_series, slope, worst_ratio);
    return v;
}

// --- 3: normal-coordinate volume expansion on the unit sphere

Verdict criterion_normal_expansion() {
    const geomdl::MetricField field = support::sphere_normal_chart();
    const double residual = geomdl::normal_expansion_check(
        field, Vector::Zero(2), {0.1, 0.2, 0.3, 0.4, 0.5});
    Verdict v;
    v.ok = residual > 0.0 && residual <= 0.05;
    v.detail = strf("max |sqrt(det g) - (1 - r^2/6)| / r^3 = %.4f (cap 0.05)", residual);
    return v;
}

// --- 4: Fisher metric identities on Bernoulli and trinomial grids

Verdict criterion_fisher_identities() {
    const geomdl::DiscreteModel bern = support::bernoulli();
    const geomdl::DiscreteModel trin = support::trinomial_simplex();

    double worst_forms = 0.0;
    auto probe_forms = [&](const geomdl::DiscreteModel& model, const Vector& t) {
        const Matrix a = geomdl::fisher_outer(model, t).entries;
        const Matrix b = geomdl::fisher_hessian(model, t).entries;
        worst_forms = std::max(worst_forms, (a - b).cwiseAbs().maxCoeff());
    };
    for (double t : {0.12, 0.5, 0.87}) probe_forms(bern, Vector::Constant(1, t));
    for (auto [a, b] : {std::pair{0.2, 0.3}, {0.4, 0.15}, {0.25, 0.5}}) {
        Vector t(2);
        t << a, b;
        probe_forms(trin, t);
    }

    double worst_ext = 0.0;
    auto probe_ext = [&](const geomdl::DiscreteModel& model, const Vector& t) {
        for (long N : {2L, 3L}) {
            const auto [g_n, g] = geomdl::extensive_check(model, t, N);
            const Matrix want = static_cast<double>(N) * g.entries;
            worst_ext = std::max(worst_ext, (g_n.entries - want).cwiseAbs().maxCoeff() /
                                                want.cwiseAbs().maxCoeff());
        }
    };
    probe_ext(bern, Vector::Constant(1, 0.3));
    {
        Vector t(2);
        t << 0.3, 0.25;
        probe_ext(trin, t);
    }

    double worst_factor = 0.0;
    auto probe_factor = [&](const geomdl::DiscreteModel& model, const Vector& t) {
        const Matrix f = geomdl::simplex_sphere_factor(model, t);
        const Matrix want = 4.0 * Matrix::Identity(f.rows(), f.cols());
        worst_factor = std::max(worst_factor, (f - want).cwiseAbs().maxCoeff());
    };
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) probe_factor(bern, Vector::Constant(1, t));
    for (auto [a, b] : {std::pair{0.2, 0.3}, {0.35, 0.45}, {0.5, 0.2}}) {
        Vector t(2);
        t << a, b;
        probe_factor(trin, t);
    }

    Verdict v;
    v.ok = worst_forms <= 5e-5 && worst_ext <= 5e-5 && worst_factor <= 1e-3;
    v.detail = strf("outer-vs-Hessian %.2e (cap 5e-5), extensivity %.2e (cap 5e-5), "
                    "sphere factor |F - 4I| %.2e (cap 1e-3)",
                    worst_forms, worst_ext, worst_factor);
    return v;
}

// --- 5: numerical scalar curvature of P_m at the identity

Verdict criterion_spd_curvature() {
    double r2 = 0.0, r3 = 0.0;
    for (int m : {2, 3}) {
        const geomdl::MetricField field = geomdl::pm_metric_field(m);
        const Vector at = geomdl::sym_to_coords(geomdl::sym_identity(m));
        const double scalar = geomdl::ricci_numeric(field, at).scalar;
        (m == 2 ? r2 : r3) = scalar;
    }
    Verdict v;
    v.ok = std::abs(r2 - (-2.0)) <= 1e-2 && std::abs(r3 - (-7.5)) <= 1e-2 &&
           geomdl::pm_scalar_curvature(2) == -2.0 && geomdl::pm_scalar_curvature(3) == -7.5;
    v.detail = strf("R(m=2) = %.5f (want -2 +/- 1e-2), R(m=3) = %.5f (want -7.5 +/- 1e-2)", r2,
                    r3);
    return v;
}

// --- 6: volume pipeline against closed forms, ambient quadrature, and bounds

Verdict criterion_volume_pipeline() {
    using geomdl::VolMode;
    double worst_m1 = 0.0;
    for (int s : {1, 2, 3}) {
        const double got = geomdl::log_vol_Ms(1, s, VolMode::quadrature).log_vol;
        const double want = std::log(std::sqrt(2.0) * s * std::log(2.0));
        worst_m1 = std::max(worst_m1, std::abs(got - want));
    }

    const double assembled = geomdl::log_vol_Ms(2, 1, VolMode::quadrature).log_vol;
    const double ambient = support::ambient_log_vol_m2(1);
    const double m2_err = std::abs(assembled - ambient);

    double worst_barnes = 0.0;
    for (int m = 1; m <= 12; ++m) {
        double direct = 0.0;
        for (int j = 1; j <= m; ++j) direct += std::lgamma(0.5 * j);
        worst_barnes = std::max(worst_barnes,
                                std::abs(geomdl::log_gamma_half_sum_closed(m) - direct));
    }

    bool below_upper = true;
    double worst_sigma = 0.0;
    for (int m = 1; m <= 4; ++m)
        for (int s : {1, 2, 4}) {
            const auto [mc, se] = geomdl::log_I_mc(m, s, 100000, 0xC0FFEEull);
            below_upper = below_upper && mc <= geomdl::i_bounds(m, s).second + 1e-9;
            if (m <= 3) {
                const double quad = geomdl::log_I_quad(m, s);
                const double sigmas = se > 0.0 ? std::abs(mc - quad) / se
                                               : (mc == quad ? 0.0 : 1e99);
                worst_sigma = std::max(worst_sigma, sigmas);
            }
        }

    Verdict v;
    v.ok = worst_m1 <= 1e-8 && m2_err <= 1e-4 && worst_barnes <= 1e-8 && below_upper &&
           worst_sigma <= 3.0;
    v.detail = strf("m=1 closed form %.2e (cap 1e-8), m=2 ambient %.2e (cap 1e-4), "
                    "Barnes %.2e (cap 1e-8), MC below upper bound: %s, worst |mc-quad| = "
                    "%.2f sigma (cap 3)",
                    worst_m1, m2_err, worst_barnes, below_upper ? "yes" : "NO", worst_sigma);
    return v;
}

// --- 7: brute-force Bernoulli complexity vs the asymptotic formula

Verdict criterion_nml_ladder() {
    const geomdl::DiscreteModel bern = support::bernoulli();
    std::vector<double> diffs;
    for (long N : {125L, 250L, 500L, 1000L}) {
        const double formula =
            0.5 * std::log(N / (2.0 * support::kPi)) + std::log(support::kPi);
        diffs.push_back(geomdl::nml_bruteforce(bern, N) - formula);
    }
    bool monotone = true;
    for (size_t i = 1; i < diffs.size(); ++i) monotone = monotone && diffs[i] < diffs[i - 1];
    Verdict v;
    v.ok = monotone && std::abs(diffs.back()) <= 0.05;
    v.detail = strf("diffs = {%.4f, %.4f, %.4f, %.4f}, monotone: %s, |diff(1000)| cap 0.05",
                    diffs[0], diffs[1], diffs[2], diffs[3], monotone ? "yes" : "NO");
    return v;
}

// --- 8: KL decomposition identity and Bayes-regret expansion

Verdict criterion_bayes_redundancy() {
    const geomdl::DiscreteModel bern = support::bernoulli();
    const geomdl::GridPrior small = support::bernoulli_grid_prior(16, "jeffreys");
    const std::vector<double> mix = geomdl::mixture_sequence_dist(bern, small, 2);

    double worst_identity = 0.0;
    for (const std::vector<double>& q :
         {mix, std::vector<double>(4, 0.25)}) {
        const geomdl::KlDecomposition d = geomdl::kl_decomposition_check(bern, small, q, 2);
        worst_identity = std::max(worst_identity,
                                  std::abs(d.lhs - (d.rhs_part1 + d.rhs_part2)));
    }
    const geomdl::KlDecomposition point =
        geomdl::kl_decomposition_check(bern, small, {1.0, 0.0, 0.0, 0.0}, 2);
    const bool point_ok = std::isinf(point.lhs) && std::isinf(point.rhs_part2) &&
                          std::isfinite(point.rhs_part1);

    const geomdl::GridPrior jeff = support::bernoulli_grid_prior(512, "jeffreys");
    std::vector<double> gaps;
    double exact_j_1000 = 0.0;
    for (long N : {250L, 500L, 1000L}) {
        const auto [exact, expansion] = geomdl::bayes_regret_expansion_check(bern, jeff, N);
        gaps.push_back(std::abs(exact - expansion));
        if (N == 1000) exact_j_1000 = exact;
    }
    const bool shrinking = gaps[1] <= gaps[0] && gaps[2] <= gaps[1];

    const double exact_uniform =
        geomdl::bayes_regret_expansion_check(bern, support::bernoulli_grid_prior(512, "uniform"),
                                             1000)
            .first;
    const double exact_beta22 =
        geomdl::bayes_regret_expansion_check(bern, support::bernoulli_grid_prior(512, "beta22"),
                                             1000)
            .first;
    const bool jeffreys_max = exact_j_1000 > exact_uniform && exact_j_1000 > exact_beta22;

    Verdict v;
    v.ok = worst_identity <= 1e-8 && point_ok && shrinking && jeffreys_max;
    v.detail = strf("identity defect %.2e (cap 1e-8), point-mass case: %s, gaps = "
                    "{%.4f, %.4f, %.4f}, exact regret J/U/B22 = %.4f/%.4f/%.4f",
                    worst_identity, point_ok ? "ok" : "BAD", gaps[0], gaps[1], gaps[2],
                    exact_j_1000, exact_uniform, exact_beta22);
    return v;
}

// --- 9: observed information equals the closed-form metric at the MLE

Verdict criterion_ratio_term() {
    const geomdl::Dataset data = support::load_fixture("rank3.csv");
    double worst = 0.0;
    for (int m : {1, 2, 3}) {
        const geomdl::PcaSplit split = geomdl::pca_split(geomdl::empirical_cov(data), m);
        const geomdl::SpdMatrix qhat = geomdl::mle_q(split, 2);
        const Matrix fd = support::fd_gauss_observed_info(data, m, 2);
        const Matrix metric = geomdl::pm_metric_matrix(qhat).entries;
        worst = std::max(worst, (fd - metric).cwiseAbs().maxCoeff());
    }
    const geomdl::ComplexityReport rep =
        geomdl::gaussian_geometric_complexity(data, 2, 2, geomdl::VolMode::upper_bound);
    Verdict v;
    v.ok = worst <= 1e-4 && rep.ratio_term == 0.0;
    v.detail = strf("max |observed - Fisher| entry = %.2e over m in {1,2,3} (cap 1e-4), "
                    "report ratio term = %g",
                    worst, rep.ratio_term);
    return v;
}

// --- 10: end-to-end selection through the installed binary

Verdict criterion_end_to_end() {
    const std::string base = std::string(GEOMDL_BIN) + " pca-select --format json --input ";
    const std::string rank3 = base + GEOMDL_DATA_DIR "/rank3.csv";
    const auto a = support::run_binary(rank3);
    const auto b = support::run_binary(rank3);
    const auto iso = support::run_binary(base + GEOMDL_DATA_DIR "/isotropic.csv");
    int m_rank3 = -1, m_iso = -1;
    if (a.exit_code == 0) m_rank3 = nlohmann::json::parse(a.output)["selected_m"].get<int>();
    if (iso.exit_code == 0) m_iso = nlohmann::json::parse(iso.output)["selected_m"].get<int>();
    const bool stable = a.exit_code == 0 && b.exit_code == 0 && a.output == b.output;
    Verdict v;
    v.ok = m_rank3 == 3 && m_iso == 1 && stable;
    v.detail = strf("rank3 m* = %d (want 3), isotropic m* = %d (want 1), reruns byte-identical: "
                    "%s",
                    m_rank3, m_iso, stable ? "yes" : "NO");
    return v;
}

}  // namespace

int main() {
    struct Item {
        const char* what;
        Verdict (*fn)();
    };
    const std::vector<Item> items{
        {"sphere Laplace error gains an order with the curvature bracket", criterion_sphere_order},
        {"circle integral matches the Bessel series and O(1/N) error", criterion_circle_sanity},
        {"normal-coordinate volume expansion residual", criterion_normal_expansion},
        {"Fisher metric identities (forms, extensivity, sphere factor)", criterion_fisher_identities},
        {"numerical scalar curvature of the SPD manifold", criterion_spd_curvature},
        {"volume pipeline (closed forms, ambient quadrature, bounds)", criterion_volume_pipeline},
        {"brute-force complexity vs asymptotic formula", criterion_nml_ladder},
        {"KL decomposition and Bayes-regret expansion", criterion_bayes_redundancy},
        {"observed information matches the metric (ratio term vanishes)", criterion_ratio_term},
        {"end-to-end dimension selection is correct and reproducible", criterion_end_to_end},
    };
    int failures = 0;
    for (size_t i = 0; i < items.size(); ++i) {
        Verdict v;
        try {
            v = items[i].fn();
        } catch (const std::exception& e) {
            v.ok = false;
            v.detail = strf("threw: %s", e.what());
        }
        std::printf("[%s] criterion %zu: %s (%s)\n", v.ok ? "PASS" : "FAIL", i + 1,
                    items[i].what, v.detail.c_str());
        if (!v.ok) ++failures;
    }
    if (failures == 0)
        std::printf("all %zu acceptance criteria passed\n", items.size());
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures;
}
