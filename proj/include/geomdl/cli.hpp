#pragma once

// Command front end shared by the geomdl binary and the CLI tests: run
// configuration, delimiter-sniffing CSV ingestion, the five subcommand
// renderers (pca-select, complexity, volume, laplace-check, regret-check),
// table/JSON serialization, and the exception -> exit-code mapping.
//
// Reports are deterministic byte-for-byte under a fixed configuration: the
// MC seed is fixed, reductions are ordered, and JSON keys are sorted.

#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geomdl/detail/quadrature.hpp"
#include "geomdl/errors.hpp"
#include "geomdl/fishergeom.hpp"
#include "geomdl/gaussmodel.hpp"
#include "geomdl/laplace.hpp"
#include "geomdl/regret.hpp"
#include "geomdl/symspace.hpp"
#include "geomdl/volume.hpp"

namespace geomdl::cli {

inline constexpr const char* kVersion = "1.0.0";

struct RunConfig {
    std::string command;
    std::string input;
    std::vector<double> precision;  // empty -> 1 per coordinate; one value -> broadcast
    int m_lo = 1;
    int m_hi = 0;  // 0 -> data dimension
    VolMode vol_mode = VolMode::monte_carlo;
    long mc_samples = 100000;
    std::uint64_t seed = 0xC0FFEEull;
    std::string format = "table";  // "table" | "json"
    std::string output;            // empty -> stdout
    int vol_m = 2;                 // volume subcommand
    int vol_s = 1;
    std::vector<long> ladder;      // laplace-check / regret-check N ladder
    std::string lap_case = "all";
};

namespace detail {

inline std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return std::string(buf);
}

inline bool parse_double(const std::string& tok, double& out) {
    const auto begin = tok.find_first_not_of(" \t");
    if (begin == std::string::npos) return false;
    const auto end = tok.find_last_not_of(" \t");
    const std::string body = tok.substr(begin, end - begin + 1);
    char* stop = nullptr;
    out = std::strtod(body.c_str(), &stop);
    return stop == body.c_str() + body.size() && stop != body.c_str();
}

inline std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    if (delim == 0) {  // any whitespace run
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) out.push_back(tok);
        return out;
    }
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline char sniff_delimiter(const std::string& line) {
    long commas = 0, tabs = 0, semis = 0;
    for (char c : line) {
        if (c == ',') ++commas;
        if (c == '\t') ++tabs;
        if (c == ';') ++semis;
    }
    if (commas >= tabs && commas >= semis && commas > 0) return ',';
    if (tabs >= semis && tabs > 0) return '\t';
    if (semis > 0) return ';';
    return 0;
}

}  // namespace detail

// Reads a delimited text file of one observation per row into a d x N matrix
// (observations as columns).  The delimiter is sniffed from the first content
// line; a non-numeric first row is treated as a header.
inline Matrix load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open input file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    long line_no = 0;
    char delim = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (first_content) delim = detail::sniff_delimiter(line);
        const std::vector<std::string> tokens = detail::split_line(line, delim);
        std::vector<double> vals(tokens.size());
        std::string bad;
        for (size_t i = 0; i < tokens.size(); ++i)
            if (!detail::parse_double(tokens[i], vals[i])) {
                bad = tokens[i];
                break;
            }
        if (!bad.empty() || tokens.empty()) {
            if (first_content) {  // header row
                first_content = false;
                continue;
            }
            throw invalid_input(detail::strf("line %ld: cannot parse '%s' as a number", line_no,
                                             bad.c_str()));
        }
        first_content = false;
        if (!rows.empty() && vals.size() != rows.front().size())
            throw invalid_input(detail::strf("line %ld: expected %zu columns, got %zu", line_no,
                                             rows.front().size(), vals.size()));
        rows.push_back(std::move(vals));
    }
    if (rows.size() < 2) throw insufficient_data("need at least 2 data rows");
    Matrix values(rows.front().size(), rows.size());
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows.front().size(); ++c)
            values(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = rows[r][c];
    return values;
}

namespace detail {

struct LoadedData {
    Dataset data;
    std::vector<std::string> warnings;
};

inline LoadedData load_dataset(const RunConfig& cfg) {
    if (cfg.input.empty()) throw invalid_input("no input file given (--input)");
    const Matrix values = load_csv(cfg.input);
    const int d = static_cast<int>(values.rows());
    Vector prec = Vector::Ones(d);
    if (cfg.precision.size() == 1) {
        prec.setConstant(cfg.precision.front());
    } else if (!cfg.precision.empty()) {
        if (static_cast<int>(cfg.precision.size()) != d)
            throw invalid_input(detail::strf("precision list has %zu entries for %d columns",
                                             cfg.precision.size(), d));
        for (int i = 0; i < d; ++i) prec[i] = cfg.precision[i];
    }
    LoadedData out{make_dataset(values, prec), {}};
    if (cfg.precision.empty() && near_integer_entries(out.data))
        out.warnings.push_back(
            "entries look integer-quantized; fundamental precision 1 assumed per column");
    out.data = normalize(center(out.data));
    return out;
}

inline nlohmann::json config_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["format"] = cfg.format;
    if (cfg.command == "pca-select" || cfg.command == "complexity") {
        j["input"] = cfg.input;
        j["precision"] = cfg.precision;
        j["m_range"] = {cfg.m_lo, cfg.m_hi};
        j["vol_mode"] = vol_mode_name(cfg.vol_mode);
        j["samples"] = cfg.mc_samples;
        j["seed"] = cfg.seed;
    } else if (cfg.command == "volume") {
        j["m"] = cfg.vol_m;
        j["s"] = cfg.vol_s;
        j["vol_mode"] = vol_mode_name(cfg.vol_mode);
        j["samples"] = cfg.mc_samples;
        j["seed"] = cfg.seed;
    } else {
        j["ladder"] = cfg.ladder;
        if (cfg.command == "laplace-check") j["case"] = cfg.lap_case;
    }
    return j;
}

inline nlohmann::json report_json(const ComplexityReport& r) {
    nlohmann::json terms;
    terms["neg_loglik"] = r.neg_loglik;
    terms["dim_term"] = r.dim_term;
    terms["log_vol"] = r.log_vol;
    terms["ratio_term"] = r.ratio_term;
    terms["curvature_term"] = r.curvature_term;
    terms["total"] = r.total;
    nlohmann::json j;
    j["m"] = r.m;
    j["n"] = r.n;
    j["s"] = r.s;
    j["terms"] = terms;
    j["vol_mode"] = vol_mode_name(r.vol_mode);
    j["log_I"] = r.log_I;
    j["log_I_stderr"] = r.log_I_stderr;
    j["warnings"] = r.warnings;
    return j;
}

inline std::string emit_json(const RunConfig& cfg, nlohmann::json results,
                             const nlohmann::json& selected_m,
                             const std::vector<std::string>& warnings) {
    nlohmann::json j;
    j["command"] = cfg.command;
    j["config"] = config_json(cfg);
    j["results"] = std::move(results);
    j["selected_m"] = selected_m;
    j["version"] = kVersion;
    j["warnings"] = warnings;
    return j.dump(2) + "\n";
}

inline std::string complexity_table(const RunConfig& cfg, const LoadedData& loaded,
                                    const std::vector<ComplexityReport>& table, int selected) {
    std::string out;
    out += "command: " + cfg.command + "\n";
    out += strf("input: %s   d = %d   N = %ld\n", cfg.input.c_str(), loaded.data.d,
                loaded.data.N);
    out += strf("scale exponent s = %d   vol mode = %s   samples = %ld   seed = %llu\n",
                table.empty() ? 0 : table.front().s, vol_mode_name(cfg.vol_mode), cfg.mc_samples,
                static_cast<unsigned long long>(cfg.seed));
    for (const std::string& w : loaded.warnings) out += "warning: " + w + "\n";
    out += "\n";
    out += strf("%3s %4s %14s %12s %12s %10s %10s %14s\n", "m", "n", "neg_loglik", "dim_term",
                "log_vol", "ratio", "curvature", "total");
    for (const ComplexityReport& r : table) {
        out += strf("%3d %4d %14.4f %12.4f %12.4f %10.4f %10.6f %14.4f\n", r.m, r.n, r.neg_loglik,
                    r.dim_term, r.log_vol, r.ratio_term, r.curvature_term, r.total);
        for (const std::string& w : r.warnings) out += strf("%8s warning (m=%d): %s\n", "", r.m, w.c_str());
    }
    if (selected > 0) out += strf("\nselected m* = %d\n", selected);
    return out;
}

inline std::string render_complexity_like(const RunConfig& cfg, bool select) {
    const LoadedData loaded = load_dataset(cfg);
    const int d = loaded.data.d;
    const int hi = cfg.m_hi == 0 ? d : cfg.m_hi;
    const auto [m_star, table] =
        select_pca_dim(loaded.data, cfg.m_lo, hi, cfg.vol_mode, cfg.mc_samples, cfg.seed);
    if (cfg.format == "json") {
        nlohmann::json results = nlohmann::json::array();
        for (const ComplexityReport& r : table) results.push_back(report_json(r));
        return emit_json(cfg, std::move(results),
                         select ? nlohmann::json(m_star) : nlohmann::json(nullptr),
                         loaded.warnings);
    }
    return complexity_table(cfg, loaded, table, select ? m_star : -1);
}

}  // namespace detail

// End-to-end dimension selection: load -> center -> normalize -> Sigma -> s
// -> sweep m -> smallest minimizer.
inline std::string cmd_pca_select(const RunConfig& cfg) {
    return detail::render_complexity_like(cfg, true);
}

// The same sweep and per-m breakdown without committing to a selection.
inline std::string cmd_complexity(const RunConfig& cfg) {
    return detail::render_complexity_like(cfg, false);
}

// Volume pipeline report: bound bracket, spectral factor, and the assembled
// log vol_g(M(s)) term decomposition.
inline std::string cmd_volume(const RunConfig& cfg) {
    const int m = cfg.vol_m, s = cfg.vol_s;
    const VolumeResult res = log_vol_Ms(m, s, cfg.vol_mode, cfg.mc_samples, cfg.seed);
    const auto [lo, hi] = i_bounds(m, s);
    double log_factorial = 0.0;
    for (int k = 2; k <= m; ++k) log_factorial += std::log(static_cast<double>(k));
    const double prefactor = -1.5 * m * std::log(2.0) - log_factorial;
    const double orth = log_vol_orthogonal(m);
    if (cfg.format == "json") {
        nlohmann::json r;
        r["m"] = m;
        r["s"] = s;
        r["vol_mode"] = vol_mode_name(res.mode);
        r["log_I"] = res.log_I;
        r["log_I_stderr"] = res.log_I_stderr;
        r["log_I_lower"] = lo;
        r["log_I_upper"] = hi;
        r["terms"] = {{"prefactor", prefactor},
                      {"orthogonal", orth},
                      {"log_I", res.log_I},
                      {"total", res.log_vol}};
        r["log_vol"] = res.log_vol;
        r["warnings"] = nlohmann::json::array();
        return detail::emit_json(cfg, nlohmann::json::array({r}), nullptr, {});
    }
    std::string out;
    out += "command: volume\n";
    out += detail::strf("m = %d   s = %d   mode = %s\n", m, s, vol_mode_name(res.mode));
    if (res.mode == VolMode::monte_carlo)
        out += detail::strf("log I(s)        = %.10f   (stderr %.3e, samples %ld, seed %llu)\n",
                            res.log_I, res.log_I_stderr, cfg.mc_samples,
                            static_cast<unsigned long long>(cfg.seed));
    else
        out += detail::strf("log I(s)        = %.10f\n", res.log_I);
    out += detail::strf("bound bracket   = [%.10f, %.10f]\n", lo, hi);
    out += detail::strf("prefactor term  = %.10f\n", prefactor);
    out += detail::strf("log vol(O(m))   = %.10f\n", orth);
    out += detail::strf("log vol_g(M(s)) = %.10f\n", res.log_vol);
    return out;
}

namespace detail {

struct LaplaceCase {
    std::string name;
    int n = 1;
    double f_max = 0.0;
    Matrix hess, g, ricci;
    std::function<double(long)> oracle;
};

inline std::vector<LaplaceCase> laplace_cases(const std::string& which) {
    const double pi = 3.14159265358979323846;
    std::vector<LaplaceCase> all;
    {
        LaplaceCase c;
        c.name = "circle-cos";
        c.n = 1;
        c.f_max = 1.0;
        c.hess = -Matrix::Identity(1, 1);
        c.g = Matrix::Identity(1, 1);
        c.ricci = Matrix::Zero(1, 1);
        c.oracle = [pi](long N) {
            return geomdl::detail::adaptive_gk(
                [N](double t) { return std::exp(N * std::cos(t)); }, 0.0, 2.0 * pi, 1e-12);
        };
        all.push_back(c);
    }
    {
        LaplaceCase c;
        c.name = "sphere-quadratic";
        c.n = 2;
        c.f_max = 0.0;
        c.hess = -Matrix::Identity(2, 2);
        c.g = Matrix::Identity(2, 2);
        c.ricci = Matrix::Identity(2, 2);  // unit 2-sphere: Ric = g
        c.oracle = [pi](long N) {
            return 2.0 * pi *
                   geomdl::detail::adaptive_gk(
                       [N](double r) { return std::exp(-0.5 * N * r * r) * std::sin(r); }, 0.0,
                       pi, 1e-12);
        };
        all.push_back(c);
    }
    {
        LaplaceCase c;
        c.name = "flat-box";
        c.n = 2;
        c.f_max = 0.0;
        c.hess = -Matrix::Identity(2, 2);
        c.g = Matrix::Identity(2, 2);
        c.ricci = Matrix::Zero(2, 2);
        c.oracle = [](long N) {
            const double one_d = geomdl::detail::adaptive_gk(
                [N](double x) { return std::exp(-0.5 * N * x * x); }, -1.0, 1.0, 1e-12);
            return one_d * one_d;
        };
        all.push_back(c);
    }
    {
        LaplaceCase c;
        c.name = "p1-log";
        c.n = 1;
        c.f_max = 0.0;
        c.hess = -Matrix::Identity(1, 1);
        c.g = 0.5 * Matrix::Identity(1, 1);
        c.ricci = Matrix::Zero(1, 1);
        // The manifold integral over q in [e^-8, e^8], evaluated in the log
        // chart t = log q where the integrand peak is well-conditioned.
        c.oracle = [](long N) {
            return geomdl::detail::adaptive_gk(
                [N](double t) { return std::exp(-0.5 * N * t * t) / std::sqrt(2.0); }, -8.0, 8.0,
                1e-12);
        };
        all.push_back(c);
    }
    if (which == "all") return all;
    for (const LaplaceCase& c : all)
        if (c.name == which) return {c};
    throw invalid_input("unknown laplace case: " + which +
                        " (expected circle-cos, sphere-quadratic, flat-box, p1-log, or all)");
}

// Least-squares slope of log(err) against log(N); errors floored at 1e-16.
inline double fit_log_slope(const std::vector<long>& ns, const std::vector<double>& errs) {
    const size_t k = ns.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < k; ++i) {
        const double x = std::log(static_cast<double>(ns[i]));
        const double y = std::log(std::max(errs[i], 1e-16));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = k * sxx - sx * sx;
    return denom == 0.0 ? 0.0 : (k * sxy - sx * sy) / denom;
}

}  // namespace detail

// Validation table for the curvature-corrected Laplace approximation on the
// bundled closed-form cases.
inline std::string cmd_laplace_check(const RunConfig& cfg) {
    std::vector<long> ladder = cfg.ladder;
    if (ladder.empty()) ladder = {25, 50, 100, 200};
    for (long N : ladder)
        if (N < 1) throw invalid_input("laplace-check: ladder entries must be >= 1");
    const std::vector<detail::LaplaceCase> cases = detail::laplace_cases(cfg.lap_case);
    nlohmann::json results = nlohmann::json::array();
    std::string table = "command: laplace-check\n";
    for (const detail::LaplaceCase& c : cases) {
        LaplaceInput inp;
        inp.n = c.n;
        inp.f_max = c.f_max;
        inp.hess = SymMatrix(c.hess);
        inp.g_p0 = SymMatrix(c.g);
        inp.ricci_p0 = SymMatrix(c.ricci);
        const double h0 = std::sqrt(c.g.determinant());
        std::vector<double> err_curv, err_plain;
        nlohmann::json rows = nlohmann::json::array();
        table += detail::strf("\ncase %s\n", c.name.c_str());
        table += detail::strf("%6s %16s %16s %16s %13s %13s\n", "N", "oracle", "approx(curv)",
                              "approx(plain)", "relerr(curv)", "relerr(plain)");
        for (long N : ladder) {
            inp.N = static_cast<double>(N);
            const double oracle = c.oracle(N);
            const double curved = laplace_approx(inp);
            const double plain = laplace_rn(c.f_max, inp.hess, inp.N, c.n, h0);
            const double rc = std::abs(curved / oracle - 1.0);
            const double rp = std::abs(plain / oracle - 1.0);
            err_curv.push_back(rc);
            err_plain.push_back(rp);
            rows.push_back({{"N", N},
                            {"oracle", oracle},
                            {"approx_curved", curved},
                            {"approx_plain", plain},
                            {"rel_err_curved", rc},
                            {"rel_err_plain", rp}});
            table += detail::strf("%6ld %16.8e %16.8e %16.8e %13.3e %13.3e\n", N, oracle, curved,
                                  plain, rc, rp);
        }
        const double slope_c = detail::fit_log_slope(ladder, err_curv);
        const double slope_p = detail::fit_log_slope(ladder, err_plain);
        table += detail::strf("fitted error slope: with curvature %+.3f, without %+.3f\n", slope_c,
                              slope_p);
        results.push_back({{"case", c.name},
                           {"rows", rows},
                           {"slope_curved", slope_c},
                           {"slope_plain", slope_p},
                           {"warnings", nlohmann::json::array()}});
    }
    if (cfg.format == "json") return detail::emit_json(cfg, std::move(results), nullptr, {});
    return table;
}

namespace detail {

inline DiscreteModel bernoulli_model() {
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

}  // namespace detail

// Bernoulli regret table: brute-force NML complexity against the asymptotic
// formula (1/2) log(N/2pi) + log pi, plus the Jeffreys-mixture regret of the
// balanced sequence.
inline std::string cmd_regret_check(const RunConfig& cfg) {
    std::vector<long> ladder = cfg.ladder;
    if (ladder.empty()) ladder = {125, 250, 500, 1000};
    for (long N : ladder)
        if (N < 1) throw invalid_input("regret-check: ladder entries must be >= 1");
    const double pi = 3.14159265358979323846;
    const DiscreteModel model = detail::bernoulli_model();
    nlohmann::json rows = nlohmann::json::array();
    std::string table = "command: regret-check\n";
    table += detail::strf("%6s %12s %12s %12s %15s %12s\n", "N", "nml", "formula", "diff",
                          "mixture_regret", "mix_diff");
    for (long N : ladder) {
        const double nml = nml_bruteforce(model, N);
        const double formula = 0.5 * std::log(N / (2.0 * pi)) + std::log(pi);
        const long k = N / 2;
        const std::vector<long> counts{k, N - k};
        double max_ll = 0.0;
        for (long c : counts)
            if (c > 0) max_ll += c * std::log(static_cast<double>(c) / N);
        const double regret = jeffreys_mixture_length(model, counts, N) + max_ll;
        rows.push_back({{"N", N},
                        {"nml", nml},
                        {"formula", formula},
                        {"diff", nml - formula},
                        {"mixture_regret", regret},
                        {"mixture_diff", regret - formula}});
        table += detail::strf("%6ld %12.6f %12.6f %12.6f %15.6f %12.6f\n", N, nml, formula,
                              nml - formula, regret, regret - formula);
    }
    nlohmann::json results = nlohmann::json::array();
    results.push_back({{"rows", rows}, {"warnings", nlohmann::json::array()}});
    if (cfg.format == "json") return detail::emit_json(cfg, std::move(results), nullptr, {});
    return table;
}

// Renders the report for cfg.command (throws on any failure).
inline std::string render(const RunConfig& cfg) {
    if (cfg.command == "pca-select") return cmd_pca_select(cfg);
    if (cfg.command == "complexity") return cmd_complexity(cfg);
    if (cfg.command == "volume") return cmd_volume(cfg);
    if (cfg.command == "laplace-check") return cmd_laplace_check(cfg);
    if (cfg.command == "regret-check") return cmd_regret_check(cfg);
    throw invalid_input("unknown command: " + cfg.command);
}

// 0 success; 2 input error; 3 numerical degeneracy; 4 resource limit.
inline int exit_code_for(const error& e) {
    if (dynamic_cast<const invalid_input*>(&e) != nullptr) return 2;
    if (dynamic_cast<const insufficient_data*>(&e) != nullptr) return 2;
    if (dynamic_cast<const resource_error*>(&e) != nullptr) return 4;
    return 3;
}

inline int run(const RunConfig& cfg, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    try {
        const std::string text = render(cfg);
        if (cfg.output.empty()) {
            out << text;
        } else {
            std::ofstream f(cfg.output);
            if (!f) throw invalid_input("cannot open output file: " + cfg.output);
            f << text;
        }
        return 0;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace geomdl::cli
