// geomdl: curvature-corrected complexity and regret reports from the shell.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "geomdl/cli.hpp"

namespace {

// "A..B" | "A.." | "..B" | "A"; hi = 0 stands for the data dimension.
void parse_m_range(const std::string& text, geomdl::cli::RunConfig& cfg) {
    try {
        const auto pos = text.find("..");
        if (pos == std::string::npos) {
            cfg.m_lo = std::stoi(text);
            cfg.m_hi = cfg.m_lo;
            return;
        }
        const std::string lo = text.substr(0, pos), hi = text.substr(pos + 2);
        cfg.m_lo = lo.empty() ? 1 : std::stoi(lo);
        cfg.m_hi = hi.empty() ? 0 : std::stoi(hi);
    } catch (const std::exception&) {
        throw geomdl::invalid_input("cannot parse m range: " + text);
    }
}

geomdl::VolMode parse_vol_mode(const std::string& text) {
    if (text == "mc") return geomdl::VolMode::monte_carlo;
    if (text == "quad") return geomdl::VolMode::quadrature;
    if (text == "upper") return geomdl::VolMode::upper_bound;
    throw geomdl::invalid_input("unknown volume mode: " + text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geometric complexity and minmax-regret reports"};
    app.require_subcommand(1);

    geomdl::cli::RunConfig cfg;
    std::string m_range = "1..";
    std::string vol_mode = "mc";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", cfg.format, "report format: table or json")
            ->check(CLI::IsMember({"table", "json"}));
        sub->add_option("--output", cfg.output, "write the report to a file instead of stdout");
    };
    auto add_vol = [&](CLI::App* sub) {
        sub->add_option("--vol-mode", vol_mode, "log I(s) evaluation: mc, quad, or upper")
            ->check(CLI::IsMember({"mc", "quad", "upper"}));
        sub->add_option("--samples", cfg.mc_samples, "Monte Carlo sample count")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", cfg.seed, "Monte Carlo seed");
    };
    auto add_data = [&](CLI::App* sub) {
        sub->add_option("--input", cfg.input, "CSV/TSV file, one observation per row")
            ->required();
        sub->add_option("--precision", cfg.precision,
                        "fundamental precision per column (single value broadcasts)")
            ->delimiter(',');
        sub->add_option("--m-range", m_range, "retained dimensions to score, e.g. 1..5");
    };

    CLI::App* sel = app.add_subcommand(
        "pca-select", "score retained PCA dimensions and pick the complexity minimizer");
    add_data(sel);
    add_vol(sel);
    add_common(sel);

    CLI::App* cx =
        app.add_subcommand("complexity", "per-dimension complexity breakdown without selection");
    add_data(cx);
    add_vol(cx);
    add_common(cx);

    CLI::App* vol = app.add_subcommand("volume", "Riemannian volume of the truncated SPD manifold");
    vol->add_option("--m", cfg.vol_m, "matrix dimension")->check(CLI::PositiveNumber);
    vol->add_option("--s", cfg.vol_s, "scale exponent")->check(CLI::NonNegativeNumber);
    add_vol(vol);
    add_common(vol);

    CLI::App* lap = app.add_subcommand("laplace-check",
                                       "curvature-corrected Laplace approximation vs oracles");
    lap->add_option("--case", cfg.lap_case, "which closed-form case to run")
        ->check(CLI::IsMember({"circle-cos", "sphere-quadratic", "flat-box", "p1-log", "all"}));
    lap->add_option("--ladder", cfg.ladder, "comma-separated N ladder")->delimiter(',');
    add_common(lap);

    CLI::App* reg =
        app.add_subcommand("regret-check", "brute-force NML vs the asymptotic regret formula");
    reg->add_option("--ladder", cfg.ladder, "comma-separated N ladder")->delimiter(',');
    add_common(reg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    try {
        cfg.vol_mode = parse_vol_mode(vol_mode);
        if (cfg.command == "pca-select" || cfg.command == "complexity")
            parse_m_range(m_range, cfg);
    } catch (const geomdl::invalid_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return geomdl::cli::run(cfg);
}
