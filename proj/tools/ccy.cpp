// ccy - volume-minimizing Reeb vectors and conical Calabi-Yau potentials for
// rational convex cones.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ccy/pipeline.hpp"

namespace {

constexpr const char* kVersion = "ccy 1.0.0";

ccy::Vec parse_xi(const std::string& text) {
    ccy::Vec out;
    std::string token;
    std::stringstream ss(text);
    while (std::getline(ss, token, ','))
        out.push_back(ccy::Rational::parse(token).to_double());
    return out;
}

int finish(const ccy::PipelineResult& result, bool print_report) {
    if (print_report) std::cout << result.report.dump(2) << "\n";
    return result.converged ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"volume-minimizing Reeb vectors and conical Calabi-Yau potentials"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    ccy::RunConfig cfg;
    if (const char* env_seed = std::getenv("CCY_SEED")) cfg.seed = std::strtoull(env_seed, nullptr, 10);

    std::string xi_text = "auto";
    bool quiet = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--cone", cfg.cone_path, "cone JSON file")->required();
        sub->add_option("--report", cfg.report_path, "write the full report JSON here");
        sub->add_option("--seed", cfg.seed, "seed for all stochastic oracles");
        sub->add_flag("--quiet", quiet, "suppress stdout report");
    };

    auto* validate = app.add_subcommand("validate", "check the cone and compute its dual");
    add_common(validate);

    auto* minvol = app.add_subcommand("minimize-volume", "find the volume-minimizing Reeb vector");
    add_common(minvol);
    minvol->add_option("--tol", cfg.vol_tol, "barycenter residual tolerance");
    minvol->add_option("--max-iter", cfg.vol_max_iter, "Newton iteration cap");

    auto* solve = app.add_subcommand("solve-ma", "solve the reduced Monge-Ampere problem");
    add_common(solve);
    solve->add_option("--xi", xi_text, "auto (minimize volume) or comma-separated vector");
    solve->add_option("--resolution", cfg.resolution, "slope cells per axis");
    solve->add_option("--box", cfg.box, "integration box radius (0 = automatic)");
    solve->add_option("--tol", cfg.ma_tol, "mass-balance residual tolerance");
    solve->add_option("--out", cfg.out_path, "write the solved instance JSON here");
    solve->add_option("--grid-csv", cfg.csv_path, "dump (s, phi, phi_Q, density) samples");
    solve->add_option("--csv-steps", cfg.csv_steps, "grid points per axis for the CSV");
    solve->add_option("--csv-radius", cfg.csv_radius, "grid radius for the CSV");
    solve->add_flag("--force", cfg.force, "proceed despite a nonzero barycenter");

    auto* certify = app.add_subcommand("certify", "run certificates on a solved instance");
    certify->add_option("--solution", cfg.solution_path, "solve-ma output JSON")->required();
    certify->add_option("--cone", cfg.cone_path, "cone JSON file")->required();
    certify->add_option("--q", cfg.q_exponent, "certificate exponent q > n");
    certify->add_option("--cnq", cfg.c_nq, "Sobolev constant C_{n,q}");
    certify->add_option("--seed", cfg.seed, "seed");
    certify->add_option("--report", cfg.report_path, "write the certificate JSON here");
    certify->add_flag("--quiet", quiet, "suppress stdout report");

    auto* cy = app.add_subcommand("cy", "full pipeline: minimize volume, solve, certify");
    add_common(cy);
    cy->add_option("--xi", xi_text, "auto or comma-separated vector");
    cy->add_option("--resolution", cfg.resolution, "slope cells per axis");
    cy->add_option("--box", cfg.box, "integration box radius");
    cy->add_option("--vol-tol", cfg.vol_tol, "barycenter residual tolerance");
    cy->add_option("--ma-tol", cfg.ma_tol, "mass-balance residual tolerance");
    cy->add_option("--q", cfg.q_exponent, "certificate exponent");
    cy->add_option("--cnq", cfg.c_nq, "Sobolev constant");
    cy->add_option("--out", cfg.out_path, "write the solved instance JSON here");
    cy->add_option("--csv", cfg.csv_path, "dump potential samples as CSV");
    cy->add_flag("--force", cfg.force, "proceed despite a nonzero barycenter");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            cfg.mode = ccy::RunMode::validate;
        } else if (minvol->parsed()) {
            cfg.mode = ccy::RunMode::minimize_volume;
        } else if (solve->parsed()) {
            cfg.mode = ccy::RunMode::solve_ma;
        } else if (cy->parsed()) {
            cfg.mode = ccy::RunMode::cy;
        } else if (certify->parsed()) {
            cfg.mode = ccy::RunMode::certify;
            return finish(ccy::run_certify(cfg), !quiet);
        }
        if (xi_text != "auto") cfg.xi_override = parse_xi(xi_text);
        return finish(ccy::run_pipeline(cfg), !quiet);
    } catch (const ccy::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
        case ccy::error_kind::structural: return 2;
        case ccy::error_kind::numeric: return 1;
        case ccy::error_kind::io: return 3;
        }
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
