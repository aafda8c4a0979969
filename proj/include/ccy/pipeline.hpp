#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "ccy/io.hpp"
#include "ccy/reconstruct.hpp"
#include "ccy/volmin.hpp"

namespace ccy {

enum class RunMode { validate, minimize_volume, solve_ma, certify, cy };

struct RunConfig {
    std::string cone_path;
    RunMode mode = RunMode::cy;
    double vol_tol = 1e-9;
    int vol_max_iter = 200;
    double ma_tol = 1e-4;
    int resolution = 0;        // slope cells per axis; 0 = default by dimension
    double box = 0;            // integration box; 0 = automatic
    double q_exponent = 0;     // certificate q; 0 = n + 1
    double c_nq = 10.0;
    std::uint64_t seed = 1;
    std::optional<Vec> xi_override;
    bool force = false;
    std::string solution_path; // certify input
    std::string out_path;      // solve-ma output
    std::string report_path;
    std::string csv_path;
    int csv_steps = 101;
    double csv_radius = 5.0;
    bool timing = true;
};

struct PipelineResult {
    json report;
    bool converged = true; // every numeric stage reached its tolerance
};

namespace detail {

inline int default_resolution(int n) {
    switch (n) {
    case 1: return 800;
    case 2: return 50;
    default: return 12;
    }
}

} // namespace detail

/// validate -> gorenstein -> minimize-volume -> cross-section/shift ->
/// solve-ma -> reconstruct -> certify, with each stage's outputs embedded in
/// the report. Stages after the requested mode are skipped.
inline PipelineResult run_pipeline(const RunConfig& cfg) {
    if (!(cfg.vol_tol > 0) || !(cfg.ma_tol > 0))
        throw structural_error("tolerances must be positive");
    auto t0 = std::chrono::steady_clock::now();
    PipelineResult out;
    json& rep = out.report;
    rep["config"] = {{"mode", int(cfg.mode)},
                     {"resolution", cfg.resolution},
                     {"seed", cfg.seed},
                     {"vol_tol", cfg.vol_tol},
                     {"ma_tol", cfg.ma_tol}};

    ConeInput input = load_cone_file(cfg.cone_path);
    ProperCone cone = validate_cone(input.rays);
    int m = cone.dim;
    rep["cone"] = {{"dim", m}};
    rep["cone"]["rays"] = json::array();
    for (const auto& r : cone.primal_rays) rep["cone"]["rays"].push_back(detail::ratvec_to_json(r));
    rep["cone"]["dual_rays"] = json::array();
    for (const auto& r : cone.dual_rays) rep["cone"]["dual_rays"].push_back(detail::ratvec_to_json(r));

    if (cfg.mode == RunMode::validate) {
        try {
            auto g = gorenstein_vector(cone);
            rep["l"] = detail::ratvec_to_json(g.l);
        } catch (const not_gorenstein_error&) {
            rep["l"] = nullptr;
        }
        if (cfg.timing)
            rep["timing_seconds"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!cfg.report_path.empty()) write_json_file(rep, cfg.report_path);
        return out;
    }

    GorensteinVector gor = gorenstein_vector(cone);
    rep["l"] = detail::ratvec_to_json(gor.l);
    if (input.l && *input.l != gor.l)
        throw structural_error("cone file carries an l that fails <xi_i, l> = 1");

    // Reeb vector: given or volume-minimizing
    Vec xi;
    double bary_resid = 0;
    if (cfg.xi_override) {
        xi = normalize_reeb(cone, gor, *cfg.xi_override).xi;
        auto sm = measure_barycenter_moments(cross_section(cone, xi));
        bary_resid = norm2(sm.barycenter - (1.0 / m) * to_double(gor.l));
        rep["volume_minimization"] = {{"skipped", true}};
    } else if (input.xi && cfg.mode == RunMode::solve_ma) {
        xi = normalize_reeb(cone, gor, *input.xi).xi;
        auto sm = measure_barycenter_moments(cross_section(cone, xi));
        bary_resid = norm2(sm.barycenter - (1.0 / m) * to_double(gor.l));
        rep["volume_minimization"] = {{"skipped", true}};
    } else {
        MinimizeOptions mo;
        mo.tol = cfg.vol_tol;
        mo.max_iter = cfg.vol_max_iter;
        auto res = minimize_volume(cone, gor, mo);
        xi = res.xi_star.xi;
        bary_resid = res.barycenter_residual;
        out.converged = out.converged && res.converged;
        rep["volume_minimization"] = {{"iterations", res.iterations},
                                      {"converged", res.converged},
                                      {"residual_trace", res.residual_trace}};
    }
    auto vol = volume(cone, xi);
    rep["xi_star"] = xi;
    rep["v_vol"] = vol.v_vol;
    rep["v_char"] = vol.v_char;
    rep["barycenter_residual"] = bary_resid;

    if (cfg.mode == RunMode::minimize_volume) {
        if (cfg.timing)
            rep["timing_seconds"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!cfg.report_path.empty()) write_json_file(rep, cfg.report_path);
        return out;
    }

    // reduction data
    auto cs = cross_section(cone, xi);
    auto basis = orthonormal_perp_basis(xi);
    auto sp = shifted_polytope(cs, gor, basis);
    int n = m - 1;
    int resolution = cfg.resolution > 0 ? cfg.resolution : detail::default_resolution(n);
    rep["reduction"] = {{"n", n}, {"resolution", resolution}};
    rep["reduction"]["q_vertices"] = json::array();
    for (const auto& v : sp.q.vertices) rep["reduction"]["q_vertices"].push_back(v);
    rep["reduction"]["basis"] = json::array();
    for (const auto& b : basis) rep["reduction"]["basis"].push_back(b);

    SlopeSample sample;
    bool bary_zero = true;
    if (n <= 2) {
        try {
            sample = sample_slopes(sp.q, resolution, cfg.force || bary_resid > 1e-6);
        } catch (const barycenter_not_zero_error&) {
            bary_zero = false;
        }
        if (bary_resid > 1e-6) bary_zero = false;
    } else {
        std::vector<std::pair<Vec, double>> halfspaces;
        for (const auto& nr : cone.primal_rays) {
            Vec a(n, 0.0);
            Vec nrd = to_double(nr);
            for (int i = 0; i < n; ++i) a[i] = dot(nrd, basis[i]);
            halfspaces.push_back({a, dot(nrd, (1.0 / m) * to_double(gor.l))});
        }
        sample = sample_slopes_mc(sp.q, halfspaces, resolution, cfg.force || bary_resid > 1e-6);
        bary_zero = sample.barycenter_zero;
    }

    if (!bary_zero && !cfg.force) {
        // non-minimizing xi: no solution exists; certify the divergence instead
        sample = n <= 2 ? sample_slopes(sp.q, resolution, true) : sample;
        auto cert = detect_unbounded(sample, m);
        rep["ma"] = {{"solvable", false},
                     {"divergence",
                      {{"direction", cert.direction},
                       {"ts", cert.ts},
                       {"ding_values", cert.ding_values},
                       {"decrease_rate", cert.decrease_rate}}}};
        out.converged = false;
        if (cfg.timing)
            rep["timing_seconds"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!cfg.report_path.empty()) write_json_file(rep, cfg.report_path);
        return out;
    }

    MASolveOptions mao;
    mao.tol = cfg.ma_tol;
    mao.box = cfg.box;
    mao.seed = cfg.seed;
    auto sol = minimize_ding(sample.slopes, sample.weights, m, mao);
    out.converged = out.converged && sol.converged;
    rep["ma"] = {{"solvable", true},
                 {"converged", sol.converged},
                 {"iterations", sol.iterations},
                 {"mass_residual", sol.mass_residual},
                 {"linf_vs_support", sol.linf_vs_support},
                 {"box", sol.box},
                 {"ding",
                  {{"total", sol.ding.total},
                   {"log_term", sol.ding.log_term},
                   {"energy_term", sol.ding.energy_term},
                   {"j_value", sol.ding.j_value}}}};

    auto tp = reconstruct_potential(sol, sp, gor);
    auto diag = reconstruction_diagnostics(tp, cone, cfg.seed);
    rep["reconstruction"] = {{"homogeneity_error", diag.homogeneity_error},
                             {"gradient_margin", diag.gradient_margin},
                             {"hausdorff_to_section", diag.hausdorff_to_section},
                             {"bound_constant", diag.bound_constant}};

    double q_exp = cfg.q_exponent > 0 ? cfg.q_exponent : n + 1;
    auto cert = linf_certificate(sol, sp.q, q_exp, cfg.c_nq, m);
    rep["linf_certificate"] = {{"lhs", cert.lhs},
                               {"rhs", cert.rhs},
                               {"diameter", cert.diameter_d},
                               {"volume", cert.volume_v},
                               {"moment1", cert.moment1},
                               {"momentq", cert.momentq},
                               {"q", cert.q},
                               {"c_nq", cert.c_nq},
                               {"passes", cert.passes}};

    // oracle agreement: Monte Carlo volume within 3 sigma of the exact value
    auto mc = mc_volume(cone, xi, 200000, cfg.seed);
    rep["oracles"] = {{"mc_volume", mc.estimate},
                      {"mc_std_error", mc.std_error},
                      {"mc_within_3sigma", std::fabs(mc.estimate - vol.v_vol) <= 3 * mc.std_error}};

    if (!cfg.out_path.empty() || cfg.mode == RunMode::solve_ma || cfg.mode == RunMode::cy) {
        SolvedInstance inst{double(m), sol, sp.q, basis, xi, gor.l};
        rep["solution"] = solved_to_json(inst);
        if (!cfg.out_path.empty()) write_json_file(rep["solution"], cfg.out_path);
    }
    if (!cfg.csv_path.empty())
        emit_csv(sol.phi, sp.q, m, cfg.csv_radius, cfg.csv_steps, cfg.csv_path);

    if (cfg.timing)
        rep["timing_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!cfg.report_path.empty()) write_json_file(rep, cfg.report_path);
    return out;
}

/// Certificate run on a previously solved instance.
inline PipelineResult run_certify(const RunConfig& cfg) {
    PipelineResult out;
    json& rep = out.report;
    ConeInput input = load_cone_file(cfg.cone_path);
    ProperCone cone = validate_cone(input.rays);
    SolvedInstance inst = solved_from_json(read_json_file(cfg.solution_path));

    double q_exp = cfg.q_exponent > 0 ? cfg.q_exponent : inst.sol.phi.n + 1;
    auto cert = linf_certificate(inst.sol, inst.q, q_exp, cfg.c_nq, inst.m_homog);
    rep["linf_certificate"] = {{"lhs", cert.lhs},
                               {"rhs", cert.rhs},
                               {"diameter", cert.diameter_d},
                               {"volume", cert.volume_v},
                               {"moment1", cert.moment1},
                               {"momentq", cert.momentq},
                               {"q", cert.q},
                               {"c_nq", cert.c_nq},
                               {"passes", cert.passes}};

    auto volres = volume(cone, inst.xi);
    auto mc = mc_volume(cone, inst.xi, 1000000, cfg.seed);
    bool mc_ok = std::fabs(mc.estimate - volres.v_vol) <= 3 * mc.std_error;
    auto logv = [&](const Vec& x) { return volume(cone, x).log_v; };
    Vec fd = fd_gradient(logv, inst.xi, 1e-5);
    auto ev = grad_hess_log_volume(cone, inst.xi);
    double gerr = norm2(fd - ev.grad_log_v) / std::max(1e-300, norm2(ev.grad_log_v));
    rep["oracles"] = {{"mc_volume", mc.estimate},
                      {"mc_std_error", mc.std_error},
                      {"mc_within_3sigma", mc_ok},
                      {"fd_gradient_rel_error", gerr}};
    out.converged = mc_ok && gerr <= 1e-6;
    if (!cfg.report_path.empty()) write_json_file(rep, cfg.report_path);
    return out;
}

} // namespace ccy
