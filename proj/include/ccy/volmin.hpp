#pragma once

#include <cmath>
#include <vector>

#include "ccy/volume.hpp"

namespace ccy {

struct MinimizerResult {
    ReebVector xi_star;
    double barycenter_residual = 0; // || b_{P_xi} - l/m ||
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_trace;
};

struct MinimizeOptions {
    double tol = 1e-9;
    int max_iter = 200;
    double armijo = 1e-4;
    double shrink = 0.5;
    Vec init; // empty: normalized ray average
};

/// Damped Newton for log V on the slice <l, xi> = m, started from the
/// normalized ray average. Steps are backtracked on log V and shrunk until the
/// iterate stays interior (all dual-ray pairings positive).
inline MinimizerResult minimize_volume(const ProperCone& cone, const GorensteinVector& gor,
                                       const MinimizeOptions& opt = {}) {
    int m = cone.dim;
    Vec l = to_double(gor.l);

    // initial point: ray average (or caller-provided), projected to the slice
    Vec xi;
    if (opt.init.empty()) {
        xi.assign(m, 0.0);
        for (const auto& r : cone.primal_rays) xi = xi + to_double(r);
        xi = (1.0 / double(cone.primal_rays.size())) * xi;
    } else {
        xi = opt.init;
        if (!is_interior_reeb(cone, xi)) throw not_interior_reeb_error{};
    }
    xi = normalize_reeb(cone, gor, xi).xi;

    // basis of the slice direction space l-perp
    std::vector<Vec> slice = orthonormal_perp_basis(l);
    int n = (int)slice.size();

    Vec target = (1.0 / m) * l;
    MinimizerResult res;

    auto residual_at = [&](const Vec& x) {
        SectionMeasure sm = measure_barycenter_moments(cross_section(cone, x));
        return norm2(sm.barycenter - target);
    };

    double logv = volume(cone, xi).log_v;
    for (int it = 0; it < opt.max_iter; ++it) {
        VolumeEvaluation ev = grad_hess_log_volume(cone, xi);
        SectionMeasure sm = measure_barycenter_moments(cross_section(cone, xi));
        double resid = norm2(sm.barycenter - target);
        res.residual_trace.push_back(resid);
        res.iterations = it;
        if (resid <= opt.tol) {
            res.converged = true;
            break;
        }

        // reduced Newton system on the slice
        Vec g(n);
        Mat h(n, Vec(n));
        for (int i = 0; i < n; ++i) {
            g[i] = dot(slice[i], ev.grad_log_v);
            Vec hz = mat_vec(ev.hessian_log_v, slice[i]);
            for (int j = 0; j < n; ++j) h[i][j] = dot(slice[j], hz);
        }
        auto dy = solve_spd(h, Vec(g));
        Vec dir(m, 0.0);
        if (dy) {
            for (int i = 0; i < n; ++i) dir = dir - (*dy)[i] * slice[i];
        } else {
            for (int i = 0; i < n; ++i) dir = dir - g[i] * slice[i]; // gradient fallback
        }
        double slope = dot(ev.grad_log_v, dir);
        if (!(slope < 0)) {
            dir.assign(m, 0.0);
            for (int i = 0; i < n; ++i) dir = dir - g[i] * slice[i];
            slope = dot(ev.grad_log_v, dir);
            if (!(slope < 0)) break; // stationary to machine precision
        }

        double step = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            Vec trial = xi + step * dir;
            if (is_interior_reeb(cone, trial)) {
                double lv = volume(cone, trial).log_v;
                if (lv <= logv + opt.armijo * step * slope) {
                    xi = trial;
                    logv = lv;
                    accepted = true;
                    break;
                }
            }
            step *= opt.shrink;
        }
        if (!accepted) break; // cannot make progress at machine precision
    }

    if (!res.converged) {
        double resid = residual_at(xi);
        res.residual_trace.push_back(resid);
        res.converged = resid <= opt.tol;
    }
    res.barycenter_residual = residual_at(xi);
    res.xi_star = ReebVector{xi, true};
    return res;
}

} // namespace ccy
