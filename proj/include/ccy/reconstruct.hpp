#pragma once

#include <cmath>
#include <vector>

#include "ccy/masolve.hpp"
#include "ccy/volume.hpp"

namespace ccy {

/// Evaluator of the conical potential f(x) = e^{<l,x>/m + phi(s(x))} on the
/// open torus orbit. One-homogeneity under xi holds by construction: the
/// basis functionals vanish on xi and <l, xi> = m.
struct ToricPotential {
    Vec xi;
    Vec l_over_m;
    std::vector<Vec> basis; // s_i functionals on R^m
    PiecewiseAffineConvex phi;

    Vec s_coords(const Vec& x) const {
        Vec s(basis.size());
        for (size_t i = 0; i < basis.size(); ++i) s[i] = dot(basis[i], x);
        return s;
    }

    double log_f(const Vec& x) const { return dot(l_over_m, x) + phi(s_coords(x)); }

    double f(const Vec& x) const { return std::exp(log_f(x)); }

    /// grad log f = l/m + sum_i q_i s_i, a point of P_xi.
    Vec grad_log_f(const Vec& x) const {
        Vec q = phi.gradient(s_coords(x));
        Vec p = l_over_m;
        for (size_t i = 0; i < basis.size(); ++i) p = p + q[i] * basis[i];
        return p;
    }

    Vec grad_f(const Vec& x) const { return f(x) * grad_log_f(x); }
};

struct ReconstructionReport {
    double homogeneity_error = 0; // max |log f(x + tau xi) - log f(x) - tau|
    double gradient_margin = 0;   // min over samples and facet normals of <xi_j, grad f>
    double hausdorff_to_section = 0; // realized gradient set vs P_xi vertices
    double bound_constant = 0;    // smallest C with f <= C e^{phi_P} on the test set
};

inline ToricPotential reconstruct_potential(const MASolution& sol, const ShiftedPolytope& sp,
                                            const GorensteinVector& gor) {
    ToricPotential tp;
    tp.xi = sp.xi;
    tp.l_over_m = (1.0 / (double)sp.xi.size()) * to_double(gor.l);
    tp.basis = sp.basis;
    tp.phi = sol.phi;
    return tp;
}

inline ReconstructionReport reconstruction_diagnostics(const ToricPotential& tp,
                                                       const ProperCone& cone,
                                                       std::uint64_t seed = 17,
                                                       int samples = 1000) {
    int m = cone.dim;
    Rng rng(seed);
    ReconstructionReport rep;
    rep.gradient_margin = std::numeric_limits<double>::infinity();
    double logc = -std::numeric_limits<double>::infinity();

    std::vector<Vec> normals = to_double(cone.primal_rays);
    CrossSection cs = cross_section(cone, tp.xi);

    for (int it = 0; it < samples; ++it) {
        Vec x(m);
        for (int j = 0; j < m; ++j) x[j] = rng.uniform(-4.0, 4.0);
        double tau = rng.uniform(-3.0, 3.0);
        Vec xs = x + tau * tp.xi;
        rep.homogeneity_error = std::max(
            rep.homogeneity_error, std::fabs(tp.log_f(xs) - tp.log_f(x) - tau));

        Vec gf = tp.grad_f(x);
        for (const auto& nrm : normals)
            rep.gradient_margin = std::min(rep.gradient_margin, dot(nrm, gf));

        double phi_p = support_function(cs.vertices, x);
        logc = std::max(logc, tp.log_f(x) - phi_p);
    }
    rep.bound_constant = std::exp(logc);

    // Hausdorff distance between the realized gradient image (on a wide grid
    // of s) and the cross-section vertices, in ambient coordinates.
    double reach = 0;
    for (const auto& q : tp.phi.slopes) reach = std::max(reach, norm2(q));
    double rad = 50.0 / std::max(0.1, reach);
    int n = (int)tp.basis.size();
    std::vector<Vec> realized;
    int grid = n == 1 ? 2048 : 96;
    Vec s(n);
    std::vector<int> idx(n, 0);
    for (;;) {
        for (int c = 0; c < n; ++c) s[c] = -rad + 2 * rad * idx[c] / double(grid);
        Vec q = tp.phi.gradient(s);
        Vec p = tp.l_over_m;
        for (int i = 0; i < n; ++i) p = p + q[i] * tp.basis[i];
        realized.push_back(p);
        int c = 0;
        while (c < n && ++idx[c] > grid) idx[c++] = 0;
        if (c == n) break;
    }
    double haus = 0;
    for (const auto& v : cs.vertices) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& p : realized) d = std::min(d, norm2(p - v));
        haus = std::max(haus, d);
    }
    // realized points lie in P_xi by construction; only the covering direction
    // is informative
    rep.hausdorff_to_section = haus;
    return rep;
}

} // namespace ccy
