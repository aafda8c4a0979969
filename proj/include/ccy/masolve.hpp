#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "ccy/ding.hpp"

namespace ccy {

/// Converged semi-discrete solution of det D^2 phi = e^{-m phi} with
/// prescribed gradient polytope conv(slopes).
struct MASolution {
    PiecewiseAffineConvex phi; // gauge-fixed and convexified
    std::vector<Vec> slopes;   // positive-weight pieces first, then vertex pieces
    Vec weights;
    DingValue ding;
    double mass_residual = 0;    // max_j |mu(S_j)/mu_tot - w_j/V|
    double linf_vs_support = 0;  // sup |phi - phi_Q| after sup-normalization
    Vec translation;             // applied gauge translation of s
    int iterations = 0;
    bool converged = false;
    double box = 0;              // integration box used (0 for exact 1-d)
};

struct MASolveOptions {
    double tol = 1e-4;  // mass-balance residual target
    int max_iter = 4000;
    int history = 12;
    double box = 0;     // 0: automatic from the decay rate
    Vec init;           // optional initial intercepts (full slope list)
    int mc_samples = 200000;
    std::uint64_t seed = 1;
    double vertex_mass_cap = 5e-4; // relative mass allowed on zero-weight pieces
};

namespace detail {

struct LbfgsHistory {
    std::deque<Vec> s, y;
    std::deque<double> rho;
    int cap;

    explicit LbfgsHistory(int capacity) : cap(capacity) {}

    void push(const Vec& si, const Vec& yi) {
        double sy = dot(si, yi);
        if (!(sy > 1e-14 * norm2(si) * norm2(yi))) return; // skip non-curvature pairs
        s.push_back(si);
        y.push_back(yi);
        rho.push_back(1.0 / sy);
        if ((int)s.size() > cap) {
            s.pop_front();
            y.pop_front();
            rho.pop_front();
        }
    }

    Vec direction(Vec g) const {
        size_t k = s.size();
        std::vector<double> alpha(k);
        for (size_t i = k; i-- > 0;) {
            alpha[i] = rho[i] * dot(s[i], g);
            g = g - alpha[i] * y[i];
        }
        if (k > 0) {
            double gamma = dot(s[k - 1], y[k - 1]) / dot(y[k - 1], y[k - 1]);
            g = gamma * g;
        }
        for (size_t i = 0; i < k; ++i) {
            double beta = rho[i] * dot(y[i], g);
            g = g + (alpha[i] - beta) * s[i];
        }
        return g;
    }
};

/// Intercepts for the zero-weight vertex slopes: the tangent extension of the
/// solved envelope, anchored at the boundary of the solved cell complex
/// (envelope breakpoints for n = 1, interior cell-polygon vertices for n = 2).
/// The vertex piece touches phi there and takes over beyond, so the gradient
/// image spans the full polytope without disturbing the solved region.
inline double hull_extension_intercept(const PiecewiseAffineConvex& phi, const Vec& q_vertex,
                                       const std::vector<Vec>& probes) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& s : probes) best = std::max(best, dot(q_vertex, s) - phi(s));
    return best;
}

} // namespace detail

/// Minimizes F(c) = -(1/m) log int e^{-m phi_c} + sum_j (w_j / V) c_j over the
/// intercepts of the positive-weight pieces by L-BFGS with Armijo
/// backtracking. F is convex (integral of a jointly log-concave integrand);
/// stationarity is the discrete mass balance mu(S_j)/mu_tot = w_j/V.
///
/// Gauge: the intercept of the slope nearest the origin is frozen at zero
/// during the iteration, and the solution is post-translated so the
/// mu-barycenter of s sits at the origin. Zero-weight vertex slopes are
/// attached afterwards by hull extension.
inline MASolution minimize_ding(const std::vector<Vec>& slopes_in, const Vec& weights_in,
                                double m_homog, const MASolveOptions& opt = {}) {
    size_t total_k = slopes_in.size();
    int n = (int)slopes_in[0].size();
    if (n >= 2) {
        // coincident slopes would make the power cells double-count
        auto sorted = slopes_in;
        std::sort(sorted.begin(), sorted.end());
        for (size_t j = 1; j < sorted.size(); ++j)
            if (norm2(sorted[j] - sorted[j - 1]) <= 1e-14)
                throw structural_error("duplicate slopes in the sample");
    }

    // stable partition: positive-weight pieces first
    std::vector<int> order;
    for (size_t j = 0; j < total_k; ++j)
        if (weights_in[j] > 0) order.push_back((int)j);
    size_t k = order.size();
    for (size_t j = 0; j < total_k; ++j)
        if (!(weights_in[j] > 0)) order.push_back((int)j);

    std::vector<Vec> slopes(total_k);
    Vec weights(total_k);
    for (size_t j = 0; j < total_k; ++j) {
        slopes[j] = slopes_in[order[j]];
        weights[j] = weights_in[order[j]];
    }
    std::vector<Vec> active(slopes.begin(), slopes.begin() + k);

    double v_q = 0;
    for (double w : weights) v_q += w;

    PiecewiseAffineConvex phi;
    phi.n = n;
    phi.slopes = active;
    phi.intercepts.resize(k);
    if (!opt.init.empty()) {
        for (size_t j = 0; j < k; ++j) phi.intercepts[j] = opt.init[order[j]];
    } else {
        for (size_t j = 0; j < k; ++j) phi.intercepts[j] = 0.5 * dot(active[j], active[j]);
    }

    // gauge piece: active slope nearest the origin
    size_t j0 = 0;
    for (size_t j = 1; j < k; ++j)
        if (norm2(active[j]) < norm2(active[j0])) j0 = j;
    double shift0 = phi.intercepts[j0];
    for (double& c : phi.intercepts) c -= shift0;

    MeasureEngine engine(active, m_homog, 0.0, opt.mc_samples, opt.seed);
    double box = 0;
    if (n >= 2) {
        box = opt.box > 0 ? opt.box : engine.auto_box(phi.intercepts) + 4.0;
        engine = MeasureEngine(active, m_homog, box, opt.mc_samples, opt.seed);
    }

    auto objective = [&](const PiecewiseAffineConvex& f, MeasureField& field) {
        field = engine.evaluate(f);
        double lin = 0;
        for (size_t j = 0; j < k; ++j) lin += weights[j] / v_q * f.intercepts[j];
        return -(1.0 / m_homog) * field.log_total + lin;
    };
    auto gradient = [&](const MeasureField& field, Vec& g) {
        double resid = 0;
        g.resize(k);
        for (size_t j = 0; j < k; ++j) {
            g[j] = weights[j] / v_q - field.masses[j];
            resid = std::max(resid, std::fabs(g[j]));
        }
        g[j0] = 0.0;
        return resid;
    };

    MeasureField field;
    double fval = objective(phi, field);
    Vec g;
    double resid = gradient(field, g);

    detail::LbfgsHistory hist(opt.history);
    MASolution sol;
    int it = 0;
    bool stalled = false;
    for (; it < opt.max_iter && resid > opt.tol; ++it) {
        Vec dir = hist.direction(g);
        for (double& d : dir) d = -d;
        dir[j0] = 0.0;
        double slope = dot(g, dir);
        if (!(slope < 0)) {
            hist = detail::LbfgsHistory(opt.history); // reset on a bad model
            dir = (-1.0) * g;
            dir[j0] = 0.0;
            slope = dot(g, dir);
            if (!(slope < 0)) break;
        }
        double step = 1.0;
        bool ok = false;
        double ftrial = fval;
        PiecewiseAffineConvex trial = phi;
        MeasureField trial_field;
        for (int bt = 0; bt < 50; ++bt) {
            for (size_t j = 0; j < k; ++j) trial.intercepts[j] = phi.intercepts[j] + step * dir[j];
            ftrial = objective(trial, trial_field);
            if (std::isfinite(ftrial) && ftrial <= fval + 1e-4 * step * slope) {
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if (!ok) {
            stalled = true;
            break;
        }
        Vec gnew;
        double rnew = gradient(trial_field, gnew);
        Vec dc(k), dg(k);
        for (size_t j = 0; j < k; ++j) {
            dc[j] = trial.intercepts[j] - phi.intercepts[j];
            dg[j] = gnew[j] - g[j];
        }
        hist.push(dc, dg);
        phi.intercepts = trial.intercepts;
        fval = ftrial;
        field = trial_field;
        g = gnew;
        resid = rnew;
    }
    if (stalled && resid > 10 * opt.tol) throw line_search_failure_error{};

    // translation gauge: mu-barycenter of s to the origin
    std::vector<std::vector<Vec>> cells;
    MeasureField withbary = engine.evaluate(phi, true, n == 2 ? &cells : nullptr);
    Vec a = withbary.barycenter;
    for (size_t j = 0; j < k; ++j) phi.intercepts[j] -= dot(active[j], a);
    phi = convexify(phi);

    // probe set for the vertex-piece hull extension
    std::vector<Vec> probes;
    if (n == 1) {
        Envelope1D env = envelope_1d(phi);
        for (double b : env.breaks) probes.push_back(Vec{b});
    } else if (n == 2) {
        engine.evaluate(phi, false, &cells);
        for (const auto& poly : cells)
            for (const auto& p : poly)
                if (std::fabs(p[0]) < box - 1e-9 && std::fabs(p[1]) < box - 1e-9)
                    probes.push_back(p);
    } else {
        // mc fallback: deterministic sample of the box
        Rng rng(opt.seed + 7);
        for (int i = 0; i < 4096; ++i) {
            Vec s(n);
            for (int c = 0; c < n; ++c) s[c] = rng.uniform(-0.8 * box, 0.8 * box);
            probes.push_back(std::move(s));
        }
    }

    PiecewiseAffineConvex full;
    full.n = n;
    full.slopes = slopes;
    full.intercepts.resize(total_k);
    for (size_t j = 0; j < k; ++j) full.intercepts[j] = phi.intercepts[j];
    for (size_t j = k; j < total_k; ++j)
        full.intercepts[j] = detail::hull_extension_intercept(phi, slopes[j], probes);

    MeasureEngine full_engine(slopes, m_homog, box, opt.mc_samples, opt.seed);

    // lift the vertex pieces together until their cells carry at most the
    // allowed relative mass; the worst vertex mass is monotone in the lift
    if (total_k > k) {
        auto worst_vertex_mass = [&](double lift) {
            PiecewiseAffineConvex probe = full;
            for (size_t j = k; j < total_k; ++j) probe.intercepts[j] += lift;
            MeasureField mf = full_engine.evaluate(probe);
            double worst = 0;
            for (size_t j = k; j < total_k; ++j) worst = std::max(worst, mf.masses[j]);
            return worst;
        };
        if (worst_vertex_mass(0.0) > opt.vertex_mass_cap) {
            double lo = 0.0, hi = 0.25;
            while (worst_vertex_mass(hi) > opt.vertex_mass_cap && hi < 64) hi *= 2;
            for (int b = 0; b < 50; ++b) {
                double mid = 0.5 * (lo + hi);
                (worst_vertex_mass(mid) > opt.vertex_mass_cap ? lo : hi) = mid;
            }
            for (size_t j = k; j < total_k; ++j) full.intercepts[j] += hi;
        }
    }

    sol.phi = full;
    sol.slopes = slopes;
    sol.weights = weights;
    sol.translation = a;
    sol.iterations = it;
    sol.box = box;

    MeasureField final_field = full_engine.evaluate(sol.phi);
    double final_resid = 0;
    for (size_t j = 0; j < total_k; ++j)
        final_resid = std::max(final_resid, std::fabs(weights[j] / v_q - final_field.masses[j]));
    sol.mass_residual = final_resid;
    sol.converged = final_resid <= std::max(opt.tol, 1e-3);

    sol.ding = ding_functional(sol.phi, slopes, weights, m_homog, box);

    // sup |phi - phi_Q| after normalizing sup(phi - phi_Q) = 0
    PiecewiseAffineConvex support{n, slopes, Vec(total_k, 0.0)};
    double rad = n == 1 ? engine.auto_box(phi.intercepts) + 5 : box;
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    int grid = n == 1 ? 4096 : 160;
    Vec s(n);
    std::vector<int> idx(n, 0);
    for (;;) {
        for (int c = 0; c < n; ++c) s[c] = -rad + 2 * rad * idx[c] / double(grid);
        double d = sol.phi(s) - support(s);
        sup = std::max(sup, d);
        inf = std::min(inf, d);
        int c = 0;
        while (c < n && ++idx[c] > grid) idx[c++] = 0;
        if (c == n) break;
    }
    sol.linf_vs_support = sup - inf; // after sup-normalization, lhs = sup - inf
    return sol;
}

} // namespace ccy
