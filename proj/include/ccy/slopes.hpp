#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ccy/errors.hpp"
#include "ccy/linalg.hpp"
#include "ccy/section.hpp"

namespace ccy {

/// Discretization of the measure dq on Q: slope points with Lebesgue cell
/// weights, plus the vertices of Q as zero-weight slopes so the gradient
/// image spans Q.
struct SlopeSample {
    std::vector<Vec> slopes;
    Vec weights;
    double v_q = 0;        // sum of weights = V(Q)
    Vec barycenter;        // weighted slope barycenter
    bool barycenter_zero = true;
    int positive_count = 0; // slopes with positive weight (prefix of the list)
};

namespace detail {

/// Clips a convex polygon against the halfplane <a, s> >= b (Sutherland-Hodgman).
inline std::vector<Vec> clip_halfplane(const std::vector<Vec>& poly, const Vec& a, double b) {
    std::vector<Vec> out;
    size_t n = poly.size();
    if (n == 0) return out;
    for (size_t i = 0; i < n; ++i) {
        const Vec& p = poly[i];
        const Vec& q = poly[(i + 1) % n];
        double dp = dot(a, p) - b;
        double dq = dot(a, q) - b;
        if (dp >= 0) out.push_back(p);
        if ((dp > 0 && dq < 0) || (dp < 0 && dq > 0)) {
            double t = dp / (dp - dq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

} // namespace detail

/// Uniform-grid sampling of a bounded polytope with barycenter at the origin.
/// resolution = number of cells per axis over the bounding box.
inline SlopeSample sample_slopes(const Polytope& q_poly, int resolution, bool force = false,
                                 double bary_tol = 1e-6) {
    if (resolution < 1) throw structural_error("resolution must be positive");
    SlopeSample out;
    int n = q_poly.n;

    if (n == 1) {
        double lo = q_poly.vertices[0][0], hi = lo;
        for (const auto& v : q_poly.vertices) {
            lo = std::min(lo, v[0]);
            hi = std::max(hi, v[0]);
        }
        double h = (hi - lo) / resolution;
        for (int i = 0; i < resolution; ++i) {
            out.slopes.push_back({lo + (i + 0.5) * h});
            out.weights.push_back(h);
        }
        out.positive_count = (int)out.slopes.size();
        out.slopes.push_back({lo});
        out.weights.push_back(0.0);
        out.slopes.push_back({hi});
        out.weights.push_back(0.0);
    } else if (n == 2) {
        auto hull = hull_ccw(q_poly.vertices);
        if (hull.size() < 3) throw structural_error("flat 2-d slope polytope");
        Vec lo = hull[0], hi = hull[0];
        for (const auto& v : hull)
            for (int j = 0; j < 2; ++j) {
                lo[j] = std::min(lo[j], v[j]);
                hi[j] = std::max(hi[j], v[j]);
            }
        double hx = (hi[0] - lo[0]) / resolution;
        double hy = (hi[1] - lo[1]) / resolution;
        // halfplane description of the hull for cell clipping
        std::vector<Vec> normals;
        Vec offsets;
        for (size_t i = 0; i < hull.size(); ++i) {
            const Vec& a = hull[i];
            const Vec& b = hull[(i + 1) % hull.size()];
            Vec nrm = {-(b[1] - a[1]), b[0] - a[0]}; // inward for ccw
            normals.push_back(nrm);
            offsets.push_back(dot(nrm, a));
        }
        double cell_area = hx * hy;
        for (int ix = 0; ix < resolution; ++ix) {
            for (int iy = 0; iy < resolution; ++iy) {
                std::vector<Vec> cell = {{lo[0] + ix * hx, lo[1] + iy * hy},
                                         {lo[0] + (ix + 1) * hx, lo[1] + iy * hy},
                                         {lo[0] + (ix + 1) * hx, lo[1] + (iy + 1) * hy},
                                         {lo[0] + ix * hx, lo[1] + (iy + 1) * hy}};
                for (size_t e = 0; e < normals.size() && !cell.empty(); ++e)
                    cell = detail::clip_halfplane(cell, normals[e], offsets[e]);
                if (cell.size() < 3) continue;
                double area = polygon_area(cell);
                if (area <= 1e-12 * cell_area) continue;
                out.slopes.push_back(polygon_centroid(cell));
                out.weights.push_back(area);
            }
        }
        out.positive_count = (int)out.slopes.size();
        for (const auto& v : hull) {
            out.slopes.push_back(v);
            out.weights.push_back(0.0);
        }
    } else {
        throw structural_error("sample_slopes supports n <= 2; use sample_slopes_mc");
    }

    out.v_q = 0;
    out.barycenter.assign(n, 0.0);
    for (size_t j = 0; j < out.slopes.size(); ++j) {
        out.v_q += out.weights[j];
        out.barycenter = out.barycenter + out.weights[j] * out.slopes[j];
    }
    out.barycenter = (1.0 / out.v_q) * out.barycenter;
    out.barycenter_zero = norm2(out.barycenter) <= bary_tol * std::max(1.0, q_poly.diameter());
    if (!out.barycenter_zero && !force) throw barycenter_not_zero_error{};
    return out;
}

/// n = 3 fallback: cell weights by membership of fixed sub-samples against a
/// halfspace description <a_i, q> + b_i >= 0.
inline SlopeSample sample_slopes_mc(const Polytope& q_poly,
                                    const std::vector<std::pair<Vec, double>>& halfspaces,
                                    int resolution, bool force = false, double bary_tol = 1e-6) {
    int n = q_poly.n;
    if (n != 3) throw structural_error("sample_slopes_mc is the n = 3 path");
    Vec lo = q_poly.vertices[0], hi = q_poly.vertices[0];
    for (const auto& v : q_poly.vertices)
        for (int j = 0; j < n; ++j) {
            lo[j] = std::min(lo[j], v[j]);
            hi[j] = std::max(hi[j], v[j]);
        }
    Vec h(n);
    for (int j = 0; j < n; ++j) h[j] = (hi[j] - lo[j]) / resolution;
    auto inside = [&](const Vec& p) {
        for (const auto& hs : halfspaces)
            if (dot(hs.first, p) + hs.second < 0) return false;
        return true;
    };
    SlopeSample out;
    const int sub = 4;
    double cell_vol = h[0] * h[1] * h[2];
    for (int ix = 0; ix < resolution; ++ix)
        for (int iy = 0; iy < resolution; ++iy)
            for (int iz = 0; iz < resolution; ++iz) {
                Vec base = {lo[0] + ix * h[0], lo[1] + iy * h[1], lo[2] + iz * h[2]};
                int hits = 0;
                Vec centroid(n, 0.0);
                for (int a = 0; a < sub; ++a)
                    for (int b = 0; b < sub; ++b)
                        for (int c = 0; c < sub; ++c) {
                            Vec p = {base[0] + (a + 0.5) * h[0] / sub,
                                     base[1] + (b + 0.5) * h[1] / sub,
                                     base[2] + (c + 0.5) * h[2] / sub};
                            if (inside(p)) {
                                ++hits;
                                centroid = centroid + p;
                            }
                        }
                if (hits == 0) continue;
                out.slopes.push_back((1.0 / hits) * centroid);
                out.weights.push_back(cell_vol * hits / double(sub * sub * sub));
            }
    out.positive_count = (int)out.slopes.size();
    for (const auto& v : q_poly.vertices) {
        out.slopes.push_back(v);
        out.weights.push_back(0.0);
    }
    out.v_q = 0;
    out.barycenter.assign(n, 0.0);
    for (size_t j = 0; j < out.slopes.size(); ++j) {
        out.v_q += out.weights[j];
        out.barycenter = out.barycenter + out.weights[j] * out.slopes[j];
    }
    out.barycenter = (1.0 / out.v_q) * out.barycenter;
    out.barycenter_zero = norm2(out.barycenter) <= bary_tol * std::max(1.0, q_poly.diameter());
    if (!out.barycenter_zero && !force) throw barycenter_not_zero_error{};
    return out;
}

} // namespace ccy
