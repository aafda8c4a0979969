#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ccy/cone.hpp"

namespace ccy {

/// Bounded polytope P_xi = C* \cap { <xi, .> = 1 }, with the induced
/// Euclidean (m-1)-measure and a fan triangulation anchored at the
/// lexicographically first vertex.
struct CrossSection {
    Vec xi;                        // ambient hyperplane <xi, .> = 1
    std::vector<Vec> vertices;     // v / <xi, v> over dual rays, lex sorted
    std::vector<int> ray_index;    // vertex i came from cone.dual_rays[ray_index[i]]
    std::vector<std::vector<int>> triangulation; // (m-1)-simplices, m vertex indices each

    int ambient_dim() const { return (int)xi.size(); }

    double diameter() const {
        double d = 0;
        for (size_t i = 0; i < vertices.size(); ++i)
            for (size_t j = i + 1; j < vertices.size(); ++j)
                d = std::max(d, norm2(vertices[i] - vertices[j]));
        return d;
    }
};

/// General vertex-described polytope in R^n (the shifted gradient polytope Q).
struct Polytope {
    int n = 0;
    std::vector<Vec> vertices;

    double diameter() const {
        double d = 0;
        for (size_t i = 0; i < vertices.size(); ++i)
            for (size_t j = i + 1; j < vertices.size(); ++j)
                d = std::max(d, norm2(vertices[i] - vertices[j]));
        return d;
    }
};

inline double support_function(const std::vector<Vec>& vertices, const Vec& x) {
    double s = -std::numeric_limits<double>::infinity();
    if (vertices.empty()) return 0.0;
    for (const auto& p : vertices) s = std::max(s, dot(x, p));
    return s;
}

inline double support_function(const Polytope& p, const Vec& x) {
    return support_function(p.vertices, x);
}

inline CrossSection cross_section(const ProperCone& cone, const Vec& xi) {
    if ((int)xi.size() != cone.dim) throw structural_error("xi dimension mismatch");
    size_t nv = cone.dual_rays.size();
    std::vector<Vec> verts(nv);
    for (size_t i = 0; i < nv; ++i) {
        Vec v = to_double(cone.dual_rays[i]);
        double t = dot(xi, v);
        if (!(t > 0)) throw not_interior_reeb_error{};
        verts[i] = (1.0 / t) * v;
    }

    // sort vertices lexicographically; exact ray order breaks double ties
    std::vector<int> idx(nv);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        for (int k = 0; k < cone.dim; ++k) {
            if (verts[a][k] < verts[b][k]) return true;
            if (verts[a][k] > verts[b][k]) return false;
        }
        return a < b;
    });

    CrossSection cs;
    cs.xi = xi;
    cs.vertices.resize(nv);
    cs.ray_index.resize(nv);
    std::vector<int> order(nv); // order[ray] = vertex position
    for (size_t pos = 0; pos < nv; ++pos) {
        cs.vertices[pos] = verts[idx[pos]];
        cs.ray_index[pos] = idx[pos];
        order[idx[pos]] = (int)pos;
    }

    std::vector<int> all(nv);
    std::iota(all.begin(), all.end(), 0);
    detail::FaceTriangulator tri{cone.dual_rays, cone.primal_rays, order, {}};
    auto simplices = tri.run(all, (size_t)cone.dim);
    for (auto& s : simplices) {
        std::vector<int> t;
        t.reserve(s.size());
        for (int ray : s) t.push_back(order[ray]);
        std::sort(t.begin(), t.end());
        cs.triangulation.push_back(std::move(t));
    }
    std::sort(cs.triangulation.begin(), cs.triangulation.end());
    return cs;
}

struct SectionMeasure {
    double volume = 0;      // induced Euclidean (m-1)-measure
    Vec barycenter;         // ambient point on the hyperplane
    Mat second_moments;     // integral of p p^T against the induced measure
};

namespace detail {

inline double gram_det(const std::vector<Vec>& edges) {
    size_t k = edges.size();
    Mat g(k, Vec(k));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) g[i][j] = dot(edges[i], edges[j]);
    // LU without pivoting is fine: Gram matrices of independent edges are SPD
    double det = 1.0;
    for (size_t c = 0; c < k; ++c) {
        det *= g[c][c];
        if (!(g[c][c] > 0)) return 0.0;
        for (size_t i = c + 1; i < k; ++i) {
            double f = g[i][c] / g[c][c];
            for (size_t j = c; j < k; ++j) g[i][j] -= f * g[c][j];
        }
    }
    return det;
}

inline double factorial(int k) {
    double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

} // namespace detail

/// Exact simplex formulas for volume, barycenter and second moments under the
/// induced Euclidean measure. The barycenter does not depend on the choice of
/// Lebesgue normalization on the hyperplane.
inline SectionMeasure measure_barycenter_moments(const CrossSection& cs) {
    int m = cs.ambient_dim();
    int k = m - 1; // simplex dimension
    SectionMeasure out;
    out.barycenter.assign(m, 0.0);
    out.second_moments.assign(m, Vec(m, 0.0));
    for (const auto& simplex : cs.triangulation) {
        std::vector<Vec> edges;
        for (size_t i = 1; i < simplex.size(); ++i)
            edges.push_back(cs.vertices[simplex[i]] - cs.vertices[simplex[0]]);
        double g = detail::gram_det(edges);
        if (!(g > 0)) throw degenerate_triangulation_error{};
        double meas = std::sqrt(g) / detail::factorial(k);
        out.volume += meas;

        Vec sum(m, 0.0);
        for (int vi : simplex) sum = sum + cs.vertices[vi];
        out.barycenter = out.barycenter + (meas / (k + 1)) * sum;

        // E[p p^T] over a k-simplex = (sum_i w_i w_i^T + (sum w)(sum w)^T) / ((k+1)(k+2))
        double c = meas / double((k + 1) * (k + 2));
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                double s = sum[a] * sum[b];
                for (int vi : simplex) s += cs.vertices[vi][a] * cs.vertices[vi][b];
                out.second_moments[a][b] += c * s;
            }
    }
    if (!(out.volume > 0)) throw degenerate_triangulation_error{};
    out.barycenter = (1.0 / out.volume) * out.barycenter;
    return out;
}

/// Deterministic orthonormal basis of xi-perp. Seed vectors xi_k* e_i - xi_i e_k*
/// are orthogonal to xi exactly in floating point; Gram-Schmidt follows.
inline std::vector<Vec> orthonormal_perp_basis(const Vec& xi) {
    int m = (int)xi.size();
    int k = 0;
    for (int i = 1; i < m; ++i)
        if (std::fabs(xi[i]) > std::fabs(xi[k])) k = i;
    if (xi[k] == 0.0) throw degenerate_basis_error{};
    std::vector<Vec> basis;
    for (int i = 0; i < m; ++i) {
        if (i == k) continue;
        Vec w(m, 0.0);
        w[i] = xi[k];
        w[k] = -xi[i];
        for (const auto& b : basis) w = w - dot(w, b) * b;
        double n = norm2(w);
        if (!(n > 1e-14)) throw degenerate_basis_error{};
        basis.push_back((1.0 / n) * w);
    }
    return basis;
}

/// Q_xi = P_xi - l/m in the coordinates of the given basis of xi-perp.
struct ShiftedPolytope {
    Polytope q;                 // vertices in basis coordinates
    std::vector<Vec> basis;     // s_i functionals in ambient coordinates
    Vec l_over_m;               // ambient shift
    Vec xi;
    Vec barycenter;             // barycenter of Q in basis coordinates
};

inline ShiftedPolytope shifted_polytope(const CrossSection& cs, const GorensteinVector& gor,
                                        const std::vector<Vec>& basis) {
    int m = cs.ambient_dim();
    int n = m - 1;
    if ((int)basis.size() != n) throw degenerate_basis_error{};
    double xi_norm = norm2(cs.xi);
    for (const auto& s : basis)
        if (std::fabs(dot(s, cs.xi)) > 1e-9 * xi_norm * std::max(1.0, norm2(s)))
            throw degenerate_basis_error{};

    Vec l = to_double(gor.l);
    if (std::fabs(dot(l, cs.xi) - m) > 1e-9 * m)
        throw structural_error("xi is not l-normalized; shift leaves xi-perp");

    Mat gram(n, Vec(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gram[i][j] = dot(basis[i], basis[j]);

    Vec shift = (1.0 / m) * l;
    auto coords = [&](const Vec& u) {
        Vec rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = dot(basis[i], u);
        auto q = solve_spd(gram, rhs);
        if (!q) throw degenerate_basis_error{};
        return *q;
    };

    ShiftedPolytope out;
    out.basis = basis;
    out.l_over_m = shift;
    out.xi = cs.xi;
    out.q.n = n;
    for (const auto& p : cs.vertices) out.q.vertices.push_back(coords(p - shift));
    out.barycenter = coords(measure_barycenter_moments(cs).barycenter - shift);
    return out;
}

// ---------------------------------------------------------------------------
// planar polytope helpers (n = 1, 2)
// ---------------------------------------------------------------------------

/// Convex hull of planar points, counterclockwise, no duplicates (monotone chain).
inline std::vector<Vec> hull_ccw(std::vector<Vec> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return pts;
    auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Vec> h(2 * pts.size());
    size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
        h[k++] = p;
    }
    size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && cross(h[k - 2], h[k - 1], *it) <= 0) --k;
        h[k++] = *it;
    }
    h.resize(k - 1);
    return h;
}

inline double polygon_area(const std::vector<Vec>& ccw) {
    double a = 0;
    size_t n = ccw.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec& p = ccw[i];
        const Vec& q = ccw[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * a;
}

inline Vec polygon_centroid(const std::vector<Vec>& ccw) {
    double a = 0, cx = 0, cy = 0;
    size_t n = ccw.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec& p = ccw[i];
        const Vec& q = ccw[(i + 1) % n];
        double w = p[0] * q[1] - q[0] * p[1];
        a += w;
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    if (a == 0) return Vec{0, 0};
    return Vec{cx / (3 * a), cy / (3 * a)};
}

/// Measure of a vertex-described polytope: length (n=1) or hull area (n=2).
inline double polytope_measure(const Polytope& p) {
    if (p.n == 1) {
        double lo = p.vertices[0][0], hi = lo;
        for (const auto& v : p.vertices) {
            lo = std::min(lo, v[0]);
            hi = std::max(hi, v[0]);
        }
        return hi - lo;
    }
    if (p.n == 2) return polygon_area(hull_ccw(p.vertices));
    throw structural_error("polytope_measure: dimension not supported");
}

} // namespace ccy
