#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "ccy/errors.hpp"
#include "ccy/linalg.hpp"

namespace ccy {

/// Rational proper convex cone C in R^m given by primal ray generators,
/// with the dual description computed on validation.
///
/// primal_rays generate C; dual_rays are the extreme rays of
/// C* = { p : <xi_i, p> >= 0 for all i }. The primal rays double as the
/// facet normals of C*.
struct ProperCone {
    int dim = 0;
    std::vector<RatVec> primal_rays;       // primitive, deduplicated, lex sorted
    std::vector<RatVec> dual_rays;         // primitive extreme rays of C*, lex sorted
    std::vector<RatVec> facet_normals_dual; // alias of primal_rays in the dual picture

    /// incidence[i][j] == true iff <primal_rays[j], dual_rays[i]> == 0.
    std::vector<std::vector<bool>> incidence;

    /// Simplicial subcone decomposition of C*: tuples of m dual-ray indices.
    std::vector<std::vector<int>> dual_simplices;

    bool member_primal(const RatVec& x) const {
        for (const auto& v : dual_rays)
            if (rat_dot(x, v).sign() < 0) return false;
        return true;
    }
    bool member_dual(const RatVec& p) const {
        for (const auto& n : primal_rays)
            if (rat_dot(n, p).sign() < 0) return false;
        return true;
    }
};

struct GorensteinVector {
    RatVec l;
};

struct ReebVector {
    Vec xi;
    bool normalized = false; // <l, xi> = m within 1e-12
};

namespace detail {

inline std::vector<RatVec> primitive_dedup_sort(const std::vector<RatVec>& rays) {
    std::vector<RatVec> out;
    for (const auto& r : rays) {
        RatVec p = rat_primitive(r);
        bool zero = true;
        for (const auto& x : p)
            if (!x.is_zero()) zero = false;
        if (zero) continue;
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(), rat_lex_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Double description: extreme rays of { p : <a_i, p> >= 0 } for the given
/// constraint normals. Requires the normals to span R^m so intermediate cones
/// stay pointed.
inline std::vector<RatVec> double_description(const std::vector<RatVec>& normals, int m) {
    // greedy selection of m independent normals for the simplicial start
    std::vector<int> base;
    {
        RatMat rows;
        for (size_t i = 0; i < normals.size() && (int)base.size() < m; ++i) {
            rows.push_back(normals[i]);
            if (rat_rank(rows) == base.size() + 1)
                base.push_back((int)i);
            else
                rows.pop_back();
        }
    }
    if ((int)base.size() < m) throw not_full_dimensional_error{};

    RatMat a(m);
    for (int k = 0; k < m; ++k) a[k] = normals[base[k]];
    RatMat ainv = rat_inverse(a);
    std::vector<RatVec> rays;
    for (int j = 0; j < m; ++j) { // column j of A^{-1}: <a_k, ray_j> = delta_kj
        RatVec col(m);
        for (int i = 0; i < m; ++i) col[i] = ainv[i][j];
        rays.push_back(rat_primitive(col));
    }

    std::vector<int> processed = base;
    auto zero_set = [&](const RatVec& r) {
        std::vector<int> z;
        for (int idx : processed)
            if (rat_dot(normals[idx], r).is_zero()) z.push_back(idx);
        std::sort(z.begin(), z.end()); // set_intersection/includes need sorted ranges
        return z;
    };

    for (size_t c = 0; c < normals.size(); ++c) {
        if (std::find(base.begin(), base.end(), (int)c) != base.end()) continue;
        const RatVec& a_c = normals[c];
        std::vector<int> plus, zero, minus;
        std::vector<Rational> val(rays.size());
        for (size_t i = 0; i < rays.size(); ++i) {
            val[i] = rat_dot(a_c, rays[i]);
            int s = val[i].sign();
            (s > 0 ? plus : (s == 0 ? zero : minus)).push_back((int)i);
        }
        if (minus.empty()) {
            processed.push_back((int)c);
            continue;
        }

        std::vector<std::vector<int>> zsets(rays.size());
        for (size_t i = 0; i < rays.size(); ++i) zsets[i] = zero_set(rays[i]);

        auto subset = [](const std::vector<int>& s, const std::vector<int>& t) {
            return std::includes(t.begin(), t.end(), s.begin(), s.end());
        };

        std::vector<RatVec> next;
        for (int i : plus) next.push_back(rays[i]);
        for (int i : zero) next.push_back(rays[i]);
        for (int ip : plus) {
            for (int im : minus) {
                std::vector<int> common;
                std::set_intersection(zsets[ip].begin(), zsets[ip].end(), zsets[im].begin(),
                                      zsets[im].end(), std::back_inserter(common));
                bool adjacent = true;
                for (size_t k = 0; k < rays.size() && adjacent; ++k) {
                    if ((int)k == ip || (int)k == im) continue;
                    if (subset(common, zsets[k])) adjacent = false;
                }
                if (!adjacent) continue;
                RatVec w(a_c.size());
                for (size_t j = 0; j < w.size(); ++j)
                    w[j] = val[ip] * rays[im][j] - val[im] * rays[ip][j];
                next.push_back(rat_primitive(w));
            }
        }
        rays = std::move(next);
        processed.push_back((int)c);
    }

    std::sort(rays.begin(), rays.end(), rat_lex_less);
    rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
    return rays;
}

/// Pulling triangulation of a face of C* given by dual-ray indices.
/// `order` ranks rays; the anchor of each face is its order-minimal ray.
/// Returns simplex index tuples; every simplex of the top call contains the
/// top anchor.
struct FaceTriangulator {
    const std::vector<RatVec>& dual_rays;
    const std::vector<RatVec>& normals;
    const std::vector<int>& order; // order[i] = sort position of ray i
    std::map<std::vector<int>, std::vector<std::vector<int>>> memo;

    size_t face_rank(const std::vector<int>& s) const {
        RatMat rows;
        for (int i : s) rows.push_back(dual_rays[i]);
        return rat_rank(rows);
    }

    std::vector<std::vector<int>> run(std::vector<int> s, size_t k) {
        std::sort(s.begin(), s.end());
        auto it = memo.find(s);
        if (it != memo.end()) return it->second;
        std::vector<std::vector<int>> out;
        if (s.size() == k) {
            out.push_back(s);
            memo[s] = out;
            return out;
        }
        int anchor = s[0];
        for (int i : s)
            if (order[i] < order[anchor]) anchor = i;

        std::set<std::vector<int>> facets;
        for (const auto& n : normals) {
            std::vector<int> t;
            for (int i : s)
                if (rat_dot(n, dual_rays[i]).is_zero()) t.push_back(i);
            if (t.size() == s.size() || t.size() < k - 1) continue;
            if (std::find(t.begin(), t.end(), anchor) != t.end()) continue;
            if (face_rank(t) != k - 1) continue;
            facets.insert(t);
        }
        for (const auto& f : facets) {
            for (auto sub : run(f, k - 1)) {
                sub.push_back(anchor);
                std::sort(sub.begin(), sub.end());
                out.push_back(sub);
            }
        }
        if (out.empty()) throw degenerate_triangulation_error{};
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        memo[s] = out;
        return out;
    }
};

} // namespace detail

/// Validates ray input and computes the full dual description.
inline ProperCone validate_cone(const std::vector<RatVec>& rays_in) {
    if (rays_in.empty()) throw empty_input_error{};
    int m = (int)rays_in[0].size();
    for (const auto& r : rays_in)
        if ((int)r.size() != m) throw structural_error("ray dimensions disagree");

    ProperCone cone;
    cone.dim = m;
    cone.primal_rays = detail::primitive_dedup_sort(rays_in);
    if (cone.primal_rays.empty()) throw empty_input_error{};

    {
        RatMat rows(cone.primal_rays.begin(), cone.primal_rays.end());
        if ((int)rat_rank(rows) < m) throw not_full_dimensional_error{};
    }

    cone.dual_rays = detail::double_description(cone.primal_rays, m);
    {
        RatMat rows(cone.dual_rays.begin(), cone.dual_rays.end());
        if ((int)rat_rank(rows) < m) throw contains_line_error{};
    }

    // properness certificate: sum of dual extreme rays pairs > 0 with every ray
    RatVec u(m);
    for (const auto& v : cone.dual_rays)
        for (int j = 0; j < m; ++j) u[j] += v[j];
    for (const auto& r : cone.primal_rays)
        if (rat_dot(u, r).sign() <= 0) throw contains_line_error{};

    // extreme-ray filter: active facet normals must have rank m-1
    {
        std::vector<RatVec> keep;
        for (const auto& v : cone.dual_rays) {
            RatMat act;
            for (const auto& n : cone.primal_rays)
                if (rat_dot(n, v).is_zero()) act.push_back(n);
            if (rat_rank(act) == (size_t)m - 1) keep.push_back(v);
        }
        cone.dual_rays = std::move(keep);
    }

    cone.facet_normals_dual = cone.primal_rays;
    cone.incidence.assign(cone.dual_rays.size(),
                          std::vector<bool>(cone.primal_rays.size(), false));
    for (size_t i = 0; i < cone.dual_rays.size(); ++i)
        for (size_t j = 0; j < cone.primal_rays.size(); ++j)
            cone.incidence[i][j] = rat_dot(cone.primal_rays[j], cone.dual_rays[i]).is_zero();

    // simplicial decomposition of C*, anchored by ray sort order
    {
        std::vector<int> all((int)cone.dual_rays.size());
        std::vector<int> order(cone.dual_rays.size());
        for (size_t i = 0; i < all.size(); ++i) all[i] = (int)i, order[i] = (int)i;
        detail::FaceTriangulator tri{cone.dual_rays, cone.primal_rays, order, {}};
        cone.dual_simplices = tri.run(all, (size_t)m);
    }
    return cone;
}

/// Dual cone as a ProperCone: generators become the computed extreme rays of
/// C*, facet normals the old generators. Applying twice recovers the original
/// cone as a set.
inline ProperCone dual_cone(const ProperCone& cone) { return validate_cone(cone.dual_rays); }

/// Exact solve of <xi_i, l> = 1 over all primal rays.
inline GorensteinVector gorenstein_vector(const ProperCone& cone) {
    RatMat a(cone.primal_rays.begin(), cone.primal_rays.end());
    RatVec b(a.size(), Rational(1));
    auto l = rat_solve(std::move(a), std::move(b));
    if (!l) throw not_gorenstein_error{};
    for (const auto& r : cone.primal_rays)
        if (rat_dot(*l, r) != Rational(1)) throw std::logic_error("gorenstein check failed");
    return GorensteinVector{*l};
}

/// Pairings <xi, v> over dual rays; all must be positive for an interior xi.
inline Vec dual_ray_pairings(const ProperCone& cone, const Vec& xi) {
    Vec t(cone.dual_rays.size());
    for (size_t i = 0; i < cone.dual_rays.size(); ++i)
        t[i] = dot(xi, to_double(cone.dual_rays[i]));
    return t;
}

inline bool is_interior_reeb(const ProperCone& cone, const Vec& xi, double tol = 0.0) {
    for (double t : dual_ray_pairings(cone, xi))
        if (!(t > tol)) return false;
    return true;
}

/// Normalizes xi onto the slice <l, xi> = m (positive pairing required).
inline ReebVector normalize_reeb(const ProperCone& cone, const GorensteinVector& l, Vec xi) {
    double p = dot(xi, to_double(l.l));
    if (!(p > 0)) throw not_interior_reeb_error{};
    double c = cone.dim / p;
    for (double& x : xi) x *= c;
    return ReebVector{std::move(xi), true};
}

} // namespace ccy
