#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "ccy/certify.hpp"
#include "ccy/errors.hpp"
#include "ccy/linalg.hpp"
#include "ccy/section.hpp"

namespace ccy {

/// Max-of-affine convex function phi(s) = max_j (<q_j, s> - c_j).
struct PiecewiseAffineConvex {
    int n = 0;
    std::vector<Vec> slopes;
    Vec intercepts;

    double operator()(const Vec& s) const {
        double best = -std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < slopes.size(); ++j)
            best = std::max(best, dot(slopes[j], s) - intercepts[j]);
        return best;
    }

    int argmax(const Vec& s) const {
        int jb = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < slopes.size(); ++j) {
            double v = dot(slopes[j], s) - intercepts[j];
            if (v > best) {
                best = v;
                jb = (int)j;
            }
        }
        return jb;
    }

    /// Active gradient at s (the slope of a maximizing piece).
    Vec gradient(const Vec& s) const { return slopes[argmax(s)]; }
};

// ---------------------------------------------------------------------------
// 1-D upper envelope (convex hull trick)
// ---------------------------------------------------------------------------

/// Active-piece structure of a 1-D max-of-affine function: piece[i] is active
/// on (breaks[i-1], breaks[i]) with breaks[-1] = -inf, breaks.back() = +inf.
struct Envelope1D {
    std::vector<int> piece; // indices into the owning pwa, slope ascending
    Vec breaks;             // size piece.size() - 1

    double value(const PiecewiseAffineConvex& f, double s) const {
        size_t i = std::upper_bound(breaks.begin(), breaks.end(), s) - breaks.begin();
        int j = piece[i];
        return f.slopes[j][0] * s - f.intercepts[j];
    }
};

inline Envelope1D envelope_1d(const PiecewiseAffineConvex& f) {
    size_t k = f.slopes.size();
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (f.slopes[a][0] != f.slopes[b][0]) return f.slopes[a][0] < f.slopes[b][0];
        return f.intercepts[a] < f.intercepts[b];
    });
    // equal slopes: only the lowest intercept can be active
    std::vector<int> lines;
    for (int j : idx)
        if (lines.empty() || f.slopes[lines.back()][0] != f.slopes[j][0]) lines.push_back(j);

    auto isect = [&](int a, int b) {
        return (f.intercepts[b] - f.intercepts[a]) / (f.slopes[b][0] - f.slopes[a][0]);
    };
    std::vector<int> stack;
    Vec breaks;
    for (int j : lines) {
        while (!stack.empty()) {
            if (stack.size() == 1) {
                // j beats the single line everywhere left of their crossing
                break;
            }
            double s_new = isect(stack.back(), j);
            if (s_new <= breaks.back()) {
                stack.pop_back();
                breaks.pop_back();
            } else {
                break;
            }
        }
        if (!stack.empty()) breaks.push_back(isect(stack.back(), j));
        stack.push_back(j);
    }
    Envelope1D env;
    env.piece = std::move(stack);
    env.breaks = std::move(breaks);
    return env;
}

// ---------------------------------------------------------------------------
// Seidel's randomized LP for d <= 3 unknowns
// ---------------------------------------------------------------------------

namespace detail {

/// maximize obj . x  s.t.  A x <= b  and  |x_i| <= bound.
/// Returns nullopt when infeasible. Deterministic (fixed shuffle seed).
class SeidelLp {
public:
    SeidelLp(double bound, std::uint64_t seed = 0x5eed) : bound_(bound), rng_(seed) {}

    std::optional<Vec> solve(std::vector<Vec> a, Vec b, const Vec& obj) {
        std::vector<int> order(a.size());
        std::iota(order.begin(), order.end(), 0);
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng_.next_u64() % i]);
        std::vector<Vec> ap;
        Vec bp;
        for (int i : order) {
            ap.push_back(std::move(a[i]));
            bp.push_back(b[i]);
        }
        return recurse(ap, bp, obj);
    }

private:
    double bound_;
    Rng rng_;

    static double eps_for(const Vec& row, double b, double bound) {
        double scale = std::fabs(b);
        for (double x : row) scale += std::fabs(x) * bound;
        return 1e-12 * std::max(1.0, scale);
    }

    std::optional<Vec> recurse(const std::vector<Vec>& a, const Vec& b, const Vec& obj) {
        size_t d = obj.size();
        if (d == 1) return base_1d(a, b, obj[0]);
        Vec x(d);
        for (size_t j = 0; j < d; ++j) x[j] = obj[j] >= 0 ? bound_ : -bound_;
        for (size_t i = 0; i < a.size(); ++i) {
            double eps = eps_for(a[i], b[i], bound_);
            if (dot(a[i], x) <= b[i] + eps) continue;
            // tight at constraint i: eliminate the largest-coefficient variable
            size_t k = 0;
            for (size_t j = 1; j < d; ++j)
                if (std::fabs(a[i][j]) > std::fabs(a[i][k])) k = j;
            if (std::fabs(a[i][k]) <= 1e-14) {
                if (b[i] < -eps) return std::nullopt;
                continue;
            }
            // x_k = (b_i - sum_{j != k} a_ij x_j) / a_ik
            auto reduce_row = [&](const Vec& row, double rhs) {
                Vec r(d - 1);
                double f = row[k] / a[i][k];
                size_t t = 0;
                for (size_t j = 0; j < d; ++j) {
                    if (j == k) continue;
                    r[t++] = row[j] - f * a[i][j];
                }
                return std::make_pair(r, rhs - f * b[i]);
            };
            std::vector<Vec> a2;
            Vec b2;
            for (size_t p = 0; p < i; ++p) {
                auto [r, rhs] = reduce_row(a[p], b[p]);
                a2.push_back(std::move(r));
                b2.push_back(rhs);
            }
            // box on the eliminated variable: +-bound
            {
                Vec row(d, 0.0);
                row[k] = 1.0;
                auto [r, rhs] = reduce_row(row, bound_);
                a2.push_back(r);
                b2.push_back(rhs);
                row[k] = -1.0;
                auto [r2, rhs2] = reduce_row(row, bound_);
                a2.push_back(r2);
                b2.push_back(rhs2);
            }
            Vec obj2;
            {
                auto [r, shift] = reduce_row(obj, 0.0);
                (void)shift;
                obj2 = r;
            }
            auto sub = recurse(a2, b2, obj2);
            if (!sub) return std::nullopt;
            Vec full(d);
            size_t t = 0;
            double acc = b[i];
            for (size_t j = 0; j < d; ++j) {
                if (j == k) continue;
                full[j] = (*sub)[t++];
                acc -= a[i][j] * full[j];
            }
            full[k] = acc / a[i][k];
            x = full;
        }
        return x;
    }

    std::optional<Vec> base_1d(const std::vector<Vec>& a, const Vec& b, double obj) {
        double lo = -bound_, hi = bound_;
        for (size_t i = 0; i < a.size(); ++i) {
            double c = a[i][0];
            double eps = eps_for(a[i], b[i], bound_);
            if (std::fabs(c) <= 1e-14) {
                if (b[i] < -eps) return std::nullopt;
                continue;
            }
            if (c > 0)
                hi = std::min(hi, b[i] / c);
            else
                lo = std::max(lo, b[i] / c);
        }
        if (lo > hi + 1e-9 * std::max(1.0, std::fabs(lo))) return std::nullopt;
        hi = std::max(lo, hi);
        return Vec{obj >= 0 ? hi : lo};
    }
};

inline bool point_in_hull_1d(const std::vector<Vec>& pts, const Vec& q, double tol) {
    double lo = pts[0][0], hi = lo;
    for (const auto& p : pts) {
        lo = std::min(lo, p[0]);
        hi = std::max(hi, p[0]);
    }
    return q[0] >= lo - tol && q[0] <= hi + tol;
}

inline bool point_in_hull_2d(const std::vector<Vec>& hull, const Vec& q, double tol) {
    size_t n = hull.size();
    if (n == 0) return false;
    if (n == 1) return norm2(q - hull[0]) <= tol;
    if (n == 2) {
        // segment distance
        Vec d = hull[1] - hull[0];
        double t = dot(q - hull[0], d) / std::max(dot(d, d), 1e-30);
        t = std::clamp(t, 0.0, 1.0);
        return norm2(q - (hull[0] + t * d)) <= tol;
    }
    for (size_t i = 0; i < n; ++i) {
        const Vec& a = hull[i];
        const Vec& b = hull[(i + 1) % n];
        double cr = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]);
        double scale = std::max(1.0, norm2(b - a));
        if (cr < -tol * scale) return false;
    }
    return true;
}

} // namespace detail

/// Legendre-Fenchel transform phi*(q) = sup_s <q, s> - phi(s).
/// Throws Unbounded for q outside conv(slopes); exact via envelope breakpoints
/// for n = 1, small LP for n = 2, pattern search fallback for n >= 3.
inline double legendre(const PiecewiseAffineConvex& f, const Vec& q, double search_bound = 1e3) {
    double tol = 1e-9;
    if (f.n == 1) {
        if (!detail::point_in_hull_1d(f.slopes, q, tol)) throw unbounded_error{};
        Envelope1D env = envelope_1d(f);
        // concave piecewise-linear in s; the sup sits at a breakpoint
        double best = -std::numeric_limits<double>::infinity();
        if (env.breaks.empty()) {
            // single active piece <q0, s> - c: finite only for q == q0, value c
            return f.intercepts[env.piece[0]];
        }
        for (double s : env.breaks) best = std::max(best, q[0] * s - env.value(f, s));
        return best;
    }
    if (f.n == 2) {
        auto hull = hull_ccw(f.slopes);
        if (!detail::point_in_hull_2d(hull, q, tol)) throw unbounded_error{};
        std::vector<Vec> a;
        Vec b;
        for (size_t k = 0; k < f.slopes.size(); ++k) {
            a.push_back({f.slopes[k][0], f.slopes[k][1], -1.0});
            b.push_back(f.intercepts[k]);
        }
        detail::SeidelLp lp(search_bound);
        auto x = lp.solve(std::move(a), std::move(b), {q[0], q[1], -1.0});
        if (!x) throw unbounded_error{};
        return q[0] * (*x)[0] + q[1] * (*x)[1] - (*x)[2];
    }
    // n >= 3: pattern search on the concave objective <q,s> - phi(s)
    Vec s(f.n, 0.0);
    double step = search_bound / 4, best = dot(q, s) - f(s);
    while (step > 1e-10) {
        bool improved = false;
        for (int j = 0; j < f.n; ++j) {
            for (double sgn : {1.0, -1.0}) {
                Vec trial = s;
                trial[j] += sgn * step;
                double v = dot(q, trial) - f(trial);
                if (v > best + 1e-15) {
                    best = v;
                    s = trial;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
        if (norm_inf(s) > search_bound) throw unbounded_error{};
    }
    return best;
}

/// phi*(q) for a batch of query points (not necessarily slopes of f).
/// For n = 1 the maximizing envelope breakpoint is monotone in q, giving a
/// linear-time sweep after sorting.
inline Vec legendre_many(const PiecewiseAffineConvex& f, const std::vector<Vec>& queries) {
    Vec out(queries.size());
    if (f.n == 1) {
        Envelope1D env = envelope_1d(f);
        if (env.breaks.empty()) {
            for (size_t j = 0; j < queries.size(); ++j) out[j] = f.intercepts[env.piece[0]];
            return out;
        }
        double qlo = f.slopes[env.piece.front()][0], qhi = f.slopes[env.piece.back()][0];
        Vec phival(env.breaks.size());
        for (size_t i = 0; i < env.breaks.size(); ++i) {
            int p = env.piece[i];
            phival[i] = f.slopes[p][0] * env.breaks[i] - f.intercepts[p];
        }
        std::vector<int> order(queries.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return queries[a][0] < queries[b][0]; });
        size_t bp = 0;
        for (int j : order) {
            double q = queries[j][0];
            if (q < qlo - 1e-9 || q > qhi + 1e-9) throw unbounded_error{};
            auto g = [&](size_t i) { return q * env.breaks[i] - phival[i]; };
            while (bp + 1 < env.breaks.size() && g(bp + 1) >= g(bp)) ++bp;
            out[j] = g(bp);
        }
        return out;
    }
    for (size_t j = 0; j < queries.size(); ++j) out[j] = legendre(f, queries[j]);
    return out;
}

/// Lower-convex-envelope pass: replaces every intercept by the tight value
/// phi*(q_j). Leaves the function phi itself unchanged (tight pieces touch the
/// envelope from below).
inline PiecewiseAffineConvex convexify(const PiecewiseAffineConvex& f) {
    PiecewiseAffineConvex out = f;
    out.intercepts = legendre_many(f, f.slopes);
    return out;
}

} // namespace ccy
