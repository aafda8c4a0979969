#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "ccy/cone.hpp"
#include "ccy/section.hpp"

namespace ccy {

/// Volume data of the truncated dual cone C* \cap { <xi, .> <= 1 }.
/// v_char = m! * v_vol is the character-count normalization.
struct VolumeEvaluation {
    double v_vol = 0;
    double v_char = 0;
    double log_v = 0;
    Vec grad_log_v;    // filled by grad_hess_log_volume
    Mat hessian_log_v; // filled by grad_hess_log_volume
};

namespace detail {

inline std::vector<double> simplex_abs_dets(const ProperCone& cone) {
    std::vector<double> dets;
    dets.reserve(cone.dual_simplices.size());
    for (const auto& s : cone.dual_simplices) {
        RatMat a;
        for (int i : s) a.push_back(cone.dual_rays[i]);
        Rational d = rat_det(std::move(a));
        dets.push_back(std::fabs(d.to_double()));
    }
    return dets;
}

inline double double_det(Mat a) {
    size_t n = a.size();
    double det = 1.0;
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        for (size_t i = c + 1; i < n; ++i)
            if (std::fabs(a[i][c]) > std::fabs(a[p][c])) p = i;
        if (a[p][c] == 0.0) return 0.0;
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (size_t i = c + 1; i < n; ++i) {
            double f = a[i][c] / a[c][c];
            for (size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return det;
}

} // namespace detail

/// Evaluates V(xi) two ways and cross-checks: the triangulated truncated cone
/// and the per-simplex rational Laplace formula |det| / prod <xi, v_i>.
inline VolumeEvaluation volume(const ProperCone& cone, const Vec& xi) {
    int m = cone.dim;
    Vec t = dual_ray_pairings(cone, xi);
    for (double ti : t)
        if (!(ti > 0)) throw not_interior_reeb_error{};

    double mfact = detail::factorial(m);
    auto dets = detail::simplex_abs_dets(cone);

    double v_tri = 0, v_laplace = 0;
    for (size_t s = 0; s < cone.dual_simplices.size(); ++s) {
        const auto& simplex = cone.dual_simplices[s];
        Mat scaled(m, Vec(m));
        double denom = 1.0;
        for (int i = 0; i < m; ++i) {
            int ray = simplex[i];
            Vec v = to_double(cone.dual_rays[ray]);
            for (int j = 0; j < m; ++j) scaled[i][j] = v[j] / t[ray];
            denom *= t[ray];
        }
        v_tri += std::fabs(detail::double_det(std::move(scaled))) / mfact;
        v_laplace += dets[s] / denom / mfact;
    }
    if (std::fabs(v_tri - v_laplace) > 1e-10 * std::max(v_tri, v_laplace))
        throw std::logic_error("volume routes disagree beyond 1e-10 relative");

    VolumeEvaluation out;
    out.v_vol = v_laplace;
    out.v_char = mfact * v_laplace;
    out.log_v = std::log(v_laplace);
    return out;
}

/// Gradient from the barycenter identity, Hessian as the covariance of the
/// normalized measure e^{-<xi,p>} on C*, differentiated per Laplace simplex
/// term in closed form.
inline VolumeEvaluation grad_hess_log_volume(const ProperCone& cone, const Vec& xi) {
    int m = cone.dim;
    VolumeEvaluation out = volume(cone, xi);

    CrossSection cs = cross_section(cone, xi);
    SectionMeasure sm = measure_barycenter_moments(cs);
    out.grad_log_v = (-double(m)) * sm.barycenter;

    Vec t = dual_ray_pairings(cone, xi);
    auto dets = detail::simplex_abs_dets(cone);
    double f = 0; // integral of e^{-<xi,p>} over C*
    Vec grad_f(m, 0.0);
    Mat hess_f(m, Vec(m, 0.0));
    for (size_t s = 0; s < cone.dual_simplices.size(); ++s) {
        const auto& simplex = cone.dual_simplices[s];
        double term = dets[s];
        for (int ray : simplex) term /= t[ray];
        f += term;
        Vec g(m, 0.0);
        for (int ray : simplex) g = g + (1.0 / t[ray]) * to_double(cone.dual_rays[ray]);
        grad_f = grad_f - term * g;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                double h = g[a] * g[b];
                for (int ray : simplex) {
                    Vec v = to_double(cone.dual_rays[ray]);
                    h += v[a] * v[b] / (t[ray] * t[ray]);
                }
                hess_f[a][b] += term * h;
            }
    }
    out.hessian_log_v.assign(m, Vec(m, 0.0));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            out.hessian_log_v[a][b] = hess_f[a][b] / f - (grad_f[a] / f) * (grad_f[b] / f);

    // the Laplace-route gradient must match the barycenter identity
    for (int a = 0; a < m; ++a)
        if (std::fabs(grad_f[a] / f - out.grad_log_v[a]) >
            1e-8 * std::max(1.0, norm_inf(out.grad_log_v)))
            throw std::logic_error("gradient routes disagree");
    return out;
}

namespace detail {

/// Regularized upper incomplete gamma Q(m, u) for integer m.
inline double gamma_q(int m, double u) {
    double term = std::exp(-u), sum = term;
    for (int k = 1; k < m; ++k) {
        term *= u / k;
        sum += term;
    }
    return sum;
}

} // namespace detail

/// Truncated character sum t^m sum e^{-t <xi, p>} over lattice points of
/// C* with <xi, p> <= cutoff. The innermost coordinate is summed as an exact
/// geometric series over its feasibility interval; outer coordinates are
/// enumerated with interval-arithmetic pruning.
inline double volume_lattice_asymptotic(const ProperCone& cone, const Vec& xi, double t,
                                        double cutoff) {
    if (!(t > 0 && t <= 0.1)) throw numeric_error("lattice asymptotic needs t in (0, 0.1]");
    int m = cone.dim;
    CrossSection cs = cross_section(cone, xi); // also certifies interior xi

    // integer ray matrix (rays are primitive integer vectors after validation)
    std::vector<std::vector<long long>> rays;
    for (const auto& r : cone.primal_rays) {
        std::vector<long long> row;
        for (const auto& x : r) {
            if (!x.is_integer()) throw structural_error("expected integer primal rays");
            row.push_back(x.num());
        }
        rays.push_back(std::move(row));
    }

    // bounding box of the truncated cone from cross-section vertices
    std::vector<long long> lo(m, 0), hi(m, 0);
    for (int j = 0; j < m; ++j) {
        double mn = 0, mx = 0;
        for (const auto& p : cs.vertices) {
            mn = std::min(mn, p[j] * cutoff);
            mx = std::max(mx, p[j] * cutoff);
        }
        lo[j] = (long long)std::floor(mn - 1);
        hi[j] = (long long)std::ceil(mx + 1);
    }

    // widest coordinate is summed analytically
    int inner = 0;
    for (int j = 1; j < m; ++j)
        if (hi[j] - lo[j] > hi[inner] - lo[inner]) inner = j;
    std::vector<int> outer;
    for (int j = 0; j < m; ++j)
        if (j != inner) outer.push_back(j);

    double sum = 0.0;
    std::vector<long long> point(m, 0);

    // geometric series of e^{-t xi_inner x} for integer x in [a, b], anchored
    // at the largest term
    auto series = [&](double c0, long long a, long long b) {
        if (a > b) return 0.0;
        double s = t * xi[inner];
        long long n = b - a + 1;
        double anchor, rate; // sum = e^{-t c0} * e^{anchor} * (1 - e^{-|s| n}) / (1 - e^{-|s|})
        if (s >= 0) {
            anchor = -s * (double)a;
            rate = s;
        } else {
            anchor = -s * (double)b;
            rate = -s;
        }
        double ratio;
        if (rate < 1e-12) {
            ratio = (double)n;
        } else {
            ratio = (-std::expm1(-rate * (double)n)) / (-std::expm1(-rate));
        }
        return std::exp(-t * c0 + anchor) * ratio;
    };

    std::function<void(size_t, std::vector<double>&, double)> recurse =
        [&](size_t level, std::vector<double>& ray_part, double level_part) {
            if (level == outer.size()) {
                // feasible interval of the inner coordinate
                long long a = lo[inner], b = hi[inner];
                for (size_t i = 0; i < rays.size(); ++i) {
                    long long coef = rays[i][inner];
                    // ray_part[i] + coef * x >= 0 with integer data
                    long long base = (long long)std::llround(ray_part[i]);
                    if (coef == 0) {
                        if (base < 0) return;
                    } else if (coef > 0) {
                        long long bound = -base; // x >= bound/coef
                        long long q = bound >= 0 ? (bound + coef - 1) / coef
                                                 : -((-bound) / coef);
                        a = std::max(a, q);
                    } else {
                        long long c = -coef; // x <= base/c
                        long long q = base >= 0 ? base / c : -((-base + c - 1) / c);
                        b = std::min(b, q);
                    }
                }
                if (xi[inner] > 0) {
                    double x_hi = (cutoff - level_part) / xi[inner];
                    b = std::min(b, (long long)std::floor(x_hi + 1e-9));
                } else if (xi[inner] < 0) {
                    double x_lo = (cutoff - level_part) / xi[inner];
                    a = std::max(a, (long long)std::ceil(x_lo - 1e-9));
                } else if (level_part > cutoff) {
                    return;
                }
                sum += series(level_part, a, b);
                return;
            }
            int j = outer[level];
            for (long long x = lo[j]; x <= hi[j]; ++x) {
                // prune: best achievable level over remaining coordinates
                double lp = level_part + xi[j] * (double)x;
                double best = lp;
                for (size_t r = level + 1; r < outer.size(); ++r) {
                    int k = outer[r];
                    best += std::min(xi[k] * (double)lo[k], xi[k] * (double)hi[k]);
                }
                best += std::min(xi[inner] * (double)lo[inner], xi[inner] * (double)hi[inner]);
                if (best > cutoff) continue;
                // prune: cone constraints unreachable over the remaining box
                bool feasible = true;
                for (size_t i = 0; i < rays.size() && feasible; ++i) {
                    double rp = ray_part[i] + (double)rays[i][j] * (double)x;
                    double reach = rp;
                    for (size_t r = level + 1; r < outer.size(); ++r) {
                        int k = outer[r];
                        reach += std::max((double)rays[i][k] * (double)lo[k],
                                          (double)rays[i][k] * (double)hi[k]);
                    }
                    reach += std::max((double)rays[i][inner] * (double)lo[inner],
                                      (double)rays[i][inner] * (double)hi[inner]);
                    if (reach < 0) feasible = false;
                }
                if (!feasible) continue;
                std::vector<double> next = ray_part;
                for (size_t i = 0; i < rays.size(); ++i) next[i] += (double)rays[i][j] * (double)x;
                recurse(level + 1, next, lp);
            }
        };

    std::vector<double> ray_part(rays.size(), 0.0);
    recurse(0, ray_part, 0.0);

    double scaled = std::pow(t, m) * sum;
    double v_char = volume(cone, xi).v_char;
    double tail = v_char * detail::gamma_q(m, t * cutoff);
    if (tail > 0.1 * scaled) throw cutoff_too_small_error{};
    return scaled;
}

/// Cutoff giving an estimated relative tail below rel_tail at parameter t.
inline double lattice_cutoff_for(int m, double t, double rel_tail = 1e-3) {
    double u = 1.0;
    while (detail::gamma_q(m, u) > rel_tail && u < 1e4) u *= 1.25;
    return u / t;
}

} // namespace ccy
