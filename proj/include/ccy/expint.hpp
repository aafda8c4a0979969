#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ccy/linalg.hpp"

namespace ccy {
namespace expint {

/// Divided difference of exp over the given nodes (any multiplicities).
/// Integrals of exp over simplices reduce to these:
///   int_simplex e^{l(x)} dx = k! vol * exp[u_0, ..., u_k]
///   int_simplex e^{l(x)} x dx = k! vol * sum_i x_i * exp[u_0, ..., u_k, u_i]
/// with u_i the values of the affine exponent at the vertices.
inline double exp_dd(std::vector<double> v) {
    size_t k1 = v.size();
    std::sort(v.begin(), v.end());
    double span = v.back() - v.front();
    double mean = 0;
    for (double x : v) mean += x;
    mean /= double(k1);

    if (span < 0.05) {
        // exp[v_0..v_k] = e^{mean} * sum_j h_j(delta) / (k + j)!
        // h_j = complete homogeneous symmetric polynomial of the centered nodes
        std::vector<double> d(k1);
        for (size_t i = 0; i < k1; ++i) d[i] = v[i] - mean;
        // h_j via the generating recurrence h_j = (1/j) sum_{i=1}^{j} p_i h_{j-i},
        // p_i = power sums
        const int terms = 8;
        std::vector<double> p(terms + 1, 0.0), h(terms + 1, 0.0);
        for (int i = 1; i <= terms; ++i)
            for (double x : d) p[i] += std::pow(x, i);
        h[0] = 1.0;
        for (int j = 1; j <= terms; ++j) {
            double s = 0;
            for (int i = 1; i <= j; ++i) s += p[i] * h[j - i];
            h[j] = s / j;
        }
        double fact = 1.0;
        for (size_t i = 2; i <= k1 - 1; ++i) fact *= double(i); // (k)!
        double sum = 0, f = fact;
        for (int j = 0; j <= terms; ++j) {
            sum += h[j] / f;
            f *= double(k1 + j); // (k + j + 1)!
        }
        return std::exp(mean) * sum;
    }

    // Newton tableau on sorted nodes; equal sorted endpoints mean a fully
    // confluent block, handled by the derivative rule dd = e^v / len!
    size_t k = k1;
    std::vector<std::vector<double>> dd(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i) dd[i][i] = std::exp(v[i]);
    for (size_t len = 1; len < k; ++len) {
        for (size_t i = 0; i + len < k; ++i) {
            size_t j = i + len;
            if (v[j] == v[i]) {
                double fact = 1.0;
                for (size_t t = 2; t <= len; ++t) fact *= double(t);
                dd[i][j] = std::exp(v[i]) / fact;
            } else if (v[j] - v[i] < 0.02) {
                // short sub-block: series on the sub-range for stability
                std::vector<double> sub(v.begin() + i, v.begin() + j + 1);
                dd[i][j] = exp_dd(std::move(sub));
            } else {
                dd[i][j] = (dd[i + 1][j] - dd[i][j - 1]) / (v[j] - v[i]);
            }
        }
    }
    return dd[0][k - 1];
}

inline double exp_dd(double a, double b) { return exp_dd(std::vector<double>{a, b}); }
inline double exp_dd(double a, double b, double c) {
    return exp_dd(std::vector<double>{a, b, c});
}

/// int_alpha^beta e^{g s + h} ds, exact.
inline double segment_exp(double alpha, double beta, double g, double h) {
    if (beta <= alpha) return 0.0;
    return (beta - alpha) * exp_dd(g * alpha + h, g * beta + h);
}

/// int_alpha^beta s e^{g s + h} ds, exact (1-simplex moment formula).
inline double segment_exp_moment(double alpha, double beta, double g, double h) {
    if (beta <= alpha) return 0.0;
    double u0 = g * alpha + h, u1 = g * beta + h;
    return (beta - alpha) *
           (alpha * exp_dd({u0, u1, u0}) + beta * exp_dd({u0, u1, u1}));
}

/// int_beta^inf e^{g s + h} ds for g < 0, exact.
inline double tail_exp(double beta, double g, double h) {
    return std::exp(g * beta + h) / (-g);
}

/// int_beta^inf s e^{g s + h} ds for g < 0.
inline double tail_exp_moment(double beta, double g, double h) {
    double e = std::exp(g * beta + h);
    return e * (beta / (-g) + 1.0 / (g * g));
}

/// Integral of e^{<a, x> + b} over a convex ccw polygon (fan triangulation).
inline double polygon_exp(const std::vector<Vec>& poly, const Vec& a, double b) {
    if (poly.size() < 3) return 0.0;
    double total = 0;
    const Vec& p0 = poly[0];
    double u0 = dot(a, p0) + b;
    for (size_t i = 1; i + 1 < poly.size(); ++i) {
        const Vec& p1 = poly[i];
        const Vec& p2 = poly[i + 1];
        double area2 = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]);
        double u1 = dot(a, p1) + b, u2 = dot(a, p2) + b;
        total += area2 * exp_dd(u0, u1, u2);
    }
    return total;
}

/// Integral of x e^{<a, x> + b} over a convex ccw polygon.
inline Vec polygon_exp_moment(const std::vector<Vec>& poly, const Vec& a, double b) {
    Vec total(2, 0.0);
    if (poly.size() < 3) return total;
    const Vec& p0 = poly[0];
    double u0 = dot(a, p0) + b;
    for (size_t i = 1; i + 1 < poly.size(); ++i) {
        const Vec& p1 = poly[i];
        const Vec& p2 = poly[i + 1];
        double area2 = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]);
        double u1 = dot(a, p1) + b, u2 = dot(a, p2) + b;
        double w0 = exp_dd({u0, u1, u2, u0});
        double w1 = exp_dd({u0, u1, u2, u1});
        double w2 = exp_dd({u0, u1, u2, u2});
        for (int c = 0; c < 2; ++c)
            total[c] += area2 * (p0[c] * w0 + p1[c] * w1 + p2[c] * w2);
    }
    return total;
}

} // namespace expint
} // namespace ccy
