#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "ccy/rational.hpp"

namespace ccy {

using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>; // row major
using Vec = std::vector<double>;
using Mat = std::vector<Vec>; // row major

// ---------------------------------------------------------------------------
// exact rational routines
// ---------------------------------------------------------------------------

inline Rational rat_dot(const RatVec& a, const RatVec& b) {
    Rational s;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Row echelon rank by fraction-free-ish Gaussian elimination (exact pivots).
inline size_t rat_rank(RatMat a) {
    size_t rows = a.size();
    if (rows == 0) return 0;
    size_t cols = a[0].size(), r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && a[p][c].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        for (size_t i = r + 1; i < rows; ++i) {
            if (a[i][c].is_zero()) continue;
            Rational f = a[i][c] / a[r][c];
            for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        ++r;
    }
    return r;
}

/// Solves A x = b exactly. Returns nullopt when inconsistent. Requires the
/// consistent system to determine x uniquely (rank == cols), which holds for
/// all uses here; throws otherwise.
inline std::optional<RatVec> rat_solve(RatMat a, RatVec b) {
    size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    std::vector<size_t> pivot_col;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && a[p][c].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        std::swap(b[p], b[r]);
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            Rational f = a[i][c] / a[r][c];
            for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (size_t i = r; i < rows; ++i)
        if (!b[i].is_zero()) return std::nullopt; // inconsistent
    if (pivot_col.size() != cols) throw std::logic_error("rat_solve: underdetermined system");
    RatVec x(cols);
    for (size_t k = 0; k < pivot_col.size(); ++k) x[pivot_col[k]] = b[k] / a[k][pivot_col[k]];
    return x;
}

/// Inverse of a square exact matrix; throws on singular input.
inline RatMat rat_inverse(RatMat a) {
    size_t n = a.size();
    RatMat inv(n, RatVec(n));
    for (size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        while (p < n && a[p][c].is_zero()) ++p;
        if (p == n) throw std::logic_error("rat_inverse: singular matrix");
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        Rational d = a[c][c];
        for (size_t j = 0; j < n; ++j) {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for (size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c].is_zero()) continue;
            Rational f = a[i][c];
            for (size_t j = 0; j < n; ++j) {
                a[i][j] -= f * a[c][j];
                inv[i][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

inline Rational rat_det(RatMat a) {
    size_t n = a.size();
    Rational det(1);
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        while (p < n && a[p][c].is_zero()) ++p;
        if (p == n) return Rational(0);
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (size_t i = c + 1; i < n; ++i) {
            if (a[i][c].is_zero()) continue;
            Rational f = a[i][c] / a[c][c];
            for (size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return det;
}

/// Scales a rational vector to the primitive integer vector on the same ray.
inline RatVec rat_primitive(const RatVec& v) {
    long long lcm = 1;
    for (const auto& x : v) lcm = std::lcm(lcm, x.den());
    std::vector<long long> ints;
    ints.reserve(v.size());
    long long g = 0;
    for (const auto& x : v) {
        long long n = x.num() * (lcm / x.den());
        ints.push_back(n);
        g = std::gcd(g, n < 0 ? -n : n);
    }
    RatVec out(v.size());
    if (g == 0) return out;
    for (size_t i = 0; i < v.size(); ++i) out[i] = Rational(ints[i] / g);
    return out;
}

inline bool rat_lex_less(const RatVec& a, const RatVec& b) {
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (b[i] < a[i]) return false;
    }
    return false;
}

// ---------------------------------------------------------------------------
// small dense double routines
// ---------------------------------------------------------------------------

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
    double s = 0;
    for (double x : a) s = std::max(s, std::fabs(x));
    return s;
}

inline Vec operator+(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}
inline Vec operator-(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}
inline Vec operator*(double c, const Vec& a) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline Vec mat_vec(const Mat& m, const Vec& x) {
    Vec r(m.size(), 0.0);
    for (size_t i = 0; i < m.size(); ++i) r[i] = dot(m[i], x);
    return r;
}

/// Solves a small symmetric positive definite system by Cholesky; returns
/// nullopt when the factorization breaks down (not SPD / near singular).
inline std::optional<Vec> solve_spd(Mat a, Vec b) {
    size_t n = a.size();
    for (size_t j = 0; j < n; ++j) {
        double d = a[j][j];
        for (size_t k = 0; k < j; ++k) d -= a[j][k] * a[j][k];
        if (!(d > 0) || !std::isfinite(d)) return std::nullopt;
        a[j][j] = std::sqrt(d);
        for (size_t i = j + 1; i < n; ++i) {
            double s = a[i][j];
            for (size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
            a[i][j] = s / a[j][j];
        }
    }
    for (size_t i = 0; i < n; ++i) { // forward
        double s = b[i];
        for (size_t k = 0; k < i; ++k) s -= a[i][k] * b[k];
        b[i] = s / a[i][i];
    }
    for (size_t i = n; i-- > 0;) { // backward
        double s = b[i];
        for (size_t k = i + 1; k < n; ++k) s -= a[k][i] * b[k];
        b[i] = s / a[i][i];
    }
    return b;
}

inline Vec to_double(const RatVec& v) {
    Vec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = v[i].to_double();
    return r;
}

inline std::vector<Vec> to_double(const std::vector<RatVec>& vs) {
    std::vector<Vec> r;
    r.reserve(vs.size());
    for (const auto& v : vs) r.push_back(to_double(v));
    return r;
}

} // namespace ccy
