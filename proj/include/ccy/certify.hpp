#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "ccy/cone.hpp"
#include "ccy/section.hpp"

namespace ccy {

/// Deterministic, platform-stable generator (xoshiro256++ seeded by splitmix64).
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix(x);
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return std::ldexp(double(next_u64() >> 11), -53); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    static std::uint64_t splitmix(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Sub-seed for batch k, derived deterministically from the master seed.
    static std::uint64_t subseed(std::uint64_t master, std::uint64_t k) {
        std::uint64_t x = master ^ (0x9e3779b97f4a7c15ULL * (k + 1));
        return splitmix(x);
    }

private:
    std::uint64_t state_[4];
};

struct McEstimate {
    double estimate = 0;
    double std_error = 0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
};

/// Rejection sampling of the truncated cone C* \cap { <xi, .> <= 1 } inside
/// the bounding box spanned by 0 and the cross-section vertices.
inline McEstimate mc_volume(const ProperCone& cone, const Vec& xi, std::uint64_t samples,
                            std::uint64_t seed) {
    int m = cone.dim;
    CrossSection cs = cross_section(cone, xi);
    Vec lo(m, 0.0), hi(m, 0.0);
    for (int j = 0; j < m; ++j)
        for (const auto& p : cs.vertices) {
            lo[j] = std::min(lo[j], p[j]);
            hi[j] = std::max(hi[j], p[j]);
        }
    double box = 1.0;
    for (int j = 0; j < m; ++j) box *= (hi[j] - lo[j]);

    std::vector<Vec> normals = to_double(cone.primal_rays);
    Rng rng(seed);
    std::uint64_t hits = 0;
    Vec x(m);
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (int j = 0; j < m; ++j) x[j] = rng.uniform(lo[j], hi[j]);
        if (dot(xi, x) > 1.0) continue;
        bool inside = true;
        for (const auto& n : normals)
            if (dot(n, x) < 0) {
                inside = false;
                break;
            }
        if (inside) ++hits;
    }
    double p = double(hits) / double(samples);
    McEstimate out;
    out.hits = hits;
    out.samples = samples;
    out.estimate = box * p;
    out.std_error = box * std::sqrt(std::max(p * (1 - p), 0.0) / double(samples));
    return out;
}

/// Central finite differences, one step per coordinate.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, Vec point, double step) {
    if (!(step > 0)) throw step_underflow_error{};
    Vec g(point.size());
    for (size_t i = 0; i < point.size(); ++i) {
        double save = point[i];
        if (save + step == save) throw step_underflow_error{};
        point[i] = save + step;
        double fp = f(point);
        point[i] = save - step;
        double fm = f(point);
        point[i] = save;
        g[i] = (fp - fm) / (2 * step);
    }
    return g;
}

inline Mat fd_hessian(const std::function<double(const Vec&)>& f, Vec point, double step) {
    size_t n = point.size();
    Mat h(n, Vec(n));
    auto grad_at = [&](Vec x) { return fd_gradient(f, std::move(x), step); };
    for (size_t i = 0; i < n; ++i) {
        Vec xp = point, xm = point;
        xp[i] += step;
        xm[i] -= step;
        Vec gp = grad_at(xp), gm = grad_at(xm);
        for (size_t j = 0; j < n; ++j) h[i][j] = (gp[j] - gm[j]) / (2 * step);
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < i; ++j) {
            double s = 0.5 * (h[i][j] + h[j][i]);
            h[i][j] = h[j][i] = s;
        }
    return h;
}

/// Reference solution of phi'' = e^{-2 phi} with gradient range (-k, k):
/// phi(s) = log(cosh(k s) / k), evaluated overflow-safely.
inline Vec ode_reference(double k, const Vec& s_grid) {
    if (!(k > 0)) throw numeric_error("ode_reference needs k > 0");
    Vec out(s_grid.size());
    for (size_t i = 0; i < s_grid.size(); ++i) {
        double u = std::fabs(k * s_grid[i]);
        // log cosh u = u + log1p(e^{-2u}) - log 2
        out[i] = u + std::log1p(std::exp(-2 * u)) - std::log(2.0) - std::log(k);
    }
    return out;
}

} // namespace ccy
