#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ccy/expint.hpp"
#include "ccy/pwa.hpp"
#include "ccy/slopes.hpp"

namespace ccy {

/// Masses of the measure e^{-m phi} ds per active piece, with the total in
/// log form. n = 1 integrates exactly over R; n = 2 integrates exactly over
/// the power cells clipped to [-box, box]^2; n = 3 falls back to Monte Carlo.
struct MeasureField {
    double log_total = 0; // log int e^{-m phi}
    Vec masses;           // normalized: masses[j] = mu(S_j) / mu_tot
    Vec barycenter;       // mu-barycenter of s (when requested)
};

class MeasureEngine {
public:
    MeasureEngine(std::vector<Vec> slopes, double m_homog, double box = 0.0,
                  int mc_samples = 200000, std::uint64_t seed = 1)
        : slopes_(std::move(slopes)), m_(m_homog), box_(box), mc_samples_(mc_samples),
          seed_(seed) {
        n_ = slopes_.empty() ? 0 : (int)slopes_[0].size();
        if (n_ == 2) {
            size_t k = slopes_.size();
            neighbors_.resize(k);
            for (size_t j = 0; j < k; ++j) {
                std::vector<int> order;
                for (size_t i = 0; i < k; ++i)
                    if (i != j && norm2(slopes_[i] - slopes_[j]) > 1e-14)
                        order.push_back((int)i);
                std::sort(order.begin(), order.end(), [&](int a, int b) {
                    return norm2(slopes_[a] - slopes_[j]) < norm2(slopes_[b] - slopes_[j]);
                });
                neighbors_[j] = std::move(order);
            }
        }
    }

    int dim() const { return n_; }
    double box() const { return box_; }
    const std::vector<Vec>& slopes() const { return slopes_; }

    /// Distance from the origin to the boundary of conv(slopes); the decay
    /// rate of e^{-m phi}. Throws NonIntegrable when 0 is not interior.
    double decay_rate() const {
        if (n_ == 1) {
            double lo = slopes_[0][0], hi = lo;
            for (const auto& q : slopes_) {
                lo = std::min(lo, q[0]);
                hi = std::max(hi, q[0]);
            }
            if (!(lo < -1e-12 && hi > 1e-12)) throw non_integrable_error{};
            return std::min(-lo, hi);
        }
        if (n_ == 2) {
            auto hull = hull_ccw(slopes_);
            if (hull.size() < 3) throw non_integrable_error{};
            double rho = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < hull.size(); ++i) {
                const Vec& a = hull[i];
                const Vec& b = hull[(i + 1) % hull.size()];
                Vec nrm = {-(b[1] - a[1]), b[0] - a[0]}; // left normal, inward for ccw
                double len = norm2(nrm);
                if (!(len > 1e-15)) continue;
                double d = -dot(nrm, a) / len; // distance of 0 to the edge, signed inward
                rho = std::min(rho, d);
            }
            if (!(rho > 1e-12)) throw non_integrable_error{};
            return rho;
        }
        // n = 3 fallback: inradius lower bound from facet distances is not
        // available without an H-description; use the smallest vertex norm.
        double r = std::numeric_limits<double>::infinity();
        for (const auto& q : slopes_) r = std::min(r, norm2(q));
        if (!(r > 1e-12)) throw non_integrable_error{};
        return r;
    }

    /// Box radius making the neglected tail mass below e^{-tail_exponent}
    /// relative to the peak.
    double auto_box(const Vec& intercepts, double tail_exponent = 33.0) const {
        double cmax = intercepts[0], cmin = intercepts[0];
        for (double c : intercepts) {
            cmax = std::max(cmax, c);
            cmin = std::min(cmin, c);
        }
        double rho = decay_rate();
        return (m_ * (cmax - cmin) + tail_exponent) / (m_ * rho) + 1.0;
    }

    MeasureField evaluate(const PiecewiseAffineConvex& f, bool want_barycenter = false,
                          std::vector<std::vector<Vec>>* cells = nullptr) const {
        switch (n_) {
        case 1: return eval_1d(f, want_barycenter);
        case 2: return eval_2d(f, want_barycenter, cells);
        default: return eval_mc(f, want_barycenter);
        }
    }

private:
    std::vector<Vec> slopes_;
    double m_;
    double box_;
    int mc_samples_;
    std::uint64_t seed_;
    int n_ = 0;
    std::vector<std::vector<int>> neighbors_;

    MeasureField eval_1d(const PiecewiseAffineConvex& f, bool want_bary) const {
        Envelope1D env = envelope_1d(f);
        size_t pieces = env.piece.size();
        if (f.slopes[env.piece.front()][0] >= -1e-12 || f.slopes[env.piece.back()][0] <= 1e-12)
            throw non_integrable_error{};

        // shift by the largest exponent -m * phi at the envelope breakpoints
        double shift = -std::numeric_limits<double>::infinity();
        for (double s : env.breaks) shift = std::max(shift, -m_ * env.value(f, s));
        if (env.breaks.empty()) throw non_integrable_error{};

        MeasureField out;
        out.masses.assign(f.slopes.size(), 0.0);
        double total = 0, mom = 0;
        for (size_t i = 0; i < pieces; ++i) {
            int j = env.piece[i];
            double g = -m_ * f.slopes[j][0];
            double h = m_ * f.intercepts[j] - shift;
            double seg = 0, segmom = 0;
            if (i == 0) {
                seg = expint::tail_exp(-env.breaks[0], -g, h); // reflect to +inf form
                // int_{-inf}^{b} e^{g s + h} ds with g > 0 equals tail at -b for -g
                segmom = -expint::tail_exp_moment(-env.breaks[0], -g, h);
            } else if (i + 1 == pieces) {
                seg = expint::tail_exp(env.breaks[i - 1], g, h);
                segmom = expint::tail_exp_moment(env.breaks[i - 1], g, h);
            } else {
                seg = expint::segment_exp(env.breaks[i - 1], env.breaks[i], g, h);
                segmom = expint::segment_exp_moment(env.breaks[i - 1], env.breaks[i], g, h);
            }
            out.masses[j] += seg;
            total += seg;
            if (want_bary) mom += segmom;
        }
        for (double& x : out.masses) x /= total;
        out.log_total = shift + std::log(total);
        if (want_bary) out.barycenter = {mom / total};
        return out;
    }

    MeasureField eval_2d(const PiecewiseAffineConvex& f, bool want_bary,
                         std::vector<std::vector<Vec>>* cells = nullptr) const {
        if (!(box_ > 0)) throw structural_error("2-d measure engine needs a box radius");
        const double r = box_;
        size_t k = f.slopes.size();
        double cmax = *std::max_element(f.intercepts.begin(), f.intercepts.end());
        double shift = m_ * cmax;
        if (cells) cells->assign(k, {});

        MeasureField out;
        out.masses.assign(k, 0.0);
        double total = 0;
        Vec mom(2, 0.0);
        std::vector<Vec> poly;
        for (size_t j = 0; j < k; ++j) {
            poly = {{-r, -r}, {r, -r}, {r, r}, {-r, r}};
            Vec bb_lo = {-r, -r}, bb_hi = {r, r};
            for (int i : neighbors_[j]) {
                Vec a = f.slopes[j] - f.slopes[i];
                double b = f.intercepts[j] - f.intercepts[i];
                // redundant when min over the bbox of <a, s> >= b
                double mn = std::min(a[0] * bb_lo[0], a[0] * bb_hi[0]) +
                            std::min(a[1] * bb_lo[1], a[1] * bb_hi[1]);
                if (mn >= b) continue;
                poly = detail::clip_halfplane(poly, a, b);
                if (poly.size() < 3) break;
                bb_lo = bb_hi = poly[0];
                for (const auto& p : poly)
                    for (int c = 0; c < 2; ++c) {
                        bb_lo[c] = std::min(bb_lo[c], p[c]);
                        bb_hi[c] = std::max(bb_hi[c], p[c]);
                    }
            }
            if (poly.size() < 3) continue;
            if (cells) (*cells)[j] = poly;
            Vec a = {-m_ * f.slopes[j][0], -m_ * f.slopes[j][1]};
            double b = m_ * f.intercepts[j] - shift;
            double cell = expint::polygon_exp(poly, a, b);
            out.masses[j] = cell;
            total += cell;
            if (want_bary) {
                Vec cm = expint::polygon_exp_moment(poly, a, b);
                mom = mom + cm;
            }
        }
        if (!(total > 0)) throw non_integrable_error{};
        for (double& x : out.masses) x /= total;
        out.log_total = shift + std::log(total);
        if (want_bary) out.barycenter = (1.0 / total) * mom;
        return out;
    }

    MeasureField eval_mc(const PiecewiseAffineConvex& f, bool want_bary) const {
        if (!(box_ > 0)) throw structural_error("mc measure engine needs a box radius");
        int n = n_;
        double vol = std::pow(2 * box_, n);
        double cmax = *std::max_element(f.intercepts.begin(), f.intercepts.end());
        double shift = m_ * cmax;
        Rng rng(seed_);
        MeasureField out;
        out.masses.assign(f.slopes.size(), 0.0);
        Vec mom(n, 0.0);
        double total = 0;
        Vec s(n);
        for (int it = 0; it < mc_samples_; ++it) {
            for (int c = 0; c < n; ++c) s[c] = rng.uniform(-box_, box_);
            int j = f.argmax(s);
            double w = std::exp(-m_ * (dot(f.slopes[j], s) - f.intercepts[j]) - shift);
            out.masses[j] += w;
            total += w;
            if (want_bary) mom = mom + w * s;
        }
        if (!(total > 0)) throw non_integrable_error{};
        for (double& x : out.masses) x /= total;
        out.log_total = shift + std::log(total * vol / mc_samples_);
        if (want_bary) out.barycenter = (1.0 / total) * mom;
        return out;
    }
};

/// The two Ding terms and the translation-coercivity functional J.
struct DingValue {
    double total = 0;
    double log_term = 0;    // -(1/m) log int e^{-m phi}
    double energy_term = 0; // (1/V(Q)) sum w_j phi*(q_j)
    double j_value = 0;     // energy_term + sup(phi - phi_Q)
};

/// Evaluates D(phi) against a slope sample, after the convexification pass
/// (intercepts replaced by tight Legendre values, which leaves phi unchanged).
inline DingValue ding_functional(const PiecewiseAffineConvex& phi_in,
                                 const std::vector<Vec>& slopes, const Vec& weights,
                                 double m_homog, double box = 0.0) {
    PiecewiseAffineConvex phi = convexify(phi_in);
    MeasureEngine engine(phi.slopes, m_homog, box);
    if (engine.dim() >= 2 && !(box > 0))
        engine = MeasureEngine(phi.slopes, m_homog, engine.auto_box(phi.intercepts));
    MeasureField field = engine.evaluate(phi);

    DingValue out;
    out.log_term = -(1.0 / m_homog) * field.log_total;
    Vec stars = legendre_many(phi, slopes);
    double v = 0, e = 0;
    for (size_t j = 0; j < slopes.size(); ++j) {
        v += weights[j];
        if (weights[j] > 0) e += weights[j] * stars[j];
    }
    out.energy_term = e / v;
    out.total = out.log_term + out.energy_term;

    // sup(phi - phi_Q) over the envelope structure / a test grid
    PiecewiseAffineConvex support{phi.n, slopes, Vec(slopes.size(), 0.0)};
    double sup = -std::numeric_limits<double>::infinity();
    if (phi.n == 1) {
        Envelope1D env = envelope_1d(phi);
        Envelope1D senv = envelope_1d(support);
        Vec probes = env.breaks;
        for (double s : senv.breaks) probes.push_back(s);
        double far =
            10 * (std::fabs(env.breaks.front()) + std::fabs(env.breaks.back()) + 1);
        probes.push_back(-far);
        probes.push_back(far);
        for (double s : probes)
            sup = std::max(sup, env.value(phi, s) - senv.value(support, s));
    } else {
        double r = box > 0 ? box : engine.auto_box(phi.intercepts);
        int grid = 64;
        Vec s(phi.n);
        std::vector<int> idx(phi.n, 0);
        for (;;) {
            for (int c = 0; c < phi.n; ++c) s[c] = -r + 2 * r * idx[c] / double(grid);
            sup = std::max(sup, phi(s) - support(s));
            int c = 0;
            while (c < phi.n && ++idx[c] > grid) idx[c++] = 0;
            if (c == phi.n) break;
        }
    }
    out.j_value = out.energy_term + sup;
    return out;
}

/// Divergence certificate for a slope sample with nonzero barycenter: D along
/// the translation flow phi_0(s + t a), a = b/|b|, decreases without bound
/// (slope -|b| per unit t in the energy term; the log term is translation
/// invariant).
struct DivergenceCertificate {
    Vec direction;
    Vec ts;
    Vec ding_values;
    double decrease_rate = 0; // fitted decrease per unit t
};

inline DivergenceCertificate detect_unbounded(const SlopeSample& sample, double m_homog,
                                              Vec ts = {0, 5, 10, 20}) {
    double scale = 0;
    for (const auto& q : sample.slopes) scale = std::max(scale, norm2(q));
    if (norm2(sample.barycenter) <= 1e-9 * std::max(1.0, scale))
        throw barycenter_zero_error{};
    Vec a = (1.0 / norm2(sample.barycenter)) * sample.barycenter;

    DivergenceCertificate cert;
    cert.direction = a;
    cert.ts = ts;
    int n = (int)a.size();
    for (double t : ts) {
        PiecewiseAffineConvex phi;
        phi.n = n;
        phi.slopes = sample.slopes;
        phi.intercepts.resize(sample.slopes.size());
        for (size_t j = 0; j < sample.slopes.size(); ++j)
            phi.intercepts[j] = -t * dot(sample.slopes[j], a);
        // box large enough to hold the translated mass
        double box = 0;
        if (n >= 2) {
            MeasureEngine probe(phi.slopes, m_homog);
            box = probe.auto_box(phi.intercepts) + t + 1;
        }
        DingValue d = ding_functional(phi, sample.slopes, sample.weights, m_homog, box);
        cert.ding_values.push_back(d.total);
    }
    double t_span = ts.back() - ts.front();
    cert.decrease_rate = (cert.ding_values.front() - cert.ding_values.back()) / t_span;
    return cert;
}

} // namespace ccy
