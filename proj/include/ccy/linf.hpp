#pragma once

#include <cmath>
#include <vector>

#include "ccy/masolve.hpp"

namespace ccy {

/// Data of the sup-norm estimate: after normalizing sup(phi - phi_P) = 0,
///   sup |phi - phi_P| <= (d(P)/V(P)) int |x| dmu
///                      + C_{n,q} d(P)^{1+n(1-1/q)} / V(P) (int |x|^q dmu)^{1/q}
/// with mu = e^{-m phi} ds. Reported as pass/fail data, never used as a
/// stopping criterion.
struct LinfCertificate {
    double lhs = 0;
    double diameter_d = 0;
    double volume_v = 0;
    double moment1 = 0;
    double momentq = 0;
    double q = 0;
    double c_nq = 0;
    double rhs = 0;
    double normalization_shift = 0;
    bool passes = false;
};

inline LinfCertificate linf_certificate(const MASolution& sol, const Polytope& p, double q,
                                        double c_nq, double m_homog) {
    int n = p.n;
    if (!(q > n)) throw q_too_small_error{};

    LinfCertificate cert;
    cert.q = q;
    cert.c_nq = c_nq;
    cert.diameter_d = p.diameter();
    cert.volume_v = polytope_measure(p);

    PiecewiseAffineConvex support{n, p.vertices, Vec(p.vertices.size(), 0.0)};

    // evaluation window: beyond it the measure is negligible
    MeasureEngine probe(sol.phi.slopes, m_homog);
    double rad = probe.auto_box(sol.phi.intercepts, 40.0) + 2.0;

    // pass 1: sup(phi - phi_P) for the normalization, inf for the lhs
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    int grid = n == 1 ? 200000 : 700;
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
    cert.normalization_shift = sup;
    PiecewiseAffineConvex phi = sol.phi;
    for (double& c : phi.intercepts) c += sup; // phi <- phi - sup
    cert.lhs = sup - inf;

    // pass 2: moments of mu = e^{-m phi} by composite quadrature
    double h, mom1 = 0, momq = 0;
    if (n == 1) {
        Envelope1D env = envelope_1d(phi);
        int steps = 400000;
        h = 2 * rad / steps;
        for (int i = 0; i <= steps; ++i) {
            double x = -rad + i * h;
            double w = (i == 0 || i == steps) ? 0.5 : 1.0;
            double mu = std::exp(-m_homog * env.value(phi, x));
            mom1 += w * std::fabs(x) * mu;
            momq += w * std::pow(std::fabs(x), q) * mu;
        }
        mom1 *= h;
        momq *= h;
    } else {
        int steps = 800;
        h = 2 * rad / steps;
        for (int iy = 0; iy <= steps; ++iy) {
            double y = -rad + iy * h;
            double wy = (iy == 0 || iy == steps) ? 0.5 : 1.0;
            // row envelope over x for speed
            for (int ix = 0; ix <= steps; ++ix) {
                double x = -rad + ix * h;
                double wx = (ix == 0 || ix == steps) ? 0.5 : 1.0;
                Vec pt = {x, y};
                double mu = std::exp(-m_homog * phi(pt));
                double r = norm2(pt);
                mom1 += wx * wy * r * mu;
                momq += wx * wy * std::pow(r, q) * mu;
            }
        }
        mom1 *= h * h;
        momq *= h * h;
    }
    cert.moment1 = mom1;
    cert.momentq = std::pow(momq, 1.0 / q);
    cert.rhs = cert.diameter_d / cert.volume_v * cert.moment1 +
               c_nq * std::pow(cert.diameter_d, 1.0 + n * (1.0 - 1.0 / q)) / cert.volume_v *
                   cert.momentq;
    cert.passes = cert.lhs <= cert.rhs;
    return cert;
}

} // namespace ccy
