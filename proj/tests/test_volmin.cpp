#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ccy/certify.hpp"
#include "ccy/volmin.hpp"

using namespace ccy;

namespace {

std::vector<RatVec> irays(const std::vector<std::vector<long long>>& rows) {
    std::vector<RatVec> out;
    for (const auto& r : rows) {
        RatVec v;
        for (long long x : r) v.push_back(Rational(x));
        out.push_back(v);
    }
    return out;
}

ProperCone quadrant(int m) {
    std::vector<std::vector<long long>> rows(m, std::vector<long long>(m, 0));
    for (int i = 0; i < m; ++i) rows[i][i] = 1;
    return validate_cone(irays(rows));
}

ProperCone conifold() {
    return validate_cone(irays({{1, 0, 0}, {0, 1, 0}, {-1, 0, 1}, {0, -1, 1}}));
}

/// Multilevel grid search for the volume minimizer on the slice <l, xi> = m.
/// Independent of the Newton path; deterministic triangulated volumes.
Vec grid_search_minimizer(const ProperCone& cone, const GorensteinVector& gor,
                          double final_step) {
    Vec l = to_double(gor.l);
    auto slice = orthonormal_perp_basis(l);
    int n = (int)slice.size();
    Vec center(cone.dim, 0.0);
    for (const auto& r : cone.primal_rays) center = center + to_double(r);
    center = normalize_reeb(cone, gor, center).xi;

    auto value = [&](const Vec& y) {
        Vec xi = center;
        for (int i = 0; i < n; ++i) xi = xi + y[i] * slice[i];
        if (!is_interior_reeb(cone, xi, 1e-12)) return std::numeric_limits<double>::infinity();
        return volume(cone, xi).v_vol;
    };

    Vec best(n, 0.0);
    double radius = 4.0;
    for (double step = 0.5; step >= final_step / 2; step /= 10) {
        Vec local = best;
        double fbest = value(best);
        std::function<void(int, Vec&)> sweep = [&](int d, Vec& y) {
            if (d == n) {
                double f = value(y);
                if (f < fbest) {
                    fbest = f;
                    local = y;
                }
                return;
            }
            for (double dy = -radius; dy <= radius + 1e-12; dy += step) {
                y[d] = best[d] + dy;
                sweep(d + 1, y);
            }
            y[d] = best[d];
        };
        Vec y = best;
        sweep(0, y);
        best = local;
        radius = 2.5 * step;
    }
    Vec xi = center;
    for (int i = 0; i < n; ++i) xi = xi + best[i] * slice[i];
    return xi;
}

} // namespace

TEST_CASE("quadrant minimizers are the all-ones vector") {
    for (int m : {2, 3}) {
        auto cone = quadrant(m);
        auto g = gorenstein_vector(cone);
        auto res = minimize_volume(cone, g);
        CHECK(res.converged);
        for (int i = 0; i < m; ++i) CHECK(std::fabs(res.xi_star.xi[i] - 1.0) <= 1e-8);
        CHECK(res.barycenter_residual <= 1e-9);
        CHECK(std::fabs(dot(res.xi_star.xi, to_double(g.l)) - m) <= 1e-10);
    }
}

TEST_CASE("conifold minimizer (0, 0, 3/2) against the grid oracle") {
    auto cone = conifold();
    auto g = gorenstein_vector(cone);
    auto res = minimize_volume(cone, g);
    CHECK(res.converged);
    CHECK(res.barycenter_residual <= 1e-9);
    CHECK(std::fabs(res.xi_star.xi[0] - 0.0) <= 1e-8);
    CHECK(std::fabs(res.xi_star.xi[1] - 0.0) <= 1e-8);
    CHECK(std::fabs(res.xi_star.xi[2] - 1.5) <= 1e-8);
    CHECK(volume(cone, res.xi_star.xi).v_vol == doctest::Approx(8.0 / 81).epsilon(1e-10));

    Vec oracle = grid_search_minimizer(cone, g, 1e-3);
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(res.xi_star.xi[i] - oracle[i]) <= 1e-4);
}

TEST_CASE("c3z2 minimizer is (1, 2, 2), symmetric under the exchange involution") {
    auto cone = validate_cone(irays({{1, 0, 0}, {0, 1, 0}, {0, 1, 2}}));
    auto g = gorenstein_vector(cone);
    auto res = minimize_volume(cone, g);
    CHECK(res.converged);
    CHECK(std::fabs(res.xi_star.xi[0] - 1.0) <= 1e-8);
    CHECK(std::fabs(res.xi_star.xi[1] - 2.0) <= 1e-8);
    CHECK(std::fabs(res.xi_star.xi[2] - 2.0) <= 1e-8);
    // z2 <-> z3 exchange acts as xi -> (x1, x2, 2 x2 - x3); fixed locus x3 = x2
    CHECK(std::fabs(res.xi_star.xi[2] - res.xi_star.xi[1]) <= 1e-8);
    Vec oracle = grid_search_minimizer(cone, g, 1e-3);
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(res.xi_star.xi[i] - oracle[i]) <= 1e-4);
}

TEST_CASE("normalization identities at the minimizer") {
    auto cone = conifold();
    auto g = gorenstein_vector(cone);
    auto res = minimize_volume(cone, g);
    auto sm = measure_barycenter_moments(cross_section(cone, res.xi_star.xi));
    CHECK(dot(res.xi_star.xi, sm.barycenter) == doctest::Approx(1.0).epsilon(1e-10));
    Vec l3 = (1.0 / 3) * to_double(g.l);
    CHECK(norm_inf(sm.barycenter - l3) <= 1e-9);
}

TEST_CASE("basin covers near-boundary starts") {
    auto cone = conifold();
    auto g = gorenstein_vector(cone);
    auto res0 = minimize_volume(cone, g);

    MinimizeOptions opt;
    opt.init = {0.93, 0.01, 0.05}; // close to the facet x2 = 0
    REQUIRE(is_interior_reeb(cone, opt.init));
    auto res1 = minimize_volume(cone, g, opt);
    CHECK(res1.converged);
    CHECK(norm_inf(res0.xi_star.xi - res1.xi_star.xi) <= 1e-8);

    opt.init = {-0.49, -0.49, 1.0}; // near the opposite corner of the Reeb cone
    REQUIRE(is_interior_reeb(cone, opt.init));
    auto res2 = minimize_volume(cone, g, opt);
    CHECK(res2.converged);
    CHECK(norm_inf(res0.xi_star.xi - res2.xi_star.xi) <= 1e-8);
}
