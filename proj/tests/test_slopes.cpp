#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ccy/certify.hpp"
#include "ccy/pwa.hpp"
#include "ccy/slopes.hpp"

using namespace ccy;

TEST_CASE("interval sampling matches the hand example") {
    Polytope q{1, {{-1.0}, {1.0}}};
    auto s = sample_slopes(q, 4);
    REQUIRE(s.positive_count == 4);
    CHECK(s.slopes[0][0] == doctest::Approx(-0.75));
    CHECK(s.slopes[1][0] == doctest::Approx(-0.25));
    CHECK(s.slopes[2][0] == doctest::Approx(0.25));
    CHECK(s.slopes[3][0] == doctest::Approx(0.75));
    for (int j = 0; j < 4; ++j) CHECK(s.weights[j] == doctest::Approx(0.5));
    REQUIRE(s.slopes.size() == 6); // + the two endpoints at weight zero
    CHECK(s.weights[4] == 0.0);
    CHECK(s.weights[5] == 0.0);
    CHECK(s.v_q == doctest::Approx(2.0));
    CHECK(std::fabs(s.barycenter[0]) <= 1e-12);
}

TEST_CASE("weights sum to the polygon area on random polygons") {
    Rng rng(123);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Vec> pts;
        for (int i = 0; i < 9; ++i) pts.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2)});
        auto hull = hull_ccw(pts);
        if (hull.size() < 3) continue;
        // recenter at the centroid so the barycenter check passes
        Vec c = polygon_centroid(hull);
        for (auto& p : hull) p = p - c;
        Polytope q{2, hull};
        auto s = sample_slopes(q, 24);
        CHECK(std::fabs(s.v_q - polygon_area(hull_ccw(q.vertices))) <= 1e-10);
        CHECK(norm2(s.barycenter) <= 1e-9);
        for (const auto& slope : s.slopes) {
            CHECK(detail::point_in_hull_2d(hull_ccw(q.vertices), slope, 1e-9));
        }
    }
}

TEST_CASE("nonzero barycenter rejected unless forced") {
    Polytope q{1, {{-0.7}, {1.3}}}; // barycenter 0.3
    CHECK_THROWS_AS(sample_slopes(q, 8), barycenter_not_zero_error);
    auto s = sample_slopes(q, 8, /*force=*/true);
    CHECK_FALSE(s.barycenter_zero);
    CHECK(s.barycenter[0] == doctest::Approx(0.3));
}

TEST_CASE("triangle sampling covers the area") {
    // equilateral-ish triangle centered at 0
    Polytope q{2, {{1.0, 0.0}, {-0.5, 0.8660254037844386}, {-0.5, -0.8660254037844386}}};
    auto s = sample_slopes(q, 32);
    double area = polygon_area(hull_ccw(q.vertices));
    CHECK(std::fabs(s.v_q - area) <= 1e-10);
    CHECK(s.positive_count > 500);
    // zero-weight vertex slopes close the hull
    CHECK(s.slopes.size() == size_t(s.positive_count) + 3);
}
