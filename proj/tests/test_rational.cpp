#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ccy/linalg.hpp"
#include "ccy/rational.hpp"

using namespace ccy;

TEST_CASE("arithmetic and normalization") {
    Rational a(2, 4), b(1, 3);
    CHECK(a == Rational(1, 2));
    CHECK((a + b) == Rational(5, 6));
    CHECK((a - b) == Rational(1, 6));
    CHECK((a * b) == Rational(1, 6));
    CHECK((a / b) == Rational(3, 2));
    CHECK(Rational(-3, -6) == Rational(1, 2));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK(Rational(0, 7) == Rational(0));
    CHECK(Rational(7, 3).to_double() == doctest::Approx(7.0 / 3.0));
}

TEST_CASE("ordering") {
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(-1, 3));
    CHECK(Rational(2, 1) > Rational(1));
}

TEST_CASE("parse p/q, integers and decimals") {
    CHECK(Rational::parse("3/4") == Rational(3, 4));
    CHECK(Rational::parse("-6/8") == Rational(-3, 4));
    CHECK(Rational::parse("5") == Rational(5));
    CHECK(Rational::parse("0.25") == Rational(1, 4));
    CHECK(Rational::parse("-1.5") == Rational(-3, 2));
    CHECK_THROWS(Rational::parse(""));
}

TEST_CASE("division by zero and overflow guard") {
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    Rational big(std::numeric_limits<long long>::max() / 2);
    CHECK_THROWS_AS(big * big, std::overflow_error);
}

TEST_CASE("rank, solve, inverse, det") {
    RatMat a = {{Rational(1), Rational(2)}, {Rational(2), Rational(4)}};
    CHECK(rat_rank(a) == 1);
    RatMat b = {{Rational(1), Rational(2)}, {Rational(0), Rational(1)}};
    CHECK(rat_rank(b) == 2);
    CHECK(rat_det(b) == Rational(1));

    // 3x3 solve with a unique rational solution
    RatMat sys = {{Rational(2), Rational(1), Rational(0)},
                  {Rational(1), Rational(3), Rational(1)},
                  {Rational(0), Rational(1), Rational(4)}};
    RatVec rhs = {Rational(1), Rational(2), Rational(3)};
    auto x = rat_solve(sys, rhs);
    REQUIRE(x.has_value());
    for (size_t i = 0; i < 3; ++i) {
        Rational got;
        for (size_t j = 0; j < 3; ++j) got += sys[i][j] * (*x)[j];
        CHECK(got == rhs[i]);
    }

    // inconsistent system
    RatMat bad = {{Rational(1), Rational(1)}, {Rational(2), Rational(2)}};
    CHECK_FALSE(rat_solve(bad, RatVec{Rational(1), Rational(3)}).has_value());

    RatMat inv = rat_inverse(sys);
    for (size_t i = 0; i < 3; ++i)
        for (size_t j = 0; j < 3; ++j) {
            Rational got;
            for (size_t k = 0; k < 3; ++k) got += sys[i][k] * inv[k][j];
            CHECK(got == (i == j ? Rational(1) : Rational(0)));
        }
}

TEST_CASE("primitive representative") {
    RatVec v = {Rational(2, 3), Rational(-4, 3), Rational(2)};
    RatVec p = rat_primitive(v);
    CHECK(p == RatVec{Rational(1), Rational(-2), Rational(3)});
    CHECK(rat_primitive(RatVec{Rational(0), Rational(0)}) ==
          RatVec{Rational(0), Rational(0)});
}
