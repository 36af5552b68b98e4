#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "mfl/errors.hpp"
#include "mfl/torus.hpp"

using mfl::TorusPoint;

TEST_CASE("wrap_coord reduces into [0,1)") {
    CHECK(TorusPoint::wrap_coord(0.0) == 0.0);
    CHECK(TorusPoint::wrap_coord(1.0) == 0.0);
    CHECK(TorusPoint::wrap_coord(1.25) == doctest::Approx(0.25));
    CHECK(TorusPoint::wrap_coord(-0.25) == doctest::Approx(0.75));
    CHECK(TorusPoint::wrap_coord(42.5) == doctest::Approx(0.5));
    // floor rounding of tiny negatives must not land on 1.0
    const double y = TorusPoint::wrap_coord(-1e-18);
    CHECK(y >= 0.0);
    CHECK(y < 1.0);
}

TEST_CASE("wrap_diff is the minimal-image representative in [-1/2, 1/2)") {
    CHECK(TorusPoint::wrap_diff(0.3) == doctest::Approx(0.3));
    CHECK(TorusPoint::wrap_diff(0.75) == doctest::Approx(-0.25));
    CHECK(TorusPoint::wrap_diff(-0.75) == doctest::Approx(0.25));
    CHECK(TorusPoint::wrap_diff(0.5) == doctest::Approx(-0.5));
    CHECK(TorusPoint::wrap_diff(-0.5) == doctest::Approx(-0.5));
    CHECK(TorusPoint::wrap_diff(3.1) == doctest::Approx(0.1));
    for (double x : {-2.4, -0.9, -0.2, 0.0, 0.2, 0.49, 0.51, 1.7}) {
        const double d = TorusPoint::wrap_diff(x);
        CHECK(d >= -0.5);
        CHECK(d < 0.5);
    }
}

TEST_CASE("wrap constructs points with wrapped coordinates") {
    const TorusPoint p = TorusPoint::wrap({1.5, -0.25});
    CHECK(p.dim() == 2);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.75));
    CHECK(p.data()[0] == p[0]);

    CHECK_THROWS_AS(TorusPoint::wrap({0.1, 0.2, 0.3}), mfl::ConfigError);
    const double bad[1] = {std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(TorusPoint::wrap(bad, 1), mfl::ConfigError);
}

TEST_CASE("displacement is antisymmetric and vanishes on the diagonal") {
    const TorusPoint a = TorusPoint::wrap({0.1, 0.8});
    const TorusPoint b = TorusPoint::wrap({0.9, 0.35});
    const auto dab = mfl::displacement(a, b);
    const auto dba = mfl::displacement(b, a);
    CHECK(dab[0] == doctest::Approx(0.2));   // 0.1 - 0.9 wraps to +0.2
    CHECK(dab[1] == doctest::Approx(0.45));
    CHECK(dab[0] == doctest::Approx(-dba[0]));
    CHECK(dab[1] == doctest::Approx(-dba[1]));
    const auto daa = mfl::displacement(a, a);
    CHECK(daa[0] == 0.0);
    CHECK(daa[1] == 0.0);

    const TorusPoint c = TorusPoint::wrap({0.5});
    CHECK_THROWS_AS(mfl::displacement(a, c), mfl::ConfigError);
}
