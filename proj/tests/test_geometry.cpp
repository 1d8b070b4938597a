#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "exolink/geometry.hpp"

using namespace exo;

TEST_CASE("vector arithmetic") {
    Vec2 a{3.0, 4.0}, b{-1.0, 2.0};
    CHECK((a + b).x == doctest::Approx(2.0));
    CHECK((a + b).y == doctest::Approx(6.0));
    CHECK((a - b).x == doctest::Approx(4.0));
    CHECK((a * 2.0).y == doctest::Approx(8.0));
    CHECK((2.0 * a).x == doctest::Approx(6.0));
    Vec2 c = a;
    c += b;
    CHECK(c.x == doctest::Approx(2.0));
    CHECK(dot(a, b) == doctest::Approx(5.0));
    CHECK(norm(a) == doctest::Approx(5.0));  // 3-4-5
}

TEST_CASE("unit direction and its derivative") {
    for (double t : {0.0, 0.7, -2.1, kPi, 5.9}) {
        Vec2 u = dir(t);
        CHECK(norm(u) == doctest::Approx(1.0).epsilon(1e-14));
        // dirdot is the exact angular derivative of dir
        const double h = 1e-7;
        Vec2 fd = (dir(t + h) - dir(t - h)) * (1.0 / (2.0 * h));
        Vec2 an = dirdot(t);
        CHECK(an.x == doctest::Approx(fd.x).epsilon(1e-6));
        CHECK(an.y == doctest::Approx(fd.y).epsilon(1e-6));
        // dirdot = dir rotated +90 deg
        CHECK(an.x == doctest::Approx(-u.y).epsilon(1e-14));
        CHECK(an.y == doctest::Approx(u.x).epsilon(1e-14));
    }
}

TEST_CASE("degree/radian conversion round-trips") {
    CHECK(deg2rad(180.0) == doctest::Approx(kPi));
    CHECK(rad2deg(kPi / 2.0) == doctest::Approx(90.0));
    for (double d : {0.0, 33.25, -80.0, 90.0})
        CHECK(rad2deg(deg2rad(d)) == doctest::Approx(d).epsilon(1e-14));
}
