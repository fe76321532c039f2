#include <doctest.h>

#include <cmath>
#include <limits>

#include "nagd/numvec.hpp"
#include "nagd/random.hpp"

using namespace nagd;

TEST_CASE("dot") {
    CHECK(dot({16, 1}, {16, 1}) == 257.0);
    CHECK(dot({0, 0}, {3.5, -2}) == 0.0);
    CHECK(dot({1}, {1}) == 1.0);
    CHECK_THROWS_AS(dot({1, 2}, {1}), ContractViolation);
}

TEST_CASE("dot is symmetric") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(50);
        ParamVector a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.uniform(-1e3, 1e3);
            b[i] = rng.uniform(-1e3, 1e3);
        }
        CHECK(dot(a, b) == dot(b, a));
    }
}

TEST_CASE("axpy") {
    CHECK(axpy(-0.1, {16, 1}, {1, 1}) == ParamVector{1 - 1.6, 0.9});
    CHECK(axpy(-0.1, {16, 1}, {1, 1})[0] == doctest::Approx(-0.6));
    const ParamVector x{3, 4}, y{-1, 7};
    CHECK(axpy(0.0, x, y) == y);
    CHECK(axpy(1.0, {1, 2}, {0, 0}) == ParamVector{1, 2});
    CHECK(x == ParamVector{3, 4});
    CHECK_THROWS_AS(axpy(1.0, {1, 2}, {0}), ContractViolation);
}

TEST_CASE("norms") {
    CHECK(norm_sq({16, 1}) == 257.0);
    CHECK(norm_sq(ParamVector(7)) == 0.0);
    CHECK(norm_sq({3, 4}) == 25.0);
    CHECK(norm({3, 4}) == 5.0);
}

TEST_CASE("scale and bounds") {
    CHECK(scale(2.0, {1, -3}) == ParamVector{2, -6});
    CHECK(all_finite_within({1, -1e8}, 1e8));
    CHECK_FALSE(all_finite_within({1, -1.5e8}, 1e8));
    CHECK_FALSE(all_finite_within({std::numeric_limits<double>::quiet_NaN()}, 1e8));
    CHECK_FALSE(all_finite_within({std::numeric_limits<double>::infinity()}, 1e300));
}
