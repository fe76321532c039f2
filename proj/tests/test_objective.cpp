#include <doctest.h>

#include <cmath>

#include "nagd/objective.hpp"
#include "nagd/random.hpp"

using namespace nagd;

TEST_CASE("q") {
    const Evaluation a = eval_q({1, 1});
    CHECK(a.value == 8.5);
    CHECK(a.gradient == ParamVector{16, 1});
    const Evaluation b = eval_q({0, 0});
    CHECK(b.value == 0.0);
    CHECK(b.gradient == ParamVector{0, 0});
    const Evaluation c = eval_q({0, 1});
    CHECK(c.value == 0.5);
    CHECK(c.gradient == ParamVector{0, 1});
}

TEST_CASE("rosenbrock") {
    const Evaluation a = eval_rosenbrock({1, 1});
    CHECK(a.value == 0.0);
    CHECK(a.gradient == ParamVector{0, 0});
    const Evaluation b = eval_rosenbrock({-3, -4});
    CHECK(b.value == 16916.0);
    CHECK(b.gradient == ParamVector{-15608, -2600});
    const Evaluation c = eval_rosenbrock({0, 0});
    CHECK(c.value == 1.0);
    CHECK(c.gradient == ParamVector{-2, 0});
}

TEST_CASE("evaluate checks the dimension") {
    CHECK_THROWS_AS(make_quadratic().evaluate({1, 2, 3}), ContractViolation);
    CHECK_THROWS_AS(objective_by_name("himmelblau"), ContractViolation);
    CHECK(objective_by_name("r").value({-3, -4}) == 16916.0);
    CHECK(objective_by_name("quadratic").value({1, 1}) == 8.5);
}

TEST_CASE("scaled") {
    const Objective q = make_quadratic();
    const Objective q1 = scaled(q, 1.0);
    const Objective q10 = scaled(q, 10.0);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        const ParamVector p{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        CHECK(q1.evaluate(p).value == q.evaluate(p).value);
        CHECK(q1.evaluate(p).gradient == q.evaluate(p).gradient);
    }
    const Evaluation e = q10.evaluate({1, 1});
    CHECK(e.value == 85.0);
    CHECK(e.gradient == ParamVector{160, 10});
    const Evaluation r = scaled(make_rosenbrock(), 2.0).evaluate({1, 1});
    CHECK(r.value == 0.0);
    CHECK(r.gradient == ParamVector{0, 0});
    CHECK(scaled(Objective("shifted", 2, eval_q, 3.0), 4.0).lower_bound() == 12.0);
    CHECK_THROWS_AS(scaled(q, 0.0), ContractViolation);
    CHECK_THROWS_AS(scaled(q, -1.0), ContractViolation);
}

TEST_CASE("finite differences") {
    const ParamVector fq = finite_diff_grad(make_quadratic(), {1, 1}, 1e-6);
    CHECK(fq[0] == doctest::Approx(16).epsilon(1e-6));
    CHECK(fq[1] == doctest::Approx(1).epsilon(1e-6));
    const ParamVector fr = finite_diff_grad(make_rosenbrock(), {-3, -4}, 1e-6);
    CHECK(fr[0] == doctest::Approx(-15608).epsilon(1e-6));
    CHECK(fr[1] == doctest::Approx(-2600).epsilon(1e-6));
    const ParamVector f0 = finite_diff_grad(make_quadratic(), {0, 0}, 1e-6);
    CHECK(std::fabs(f0[0]) <= 1e-9);
    CHECK(std::fabs(f0[1]) <= 1e-9);
}

TEST_CASE("analytic gradients agree with finite differences at random points") {
    Rng rng(2024);
    for (const Objective& obj : {make_quadratic(), make_rosenbrock()}) {
        for (int i = 0; i < 100; ++i) {
            const ParamVector p{rng.uniform(-2, 2), rng.uniform(-2, 2)};
            const ParamVector g = obj.evaluate(p).gradient;
            const ParamVector fd = finite_diff_grad(obj, p, 1e-6);
            for (std::size_t k = 0; k < 2; ++k) {
                CHECK(std::fabs(fd[k] - g[k]) <= 1e-6 * std::max(1.0, std::fabs(g[k])));
            }
        }
    }
}
