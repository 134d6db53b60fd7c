#include <doctest.h>

#include <cmath>

#include "qfa/errors.hpp"
#include "qfa/growth.hpp"

using namespace qfa;

namespace {

double rk4_logistic(double K, double r, double P, double t, int steps)
{
    auto f = [&](double x) { return r * x * (1.0 - x / K); };
    double x = P;
    const double h = t / steps;
    for (int i = 0; i < steps; ++i) {
        const double k1 = f(x);
        const double k2 = f(x + 0.5 * h * k1);
        const double k3 = f(x + 0.5 * h * k2);
        const double k4 = f(x + h * k3);
        x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return x;
}

}  // namespace

TEST_CASE("closed form agrees with numerical integration")
{
    const double cases[][3] = {{0.15, 3.0, 1e-4}, {0.11, 4.0, 5e-5}, {1.0, 0.5, 0.3}, {2.0, 7.0, 1e-3}};
    for (const auto& c : cases)
        for (double t : {0.1, 1.0, 2.5, 6.0}) {
            const double ref = rk4_logistic(c[0], c[1], c[2], t, 20000);
            CHECK(logistic_solution({c[0], c[1], c[2]}, t) == doctest::Approx(ref).epsilon(1e-9));
        }
}

TEST_CASE("closed form endpoints and large rt")
{
    const LogisticParams p{0.15, 3.0, 1e-4};
    CHECK(logistic_solution(p, 0.0) == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(logistic_solution(p, 200.0) == doctest::Approx(0.15).epsilon(1e-14));
    CHECK(std::isfinite(logistic_solution({0.1, 50.0, 1e-6}, 1000.0)));
    CHECK(logistic_fast(0.15, 3.0, 1e-4, 2.0) == logistic_solution(p, 2.0));
    // Above K the curve decays toward K.
    const double above = logistic_solution({0.1, 2.0, 0.3}, 1.0);
    CHECK(above < 0.3);
    CHECK(above > 0.1);
}

TEST_CASE("invalid parameters are rejected")
{
    CHECK_THROWS_AS(logistic_solution({std::nan(""), 1.0, 0.1}, 1.0), InvalidParameter);
    CHECK_THROWS_AS(logistic_solution({1.0, 1.0, 0.1}, INFINITY), InvalidParameter);
}

TEST_CASE("maximum doubling potential golden value")
{
    const auto f = fitness({1024.0, 2.0, 1.0});
    CHECK(f.mdp == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(std::abs(f.mdp - 10.0) < 1e-12);
    CHECK_FALSE(f.dead);
}

TEST_CASE("maximum doubling rate is the reciprocal doubling time from inoculation")
{
    const LogisticParams p{0.15, 3.0, 1e-4};
    double lo = 0.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (logistic_solution(p, mid) < 2 * p.P ? lo : hi) = mid;
    }
    const auto f = fitness(p);
    CHECK(f.mdr == doctest::Approx(1.0 / lo).epsilon(1e-10));
    CHECK(f.product == doctest::Approx(f.mdr * f.mdp).epsilon(1e-14));
}

TEST_CASE("dead cultures score zero")
{
    auto f = fitness({0.001, 3.0, 0.0005});
    CHECK(f.dead);
    CHECK(f.mdr == 0.0);
    CHECK(f.product == 0.0);
    f = fitness({0.0004, 3.0, 0.0005});
    CHECK(f.dead);
    CHECK(f.mdp == 0.0);
    f = fitness({0.1, 0.0, 1e-4});
    CHECK(f.mdr == 0.0);
    CHECK(f.product == 0.0);
}
