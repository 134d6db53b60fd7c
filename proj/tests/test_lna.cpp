#include <doctest.h>

#include <cmath>
#include <functional>

#include "qfa/errors.hpp"
#include "qfa/growth.hpp"
#include "qfa/lna.hpp"

using namespace qfa;

namespace {

struct OdeMoments {
    double v_prev, v, B, E;
};

// Integrates skeleton, propagator and variance of a linearised SDE with RK4.
OdeMoments integrate(std::function<double(double)> drift, std::function<double(double)> dfdx,
                     std::function<double(double)> diff, double v0, double tp, double t, int steps)
{
    auto skeleton = [&](double from, double x, double to, int n) {
        const double h = (to - from) / n;
        for (int i = 0; i < n; ++i) {
            const double k1 = drift(x), k2 = drift(x + 0.5 * h * k1), k3 = drift(x + 0.5 * h * k2),
                         k4 = drift(x + h * k3);
            x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        return x;
    };
    const double vp = tp > 0 ? skeleton(0.0, v0, tp, steps) : v0;
    // state: v, B, E
    double y[3] = {vp, 1.0, 0.0};
    auto rhs = [&](const double* s, double* d) {
        const double f = dfdx(s[0]);
        const double g = diff(s[0]);
        d[0] = drift(s[0]);
        d[1] = f * s[1];
        d[2] = 2 * f * s[2] + g * g;
    };
    const double h = (t - tp) / steps;
    for (int i = 0; i < steps; ++i) {
        double k1[3], k2[3], k3[3], k4[3], tmp[3];
        rhs(y, k1);
        for (int j = 0; j < 3; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        rhs(tmp, k2);
        for (int j = 0; j < 3; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        rhs(tmp, k3);
        for (int j = 0; j < 3; ++j) tmp[j] = y[j] + h * k3[j];
        rhs(tmp, k4);
        for (int j = 0; j < 3; ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    }
    return {vp, y[0], y[1], y[2]};
}

double abp_form_lnam_variance(double a, double b, double P, double sigma, double Tp, double T)
{
    const double num = b * b * P * P * (std::exp(2 * a * T) - std::exp(2 * a * Tp)) +
                       4 * b * P * (a - b * P) * (std::exp(a * T) - std::exp(a * Tp)) +
                       2 * a * (T - Tp) * (a - b * P) * (a - b * P);
    const double den = 2 * a * std::pow(b * P * (std::exp(a * T) - 1) + a, 2);
    return sigma * sigma * num / den;
}

const SdeParams kCases[] = {
    {{0.15, 3.0, 1e-4}, 0.01, 0.005},
    {{0.11, 4.0, 5e-5}, 0.05, 0.0},
    {{0.8, 1.2, 0.05}, 0.2, 0.0},
    {{0.3, 6.0, 1e-3}, 0.5, 0.0},
};

}  // namespace

TEST_CASE("LNAM variance matches the (a, b, P) closed form")
{
    for (const auto& p : kCases) {
        const double a = p.growth.r - 0.5 * p.sigma * p.sigma, b = p.growth.r / p.growth.K;
        for (auto [tp, t] : {std::pair{0.0, 0.3}, {1.0, 1.5}, {2.2, 4.0}, {5.0, 6.0}}) {
            const auto m = transition_coeffs(ModelKind::LNAM, p, tp, t);
            CHECK(m.variance ==
                  doctest::Approx(abp_form_lnam_variance(a, b, p.growth.P, p.sigma, tp, t))
                      .epsilon(1e-9));
        }
    }
}

TEST_CASE("LNAM moments match the variance ODE")
{
    for (const auto& p : kCases) {
        const double a = p.growth.r - 0.5 * p.sigma * p.sigma, b = p.growth.r / p.growth.K;
        for (auto [tp, t] : {std::pair{0.0, 0.5}, {1.0, 2.0}, {3.0, 6.0}}) {
            const auto o = integrate([&](double v) { return a - b * std::exp(v); },
                                     [&](double v) { return -b * std::exp(v); },
                                     [&](double) { return p.sigma; }, std::log(p.growth.P), tp, t,
                                     40000);
            const auto m = transition(ModelKind::LNAM, p, o.v_prev + 0.03, tp, t);
            CHECK(m.B == doctest::Approx(o.B).epsilon(1e-7));
            CHECK(m.variance == doctest::Approx(o.E).epsilon(1e-7));
            CHECK(m.mean == doctest::Approx(o.v + o.B * 0.03).epsilon(1e-7));
        }
    }
}

TEST_CASE("LNAA moments match the variance ODE")
{
    for (const auto& p : kCases) {
        const double r = p.growth.r, K = p.growth.K;
        for (auto [tp, t] : {std::pair{0.0, 0.5}, {1.0, 2.0}, {3.0, 6.0}}) {
            const auto o = integrate([&](double x) { return r * x * (1 - x / K); },
                                     [&](double x) { return r * (1 - 2 * x / K); },
                                     [&](double x) { return p.sigma * x; }, p.growth.P, tp, t,
                                     40000);
            const double shift = 0.1 * o.v_prev;
            const auto m = transition(ModelKind::LNAA, p, o.v_prev + shift, tp, t);
            CHECK(m.B == doctest::Approx(o.B).epsilon(1e-7));
            CHECK(m.variance == doctest::Approx(o.E).epsilon(1e-7));
            CHECK(m.mean == doctest::Approx(o.v + o.B * shift).epsilon(1e-7));
        }
    }
}

TEST_CASE("RRTR transition is a random walk on the log-ratio")
{
    for (const auto& p : kCases)
        for (auto [tp, t] : {std::pair{0.0, 0.5}, {1.0, 2.0}, {3.0, 6.0}}) {
            const double ratio =
                std::log(logistic_solution(p.growth, t) / logistic_solution(p.growth, tp));
            const double dt = t - tp;
            const auto m = transition(ModelKind::RRTR, p, -4.0, tp, t);
            CHECK(m.B == 1.0);
            CHECK(m.mean == doctest::Approx(-4.0 + ratio - 0.5 * p.sigma * p.sigma * dt).epsilon(1e-10));
            CHECK(m.variance == doctest::Approx(p.sigma * p.sigma * dt).epsilon(1e-12));
        }
}

TEST_CASE("skeletons")
{
    const SdeParams p = kCases[0];
    for (double t : {0.0, 1.0, 3.0, 6.0}) {
        CHECK(det_skeleton(ModelKind::LNAA, p, t) ==
              doctest::Approx(logistic_solution(p.growth, t)).epsilon(1e-12));
        CHECK(det_skeleton(ModelKind::RRTR, p, t) ==
              doctest::Approx(std::log(logistic_solution(p.growth, t))).epsilon(1e-12));
    }
}

TEST_CASE("zero-length steps and invalid regimes")
{
    const SdeParams p = kCases[1];
    for (auto k : {ModelKind::RRTR, ModelKind::LNAM, ModelKind::LNAA}) {
        const auto m = transition(k, p, 0.07, 2.0, 2.0);
        CHECK(m.mean == doctest::Approx(0.07));
        CHECK(m.variance == 0.0);
    }
    SdeParams bad{{0.1, 0.01, 1e-4}, 1.0, 0.0};
    CHECK_THROWS_AS(transition_coeffs(ModelKind::LNAM, bad, 0.0, 1.0), InvalidRegime);
    CHECK(parse_model_kind(to_string(ModelKind::LNAM)) == ModelKind::LNAM);
    CHECK(log_scale(ModelKind::RRTR));
    CHECK_FALSE(log_scale(ModelKind::LNAA));
}

TEST_CASE("approximate paths start on the skeleton")
{
    const SdeParams p = kCases[1];
    for (auto k : {ModelKind::RRTR, ModelKind::LNAM, ModelKind::LNAA}) {
        const auto tr = simulate_approx(k, p, {0.0, 1.0, 2.0, 6.0}, 9);
        CHECK(tr.values.size() == 4);
        CHECK(tr.values[0] == doctest::Approx(p.growth.P).epsilon(1e-9));
        for (double v : tr.values) CHECK(std::isfinite(v));
    }
}
