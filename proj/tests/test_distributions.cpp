#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "qfa/distributions.hpp"
#include "qfa/random.hpp"

using namespace qfa;

TEST_CASE("t3 symmetry is exact")
{
    for (double u : {0.0, 0.1, 0.5, 1.0, 2.5, 10.0, 1e3}) {
        CHECK(std::abs(t3_cdf(-u) - (1.0 - t3_cdf(u))) < 1e-12);
        CHECK(std::abs(t3_logpdf_std(-u) - t3_logpdf_std(u)) < 1e-12);
    }
    CHECK(std::abs(t3_cdf(0.0) - 0.5) < 1e-15);
}

TEST_CASE("t3 matches the library Student t")
{
    boost::math::students_t_distribution<double> t3(3.0);
    for (double u : {-20.0, -2.5, -0.3, 0.0, 0.7, 4.0, 50.0}) {
        CHECK(t3_cdf(u) == doctest::Approx(boost::math::cdf(t3, u)).epsilon(1e-12));
        CHECK(t3_logpdf_std(u) == doctest::Approx(std::log(boost::math::pdf(t3, u))).epsilon(1e-12));
    }
    CHECK(t3_cdf(-2.5) == doctest::Approx(0.04385332350403277).epsilon(1e-12));
}

TEST_CASE("scaled t3 density and positive mass")
{
    boost::math::students_t_distribution<double> t3(3.0);
    const double loc = -0.79421175992029, prec = 0.610871036009521;
    const double s = 1.0 / std::sqrt(prec);
    for (double x : {-3.0, 0.0, 0.4, 2.0})
        CHECK(scaled_t3_logpdf(x, loc, prec) ==
              doctest::Approx(std::log(boost::math::pdf(t3, (x - loc) / s) / s)).epsilon(1e-12));
    for (double l : {-5.0, -0.8, 0.0, 1.0, 6.0})
        CHECK(t3_log_mass_positive(l, prec) ==
              doctest::Approx(std::log(boost::math::cdf(boost::math::complement(t3, -l / s))))
                  .epsilon(1e-10));
    // Deep tail: P(T >= 40) for the standard t3.
    CHECK(t3_log_mass_positive(-40.0, 1.0) ==
          doctest::Approx(std::log(1.719034039457927e-05)).epsilon(1e-6));
}

TEST_CASE("normal log-cdf and truncation masses")
{
    boost::math::normal_distribution<double> n01;
    for (double z : {-30.0, -10.0, -2.0, 0.0, 1.5, 8.0}) {
        const double ref = std::log(boost::math::cdf(n01, z));
        CHECK(norm_logcdf(z) == doctest::Approx(ref).epsilon(1e-9));
    }
    const double z = -40.0;
    const double tail = -0.5 * z * z - std::log(-z) - 0.5 * std::log(2 * M_PI) +
                        std::log1p(-1 / (z * z) + 3 / std::pow(z, 4) - 15 / std::pow(z, 6));
    CHECK(norm_logcdf(z) == doctest::Approx(tail).epsilon(1e-12));
    CHECK(norm_log_mass_below(0.0, 1.0, 4.0) == doctest::Approx(norm_logcdf(-2.0)).epsilon(1e-14));
    CHECK(norm_log_mass_above(1.0, 0.0, 1.0) == doctest::Approx(norm_logcdf(-1.0)).epsilon(1e-14));
    CHECK(norm_logpdf_prec(1.0, 0.0, 4.0) ==
          doctest::Approx(std::log(boost::math::pdf(boost::math::normal_distribution<double>(0, 0.5), 1.0)))
              .epsilon(1e-13));
}

TEST_CASE("gamma density")
{
    boost::math::gamma_distribution<double> g(100.0, 0.01);
    for (double x : {0.5, 1.0, 1.3})
        CHECK(gamma_logpdf(x, 100.0, 0.01) == doctest::Approx(std::log(boost::math::pdf(g, x))).epsilon(1e-11));
}

TEST_CASE("truncated normal draws far from the mean stay inside the support")
{
    Rng rng(3);
    const double mean = -20.0, prec = 3e6;
    double s = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = draw_normal_above(rng, mean, prec, 0.0);
        REQUIRE(x > 0.0);
        s += x;
        const double y = draw_normal_below(rng, -mean, prec, 0.0);
        REQUIRE(y < 0.0);
    }
    // exponential tail with rate |mean| * prec
    CHECK(s / n == doctest::Approx(1.0 / (20.0 * prec)).epsilon(0.03));
}
