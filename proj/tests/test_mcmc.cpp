#include <doctest.h>

#include <cmath>

#include "qfa/diagnostics.hpp"
#include "qfa/distributions.hpp"
#include "qfa/errors.hpp"
#include "qfa/mcmc.hpp"
#include "qfa/sde.hpp"

using namespace qfa;

namespace {

GrowthCurve row_a_curve(std::uint64_t seed, ErrorKind err = ErrorKind::Normal)
{
    const SdeParams truth{{0.15, 3.0, 1e-4}, 0.01, 0.005};
    const auto tr = euler_maruyama_fine(truth, SdeKind::SLGM, uniform_grid(0.0, 6.0, 27), 1e4, seed);
    return observe(tr, err, truth.nu, seed + 1);
}

std::vector<double> log_column(const Chain& c, const std::string& name, double power = 1.0)
{
    auto v = c.column(name);
    for (auto& x : v) x = power * std::log(x);
    return v;
}

}  // namespace

TEST_CASE("LNAA fit recovers K on a simulated curve")
{
    SdeFitOptions o;
    o.kind = ModelKind::LNAA;
    o.schedule = {4000, 4, 1000};
    o.seed = 3;
    const auto c = fit_sde(row_a_curve(10), o);
    CHECK(c.names == std::vector<std::string>{"K", "r", "P", "sigma", "nu"});
    CHECK(c.n_draws() == 1000);
    CHECK(std::abs(c.mean("K") - 0.15) < 3 * c.sd("K") + 1e-3);
    CHECK(std::abs(c.mean("r") - 3.0) < 3 * c.sd("r") + 0.05);
}

TEST_CASE("same seed reproduces the chain")
{
    SdeFitOptions o;
    o.kind = ModelKind::LNAM;
    o.error = ErrorKind::LogNormal;
    o.schedule = {200, 1, 50};
    const auto curve = make_positive(row_a_curve(4));
    CHECK(fit_sde(curve, o).draws == fit_sde(curve, o).draws);
}

TEST_CASE("empty data returns the prior")
{
    const SdePriors pr;
    SdeFitOptions o;
    o.kind = ModelKind::LNAA;
    o.schedule = {2000, 10, 2000};
    o.seed = 5;
    const auto c = fit_sde(GrowthCurve{}, o);
    auto normal_cdf = [](NormalPrior p) {
        return [p](double x) { return norm_cdf((x - p.mean) * std::sqrt(p.prec)); };
    };
    CHECK(ks_test(log_column(c, "K"), normal_cdf(pr.log_K)).pvalue > 0.01);
    CHECK(ks_test(log_column(c, "r"), normal_cdf(pr.log_r)).pvalue > 0.01);
    CHECK(ks_test(log_column(c, "P"), normal_cdf(pr.log_P)).pvalue > 0.01);
    CHECK(ks_test(log_column(c, "nu", -2.0), normal_cdf(pr.log_nu_prec)).pvalue > 0.01);
    const auto sp = pr.log_sigma_prec;
    const double lo = norm_cdf((pr.log_sigma_prec_lower - sp.mean) * std::sqrt(sp.prec));
    const auto trunc = [&](double x) {
        return std::max(0.0, (norm_cdf((x - sp.mean) * std::sqrt(sp.prec)) - lo) / (1 - lo));
    };
    CHECK(ks_test(log_column(c, "sigma", -2.0), trunc).pvalue > 0.01);
}

TEST_CASE("log-normal error requires positive data")
{
    SdeFitOptions o;
    o.kind = ModelKind::RRTR;
    o.error = ErrorKind::LogNormal;
    o.schedule = {10, 1, 10};
    GrowthCurve c{{1, 2}, {0.01, -0.02}};
    CHECK_THROWS_AS(fit_sde(c, o), DomainError);
    o.kind = ModelKind::LNAA;
    CHECK_THROWS_AS(fit_sde(c, o), InvalidParameter);
}

TEST_CASE("exact sampler with fixed noise recovers growth parameters")
{
    ExactFitOptions o;
    o.schedule = {1500, 2, 500};
    o.imputed_per_interval = 5;
    o.seed = 2;
    o.init = SdeParams{{0.15, 3.0, 1e-4}, 0.01, 0.005};
    o.fixed = {"sigma", "nu"};
    const auto curve = row_a_curve(20);
    GrowthCurve sub;
    for (std::size_t i = 0; i < curve.times.size(); i += 3) {
        sub.times.push_back(curve.times[i]);
        sub.values.push_back(curve.values[i]);
    }
    const auto c = fit_sde_exact(sub, o);
    CHECK(c.n_draws() == 500);
    const auto s = c.column("sigma");
    CHECK(s.front() == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(s.back() == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(std::abs(c.mean("K") - 0.15) < 3 * c.sd("K") + 2e-3);
}
