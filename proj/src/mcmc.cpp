#include "qfa/mcmc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qfa/distributions.hpp"
#include "qfa/errors.hpp"
#include "qfa/kalman.hpp"
#include "qfa/random.hpp"

namespace qfa {

Schedule desk_sde_schedule() { return {50000, 50, 1000}; }
Schedule paper_sde_schedule() { return {600000, 4000, 1000}; }

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum Coord { kK = 0, kR, kP, kSig, kNu, kNumCoords };
const std::array<const char*, kNumCoords> kCoordNames{"log_K", "log_r", "log_P",
                                                      "log_sigma_prec", "log_nu_prec"};

struct Theta {
    std::array<double, kNumCoords> v{};
    SdeParams params() const
    {
        SdeParams p;
        p.growth = {std::exp(v[kK]), std::exp(v[kR]), std::exp(v[kP])};
        p.sigma = std::exp(-0.5 * v[kSig]);
        p.nu = std::exp(-0.5 * v[kNu]);
        return p;
    }
};

double log_prior(const SdePriors& pr, int c, double x)
{
    switch (c) {
    case kK: return norm_logpdf_prec(x, pr.log_K.mean, pr.log_K.prec);
    case kR: return norm_logpdf_prec(x, pr.log_r.mean, pr.log_r.prec);
    case kP: return norm_logpdf_prec(x, pr.log_P.mean, pr.log_P.prec);
    case kSig:
        if (x < pr.log_sigma_prec_lower) return kNegInf;
        return norm_logpdf_prec(x, pr.log_sigma_prec.mean, pr.log_sigma_prec.prec);
    case kNu: return norm_logpdf_prec(x, pr.log_nu_prec.mean, pr.log_nu_prec.prec);
    }
    return kNegInf;
}

Theta initial_theta(const GrowthCurve& curve, const SdePriors& pr,
                    const std::optional<SdeParams>& init)
{
    Theta th;
    if (init) {
        th.v[kK] = std::log(init->growth.K);
        th.v[kR] = std::log(init->growth.r);
        th.v[kP] = std::log(init->growth.P);
        th.v[kSig] = -2.0 * std::log(init->sigma);
        th.v[kNu] = -2.0 * std::log(init->nu);
    } else {
        double ymax = 0.0;
        for (double y : curve.values)
            if (std::isfinite(y)) ymax = std::max(ymax, y);
        th.v[kK] = ymax > 0 ? std::log(ymax) : pr.log_K.mean;
        th.v[kR] = pr.log_r.mean;
        th.v[kP] = pr.log_P.mean;
        th.v[kSig] = std::max(pr.log_sigma_prec.mean, pr.log_sigma_prec_lower + 0.5);
        th.v[kNu] = pr.log_nu_prec.mean;
    }
    if (th.v[kSig] < pr.log_sigma_prec_lower)
        throw InvalidParameter("initial sigma violates the truncation of log sigma^-2");
    for (double v : th.v)
        if (!std::isfinite(v)) throw InvalidParameter("non-finite initial parameter");
    return th;
}

void check_schedule(const Schedule& s)
{
    if (s.thin == 0 || s.samples == 0) throw InvalidParameter("schedule: thin and samples > 0");
}

void check_curve(const GrowthCurve& curve)
{
    if (curve.times.size() != curve.values.size())
        throw DataError("growth curve: times and values differ in length");
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        if (!std::isfinite(curve.values[i]) || !std::isfinite(curve.times[i]) ||
            curve.times[i] < 0)
            throw DataError("growth curve: invalid entry at index " + std::to_string(i));
        if (i > 0 && !(curve.times[i] > curve.times[i - 1]))
            throw DataError("growth curve: times not strictly increasing at index " +
                            std::to_string(i));
    }
}

void check_positive(const GrowthCurve& curve)
{
    for (std::size_t i = 0; i < curve.values.size(); ++i)
        if (!(curve.values[i] > 0))
            throw DomainError("non-positive observation at index " + std::to_string(i) +
                                  " under log-normal error",
                              i);
}

[[noreturn]] void stuck(const char* coord, const RwScale& s, const Theta& th)
{
    std::ostringstream os;
    os << "stuck chain: " << s.rejects_in_row << " consecutive rejections on " << coord
       << " (proposal sd " << s.sd << ", acceptance " << s.rate() << "); state";
    for (int c = 0; c < kNumCoords; ++c) os << ' ' << kCoordNames[c] << '=' << th.v[c];
    throw StuckChain(os.str());
}

std::vector<std::string> sde_names() { return {"K", "r", "P", "sigma", "nu"}; }

std::vector<double> sde_row(const Theta& th)
{
    const auto p = th.params();
    return {p.growth.K, p.growth.r, p.growth.P, p.sigma, p.nu};
}

}  // namespace

Chain fit_sde(const GrowthCurve& curve, const SdeFitOptions& opts)
{
    check_schedule(opts.schedule);
    check_curve(curve);
    if (opts.error != natural_error(opts.kind))
        throw InvalidParameter(to_string(opts.kind) + " requires " +
                               to_string(natural_error(opts.kind)) + " measurement error");
    if (opts.error == ErrorKind::LogNormal) check_positive(curve);

    Rng rng(opts.seed);
    Theta th = initial_theta(curve, opts.priors, opts.init);

    auto loglik = [&](const Theta& t) {
        StateSpaceSpec spec{opts.kind, opts.error, t.params()};
        try {
            const double l = marginal_loglik(spec, curve);
            return std::isnan(l) ? kNegInf : l;
        } catch (const NumericError&) {
            return kNegInf;
        }
    };

    std::array<RwScale, kNumCoords> scale;
    const std::array<double, kNumCoords> sd0{0.05, 0.05, 0.2, 0.5, 0.3};
    for (int c = 0; c < kNumCoords; ++c) scale[c].sd = sd0[c];

    double ll = loglik(th);
    if (!std::isfinite(ll)) throw NumericError("fit_sde: initial state has zero likelihood");

    auto update = [&](int c, bool adapting) {
        Theta prop = th;
        prop.v[c] += scale[c].sd * rng.normal();
        const double lp_new = log_prior(opts.priors, c, prop.v[c]);
        bool acc = false;
        if (std::isfinite(lp_new)) {
            const double ll_new = loglik(prop);
            const double ratio = ll_new + lp_new - ll - log_prior(opts.priors, c, th.v[c]);
            if (std::isfinite(ll_new) && mh_accept(rng, ratio)) {
                th = prop;
                ll = ll_new;
                acc = true;
            }
        }
        scale[c].record(acc);
        if (scale[c].rejects_in_row >= opts.adapt.stuck_limit) stuck(kCoordNames[c], scale[c], th);
        if (adapting && scale[c].window_tries >= opts.adapt.window)
            scale[c].adapt(opts.adapt.low, opts.adapt.high);
    };

    Chain chain;
    chain.names = sde_names();
    chain.burn_in = opts.schedule.burn_in;
    chain.thin = opts.schedule.thin;
    chain.seed = opts.seed;
    const std::size_t total = opts.schedule.burn_in + opts.schedule.thin * opts.schedule.samples;
    chain.draws.reserve(opts.schedule.samples * kNumCoords);

    for (std::size_t it = 0; it < total; ++it) {
        const bool adapting = it < opts.schedule.burn_in;
        update(kK, adapting);
        update(kR, adapting);
        update(kP, adapting);
        for (int s = 0; s < std::max(1, opts.sigma_nu_subiters); ++s) {
            update(kSig, adapting);
            update(kNu, adapting);
        }
        if (it == opts.schedule.burn_in)
            for (auto& s : scale) s.acc = s.tries = 0;
        if (it >= opts.schedule.burn_in && (it - opts.schedule.burn_in + 1) % opts.schedule.thin == 0)
            chain.push_row(sde_row(th));
    }
    for (const auto& s : scale) chain.acceptance.push_back(s.rate());
    return chain;
}

namespace {

// Latent log-path on a fine grid; node 0 is t = 0 with value log P.
struct ExactModel {
    std::vector<double> h;            // step lengths, h[j] for step j-1 -> j
    std::vector<int> obs_at;          // observation index at node j, or -1
    std::vector<double> obs;          // observation (log for log-normal error)
    ErrorKind error = ErrorKind::Normal;

    std::size_t nodes() const { return obs_at.size(); }

    static double drift(const SdeParams& p, double y)
    {
        return p.growth.r - 0.5 * p.sigma * p.sigma - (p.growth.r / p.growth.K) * std::exp(y);
    }

    double step_logpdf(const SdeParams& p, double from, double to, std::size_t j) const
    {
        const double mean = from + drift(p, from) * h[j];
        const double var = p.sigma * p.sigma * h[j];
        const double d = to - mean;
        return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
    }

    double obs_logpdf(const SdeParams& p, double y, std::size_t j) const
    {
        const int k = obs_at[j];
        if (k < 0) return 0.0;
        const double pred = error == ErrorKind::Normal ? std::exp(y) : y;
        const double var = p.nu * p.nu;
        const double d = obs[k] - pred;
        return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
    }

    double obs_total(const SdeParams& p, const std::vector<double>& Y) const
    {
        double s = 0.0;
        for (std::size_t j = 0; j < Y.size(); ++j)
            if (obs_at[j] >= 0) s += obs_logpdf(p, Y[j], j);
        return s;
    }

    double path_total(const SdeParams& p, const std::vector<double>& Y) const
    {
        double s = 0.0;
        for (std::size_t j = 1; j < Y.size(); ++j) s += step_logpdf(p, Y[j - 1], Y[j], j);
        return s;
    }

    std::vector<double> innovations(const SdeParams& p, const std::vector<double>& Y) const
    {
        std::vector<double> xi(Y.size(), 0.0);
        for (std::size_t j = 1; j < Y.size(); ++j)
            xi[j] = (Y[j] - Y[j - 1] - drift(p, Y[j - 1]) * h[j]) / (p.sigma * std::sqrt(h[j]));
        return xi;
    }

    bool rebuild(const SdeParams& p, const std::vector<double>& xi, std::vector<double>& Y) const
    {
        Y.assign(xi.size(), 0.0);
        Y[0] = std::log(p.growth.P);
        for (std::size_t j = 1; j < Y.size(); ++j) {
            Y[j] = Y[j - 1] + drift(p, Y[j - 1]) * h[j] + p.sigma * std::sqrt(h[j]) * xi[j];
            if (!std::isfinite(Y[j]) || Y[j] > 27.6) return false;
        }
        return true;
    }
};

ExactModel build_exact(const GrowthCurve& curve, ErrorKind error, int m)
{
    ExactModel em;
    em.error = error;
    em.obs_at.push_back(-1);
    em.h.push_back(0.0);
    double t = 0.0;
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        const double ti = curve.times[i];
        const double y = error == ErrorKind::LogNormal ? std::log(curve.values[i]) : curve.values[i];
        em.obs.push_back(y);
        if (ti == t && em.nodes() == 1 && i == 0) {
            em.obs_at[0] = 0;
            continue;
        }
        const double hstep = (ti - t) / m;
        for (int k = 1; k <= m; ++k) {
            em.h.push_back(hstep);
            em.obs_at.push_back(k == m ? static_cast<int>(i) : -1);
        }
        t = ti;
    }
    return em;
}

}  // namespace

Chain fit_sde_exact(const GrowthCurve& curve, const ExactFitOptions& opts)
{
    check_schedule(opts.schedule);
    check_curve(curve);
    if (opts.imputed_per_interval < 1)
        throw InvalidParameter("fit_sde_exact: imputed_per_interval must be >= 1");
    if (opts.error == ErrorKind::LogNormal) check_positive(curve);

    Rng rng(opts.seed);
    Theta th = initial_theta(curve, opts.priors, opts.init);
    std::array<bool, kNumCoords> fixed{};
    const auto names = sde_names();
    for (const auto& f : opts.fixed) {
        auto it = std::find(names.begin(), names.end(), f);
        if (it == names.end()) throw UsageError("fit_sde_exact: unknown fixed parameter " + f);
        fixed[it - names.begin()] = true;
    }

    const ExactModel em = build_exact(curve, opts.error, opts.imputed_per_interval);
    const std::size_t n = em.nodes();

    // deterministic path at the initial parameters
    std::vector<double> Y;
    {
        SdeParams p = th.params();
        std::vector<double> zero(n, 0.0);
        if (!em.rebuild(p, zero, Y)) throw NumericError("fit_sde_exact: initial path diverged");
    }

    std::array<RwScale, kNumCoords> scale;
    const std::array<double, kNumCoords> sd0{0.02, 0.02, 0.1, 0.5, 0.3};
    for (int c = 0; c < kNumCoords; ++c) scale[c].sd = sd0[c];
    RwScale sig_centered;
    sig_centered.sd = 0.2;
    RwScale latent;
    latent.sd = 1.0;  // multiplier on sigma sqrt(h)

    auto adapt_if = [&](RwScale& s, bool adapting) {
        if (adapting && s.window_tries >= opts.adapt.window) s.adapt(opts.adapt.low, opts.adapt.high);
    };

    std::vector<double> Yprop, xi;

    auto noncentered = [&](int c, bool adapting) {
        if (fixed[c]) return;
        const SdeParams p = th.params();
        Theta prop = th;
        prop.v[c] += scale[c].sd * rng.normal();
        const double lp_new = log_prior(opts.priors, c, prop.v[c]);
        bool acc = false;
        if (std::isfinite(lp_new)) {
            const SdeParams pn = prop.params();
            xi = em.innovations(p, Y);
            if (em.rebuild(pn, xi, Yprop)) {
                const double ratio = lp_new - log_prior(opts.priors, c, th.v[c]) +
                                     em.obs_total(pn, Yprop) - em.obs_total(p, Y);
                if (mh_accept(rng, ratio)) {
                    th = prop;
                    Y.swap(Yprop);
                    acc = true;
                }
            }
        }
        scale[c].record(acc);
        if (scale[c].rejects_in_row >= opts.adapt.stuck_limit) stuck(kCoordNames[c], scale[c], th);
        adapt_if(scale[c], adapting);
    };

    auto centered_sigma = [&](bool adapting) {
        if (fixed[kSig]) return;
        const SdeParams p = th.params();
        Theta prop = th;
        prop.v[kSig] += sig_centered.sd * rng.normal();
        const double lp_new = log_prior(opts.priors, kSig, prop.v[kSig]);
        bool acc = false;
        if (std::isfinite(lp_new)) {
            const double ratio = lp_new - log_prior(opts.priors, kSig, th.v[kSig]) +
                                 em.path_total(prop.params(), Y) - em.path_total(p, Y);
            if (mh_accept(rng, ratio)) {
                th = prop;
                acc = true;
            }
        }
        sig_centered.record(acc);
        adapt_if(sig_centered, adapting);
    };

    auto update_nu = [&](bool adapting) {
        if (fixed[kNu]) return;
        const SdeParams p = th.params();
        Theta prop = th;
        prop.v[kNu] += scale[kNu].sd * rng.normal();
        const double ratio = log_prior(opts.priors, kNu, prop.v[kNu]) -
                             log_prior(opts.priors, kNu, th.v[kNu]) +
                             em.obs_total(prop.params(), Y) - em.obs_total(p, Y);
        const bool acc = mh_accept(rng, ratio);
        if (acc) th = prop;
        scale[kNu].record(acc);
        if (scale[kNu].rejects_in_row >= opts.adapt.stuck_limit)
            stuck(kCoordNames[kNu], scale[kNu], th);
        adapt_if(scale[kNu], adapting);
    };

    auto update_latent = [&](bool adapting) {
        const SdeParams p = th.params();
        for (std::size_t j = 1; j < n; ++j) {
            const double cur = Y[j];
            const double prop = cur + latent.sd * p.sigma * std::sqrt(em.h[j]) * rng.normal();
            double ratio = em.step_logpdf(p, Y[j - 1], prop, j) -
                           em.step_logpdf(p, Y[j - 1], cur, j) + em.obs_logpdf(p, prop, j) -
                           em.obs_logpdf(p, cur, j);
            if (j + 1 < n)
                ratio += em.step_logpdf(p, prop, Y[j + 1], j + 1) -
                         em.step_logpdf(p, cur, Y[j + 1], j + 1);
            const bool acc = prop < 27.6 && mh_accept(rng, ratio);
            if (acc) Y[j] = prop;
            latent.record(acc);
        }
        adapt_if(latent, adapting);
    };

    Chain chain;
    chain.names = names;
    chain.burn_in = opts.schedule.burn_in;
    chain.thin = opts.schedule.thin;
    chain.seed = opts.seed;
    const std::size_t total = opts.schedule.burn_in + opts.schedule.thin * opts.schedule.samples;

    for (std::size_t it = 0; it < total; ++it) {
        const bool adapting = it < opts.schedule.burn_in;
        update_latent(adapting);
        noncentered(kK, adapting);
        noncentered(kR, adapting);
        noncentered(kP, adapting);
        for (int s = 0; s < std::max(1, opts.sigma_nu_subiters); ++s) {
            noncentered(kSig, adapting);
            centered_sigma(adapting);
            update_nu(adapting);
        }
        if (it == opts.schedule.burn_in)
            for (auto& s : scale) s.acc = s.tries = 0;
        if (it >= opts.schedule.burn_in && (it - opts.schedule.burn_in + 1) % opts.schedule.thin == 0)
            chain.push_row(sde_row(th));
    }
    for (const auto& s : scale) chain.acceptance.push_back(s.rate());
    return chain;
}

}  // namespace qfa
