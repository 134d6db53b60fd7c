#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "qfa/distributions.hpp"
#include "qfa/errors.hpp"
#include "qfa/hierarchy.hpp"
#include "qfa/random.hpp"
#include "moves.hpp"

namespace qfa {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

IhmFit fit_ihm(const FitnessTable& control, const FitnessTable& query, const HyperParams& h,
               const IhmOptions& opts)
{
    h.validate();
    const auto& sch = opts.schedule;
    if (sch.thin == 0 || sch.samples == 0) throw InvalidParameter("schedule: thin and samples > 0");

    IhmFit fit;
    std::set<std::string> all;
    for (const auto& [g, v] : control) all.insert(g);
    for (const auto& [g, v] : query) all.insert(g);
    std::vector<std::string> genes;
    std::vector<std::array<std::vector<double>, 2>> y;
    for (const auto& g : all) {
        auto ci = control.find(g);
        auto qi = query.find(g);
        const bool has_c = ci != control.end() && !ci->second.empty();
        const bool has_q = qi != query.end() && !qi->second.empty();
        if (opts.skip_incomplete && (!has_c || !has_q)) {
            fit.missing.push_back(g);
            continue;
        }
        genes.push_back(g);
        std::array<std::vector<double>, 2> d;
        if (ci != control.end()) d[0] = ci->second;
        if (qi != query.end()) d[1] = qi->second;
        for (const auto& side : d)
            for (double v : side)
                if (!std::isfinite(v)) throw DataError("fit_ihm: non-finite fitness for " + g);
        y.push_back(std::move(d));
    }
    const std::size_t L = genes.size();

    Rng rng(opts.seed);
    std::vector<double> Z(L), gam(L, 0.0);
    std::vector<int> delta(L, 0);
    std::array<std::vector<double>, 2> nu{std::vector<double>(L, h.ihm_nu_mu),
                                          std::vector<double>(L, h.ihm_nu_mu)};
    double alpha = h.ihm_alpha_mu;
    double Zp = h.ihm_Z_mu, nup = h.ihm_nu_mu, sigZ = h.ihm_eta_Z, sigNu = h.ihm_eta_nu,
           sigGam = h.ihm_eta_gamma;

    auto mean_of = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / v.size();
    };
    double ratio_sum = 0;
    int ratio_n = 0;
    for (std::size_t l = 0; l < L; ++l) {
        const double mc = mean_of(y[l][0]), mq = mean_of(y[l][1]);
        Z[l] = mc > 0 ? std::log(mc) : (mq > 0 ? std::log(mq) : h.ihm_Z_mu);
        if (mc > 0 && mq > 0) {
            ratio_sum += std::log(mq / mc);
            ++ratio_n;
        }
        for (int c = 0; c < 2; ++c) {
            if (y[l][c].size() < 2) continue;
            const double m = mean_of(y[l][c]);
            double v = 0;
            for (double x : y[l][c]) v += (x - m) * (x - m);
            v /= y[l][c].size();
            if (v > 0) nu[c][l] = std::clamp(-std::log(v), -20.0, 20.0);
        }
    }
    if (ratio_n) alpha = ratio_sum / ratio_n;
    if (L) {
        double s = 0;
        for (double z : Z) s += std::exp(z);
        Zp = std::log(s / L);
    }

    auto data = [&](int c, std::size_t l, int d) {
        const double mean = std::exp((c == 1 ? alpha + d * gam[l] : 0.0) + Z[l]);
        const double prec = std::exp(nu[c][l]);
        double s = 0;
        for (double v : y[l][c]) s += norm_logpdf_prec(v, mean, prec);
        return s;
    };
    auto geneZ = [&](std::size_t l) {
        const double loc = std::exp(Zp), prec = std::exp(sigZ);
        return scaled_t3_logpdf(std::exp(Z[l]), loc, prec) + Z[l] - t3_log_mass_positive(loc, prec);
    };
    auto gamPrior = [&](std::size_t l) {
        const double prec = std::exp(sigGam);
        return scaled_t3_logpdf(std::exp(gam[l]), 1.0, prec) + gam[l] -
               t3_log_mass_positive(1.0, prec);
    };
    auto nuTerm = [&](int c, std::size_t l) {
        return norm_logpdf_prec(nu[c][l], nup, std::exp(sigNu));
    };

    bool adapting = true;
    auto mh = [&](double& x, RwScale& sc, auto&& logp, const char* what) {
        if (x != sc.last) sc.rejects_in_row = 0;
        const double old = x;
        const double lp_old = logp();
        x = old + sc.sd * rng.normal();
        const double lp_new = logp();
        const bool acc = std::isfinite(lp_new) && mh_accept(rng, lp_new - lp_old);
        if (!acc) x = old;
        sc.record(acc);
        sc.last = x;
        if (sc.rejects_in_row >= opts.adapt.stuck_limit) {
            std::ostringstream os;
            os << "stuck chain: " << sc.rejects_in_row << " consecutive rejections on " << what;
            throw StuckChain(os.str());
        }
        if (adapting && sc.window_tries >= opts.adapt.window) sc.adapt(opts.adapt.low, opts.adapt.high);
    };

    auto mk = [](std::size_t n, double sd) {
        std::vector<RwScale> v(n);
        for (auto& s : v) s.sd = sd;
        return v;
    };
    auto sZ = mk(L, 0.05), sGam = mk(L, 0.2);
    std::array<std::vector<RwScale>, 2> sNu{mk(L, 0.3), mk(L, 0.3)};
    RwScale sAlpha, sZp, sNup, sSigZ, sSigNu, sSigGam, jZp, jSigZ, jNup, jSigNu, jSigGam;
    for (RwScale* s : {&sAlpha, &sZp, &sNup, &sSigZ, &sSigNu, &sSigGam, &jZp, &jSigZ, &jNup, &jSigNu,
                       &jSigGam})
        s->sd = 0.1;
    RwScale cZp, cSigZ, cNup, cSigNu, cSigGam;
    for (RwScale* s : {&cZp, &cSigZ, &cNup, &cSigNu, &cSigGam}) s->sd = 1.0;

    fit.chain.names = {"alpha_1", "Z_p", "nu_p", "sigma_Z", "sigma_nu", "sigma_gamma"};
    for (const auto& g : genes) {
        fit.chain.names.push_back("Z_L[" + g + "]");
        fit.chain.names.push_back("delta[" + g + "]");
        fit.chain.names.push_back("gamma_L[" + g + "]");
    }
    fit.chain.burn_in = sch.burn_in;
    fit.chain.thin = sch.thin;
    fit.chain.seed = opts.seed;

    std::vector<double> sd(L, 0), sg(L, 0), sfc(L, 0), sfq(L, 0);
    const double p = h.ihm_p;
    const std::size_t total = sch.burn_in + sch.thin * sch.samples;
    for (std::size_t it = 0; it < total; ++it) {
        adapting = it < sch.burn_in;
        for (std::size_t l = 0; l < L; ++l) {
            auto zdata = [&] { return data(0, l, 0) + data(1, l, delta[l]); };
            mh(Z[l], sZ[l], [&] { return geneZ(l) + zdata(); }, "Z");
            moves::refresh(rng, Z[l],
                           [&] { return std::log(draw_positive_t3(rng, std::exp(Zp), std::exp(sigZ))); },
                           zdata);
            for (int c = 0; c < 2; ++c) {
                auto nudata = [&] { return data(c, l, c ? delta[l] : 0); };
                mh(nu[c][l], sNu[c][l], [&] { return nuTerm(c, l) + nudata(); }, "nu");
                moves::refresh(rng, nu[c][l], [&] { return rng.normal(nup, std::exp(-0.5 * sigNu)); },
                               nudata);
            }
            if (delta[l] == 1) {
                mh(gam[l], sGam[l], [&] { return gamPrior(l) + data(1, l, 1); }, "gamma");
                moves::refresh(rng, gam[l],
                               [&] { return std::log(draw_positive_t3(rng, 1.0, std::exp(sigGam))); },
                               [&] { return data(1, l, 1); });
            } else
                gam[l] = std::log(draw_positive_t3(rng, 1.0, std::exp(sigGam)));
            const double l1 = data(1, l, 1), l0 = data(1, l, 0);
            double p1;
            if (!std::isfinite(l1))
                p1 = 0.0;
            else if (!std::isfinite(l0))
                p1 = 1.0;
            else
                p1 = 1.0 / (1.0 + (1.0 - p) / p * std::exp(l0 - l1));
            delta[l] = rng.uniform() < p1 ? 1 : 0;
        }
        mh(alpha, sAlpha,
           [&] {
               double s = norm_logpdf_prec(alpha, h.ihm_alpha_mu, h.ihm_eta_alpha);
               for (std::size_t l = 0; l < L; ++l) s += data(1, l, delta[l]);
               return s;
           },
           "alpha");
        auto zsum = [&] {
            double s = 0;
            for (std::size_t l = 0; l < L; ++l) s += geneZ(l);
            return s;
        };
        auto nusum = [&] {
            double s = 0;
            for (std::size_t l = 0; l < L; ++l) s += nuTerm(0, l) + nuTerm(1, l);
            return s;
        };
        mh(Zp, sZp, [&] { return norm_logpdf_prec(Zp, h.ihm_Z_mu, h.ihm_eta_Z_p) + zsum(); }, "Z_p");
        mh(sigZ, sSigZ, [&] { return norm_logpdf_prec(sigZ, h.ihm_eta_Z, h.ihm_psi_Z) + zsum(); },
           "sigma_Z");
        mh(nup, sNup, [&] { return norm_logpdf_prec(nup, h.ihm_nu_mu, h.ihm_eta_nu_p) + nusum(); },
           "nu_p");
        mh(sigNu, sSigNu,
           [&] { return norm_logpdf_prec(sigNu, h.ihm_eta_nu, h.ihm_psi_nu) + nusum(); }, "sigma_nu");
        mh(sigGam, sSigGam,
           [&] {
               double s = norm_logpdf_prec(sigGam, h.ihm_eta_gamma, h.ihm_psi_gamma);
               for (std::size_t l = 0; l < L; ++l) s += gamPrior(l);
               return s;
           },
           "sigma_gamma");

        auto all_data = [&] {
            double s = 0;
            for (std::size_t l = 0; l < L; ++l) s += data(0, l, 0) + data(1, l, delta[l]);
            return s;
        };
        auto z_target = [&] { return zsum() + all_data(); };
        moves::shift(rng, jZp, opts.adapt, adapting, Zp, moves::pointers(Z), [&] {
            return norm_logpdf_prec(Zp, h.ihm_Z_mu, h.ihm_eta_Z_p) + z_target();
        });
        moves::scale(rng, jSigZ, opts.adapt, adapting, sigZ, std::exp(Zp), moves::pointers(Z), true,
                     [&] { return norm_logpdf_prec(sigZ, h.ihm_eta_Z, h.ihm_psi_Z) + z_target(); });
        std::vector<double*> nus = moves::pointers(nu[0]);
        for (double* x : moves::pointers(nu[1])) nus.push_back(x);
        auto nu_target = [&] { return nusum() + all_data(); };
        moves::shift(rng, jNup, opts.adapt, adapting, nup, nus, [&] {
            return norm_logpdf_prec(nup, h.ihm_nu_mu, h.ihm_eta_nu_p) + nu_target();
        });
        moves::scale(rng, jSigNu, opts.adapt, adapting, sigNu, nup, nus, false, [&] {
            return norm_logpdf_prec(sigNu, h.ihm_eta_nu, h.ihm_psi_nu) + nu_target();
        });
        moves::scale(rng, jSigGam, opts.adapt, adapting, sigGam, 1.0, moves::pointers(gam), true, [&] {
            double s = norm_logpdf_prec(sigGam, h.ihm_eta_gamma, h.ihm_psi_gamma);
            for (std::size_t l = 0; l < L; ++l) s += gamPrior(l) + data(1, l, delta[l]);
            return s;
        });

        auto dz = [&] { return std::log(draw_positive_t3(rng, std::exp(Zp), std::exp(sigZ))); };
        moves::collapsed(rng, cZp, opts.adapt, adapting, Zp, moves::pointers(Z), dz,
                         [&] { return norm_logpdf_prec(Zp, h.ihm_Z_mu, h.ihm_eta_Z_p); }, all_data);
        moves::collapsed(rng, cSigZ, opts.adapt, adapting, sigZ, moves::pointers(Z), dz,
                         [&] { return norm_logpdf_prec(sigZ, h.ihm_eta_Z, h.ihm_psi_Z); }, all_data);
        auto dnu = [&] { return rng.normal(nup, std::exp(-0.5 * sigNu)); };
        moves::collapsed(rng, cNup, opts.adapt, adapting, nup, nus, dnu,
                         [&] { return norm_logpdf_prec(nup, h.ihm_nu_mu, h.ihm_eta_nu_p); }, all_data);
        moves::collapsed(rng, cSigNu, opts.adapt, adapting, sigNu, nus, dnu,
                         [&] { return norm_logpdf_prec(sigNu, h.ihm_eta_nu, h.ihm_psi_nu); }, all_data);
        moves::collapsed(rng, cSigGam, opts.adapt, adapting, sigGam, moves::pointers(gam),
                         [&] { return std::log(draw_positive_t3(rng, 1.0, std::exp(sigGam))); },
                         [&] { return norm_logpdf_prec(sigGam, h.ihm_eta_gamma, h.ihm_psi_gamma); },
                         all_data);

        if (it < sch.burn_in || (it - sch.burn_in + 1) % sch.thin != 0) continue;
        std::vector<double> row{alpha, Zp, nup, sigZ, sigNu, sigGam};
        for (std::size_t l = 0; l < L; ++l) {
            row.push_back(Z[l]);
            row.push_back(delta[l]);
            row.push_back(gam[l]);
            sd[l] += delta[l];
            sg[l] += std::exp(delta[l] * gam[l]);
            sfc[l] += std::exp(Z[l]);
            sfq[l] += std::exp(alpha + delta[l] * gam[l] + Z[l]);
        }
        fit.chain.push_row(row);
    }
    const double n = static_cast<double>(sch.samples);
    for (std::size_t l = 0; l < L; ++l) {
        InteractionResult r;
        r.gene = genes[l];
        r.delta_mean = sd[l] / n;
        r.gamma_strength = sg[l] / n;
        r.omega_strength = std::numeric_limits<double>::quiet_NaN();
        r.control_fitness = sfc[l] / n;
        r.query_fitness = sfq[l] / n;
        r.classification = classify(r.delta_mean, r.gamma_strength);
        fit.interactions.push_back(r);
    }
    return fit;
}

}  // namespace qfa
