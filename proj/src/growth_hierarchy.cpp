#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "qfa/distributions.hpp"
#include "qfa/errors.hpp"
#include "qfa/hierarchy.hpp"
#include "qfa/random.hpp"
#include "moves.hpp"

namespace qfa {

Schedule desk_hierarchy_schedule() { return {20000, 20, 1000}; }
Schedule paper_hierarchy_schedule() { return {800000, 100, 1000}; }

std::string classify(double delta_mean, double strength)
{
    if (!(delta_mean > 0.5)) return "none";
    return strength > 1.0 ? "suppressor" : "enhancer";
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogRUpper = 3.5;
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

class GrowthSampler {
public:
    GrowthSampler(const ScreenDataset& screen, const HyperParams& hyper, int conditions,
                  JhmVariant variant, const HierarchyOptions& opts)
        : h_(hyper), C_(conditions), variant_(variant), opts_(opts), rng_(opts.seed)
    {
        screen.validate();
        hyper.validate();
        interaction_ = C_ == 2;
        L_ = screen.genes.size();
        std::map<std::string, int> batch_ids;
        for (const auto& r : screen.repeats) {
            if (r.condition >= C_) throw DataError("repeat condition outside the model");
            Rep rep;
            rep.c = r.condition;
            rep.l = static_cast<int>(screen.gene_index(r.gene));
            rep.t = r.times;
            rep.y = r.values;
            if (variant_ == JhmVariant::Batch) {
                if (r.batch.empty())
                    throw KeyingError("batch variant: repeat " + r.id + " of " + r.gene +
                                      " has no batch label");
                auto [it, ins] = batch_ids.emplace(r.batch, static_cast<int>(batch_ids.size()));
                rep.b = it->second;
            }
            reps_.push_back(std::move(rep));
        }
        B_ = batch_ids.size();
        batch_names_.resize(B_);
        for (const auto& [name, id] : batch_ids) batch_names_[id] = name;

        reps_of_.assign(C_, std::vector<std::vector<int>>(L_));
        gene_reps_.assign(L_, {});
        batch_reps_.assign(B_, {});
        for (std::size_t j = 0; j < reps_.size(); ++j) {
            reps_of_[reps_[j].c][reps_[j].l].push_back(static_cast<int>(j));
            gene_reps_[reps_[j].l].push_back(static_cast<int>(j));
            if (variant_ == JhmVariant::Batch) batch_reps_[reps_[j].b].push_back(static_cast<int>(j));
        }
        genes_ = screen.genes;
        initialise();
    }

    HierarchyFit run();

private:
    struct Rep {
        int c = 0, l = 0, b = 0;
        std::vector<double> t, y;
    };

    const HyperParams& h_;
    int C_;
    JhmVariant variant_;
    HierarchyOptions opts_;
    Rng rng_;
    bool interaction_ = false;
    std::size_t L_ = 0, B_ = 0;
    std::vector<Rep> reps_;
    std::vector<std::string> genes_, batch_names_;
    std::vector<std::vector<std::vector<int>>> reps_of_;
    std::vector<std::vector<int>> gene_reps_, batch_reps_;

    // state
    std::vector<double> kL_, rL_, ssr_;
    std::vector<double> Ko_, Ro_, gam_, omg_;
    std::vector<int> delta_;
    std::vector<std::vector<double>> nu_, tauK_, tauR_;
    std::vector<double> tauKp_, tauRp_, sigTauK_, sigTauR_;
    double alpha_ = 0, beta_ = 0, Kp_ = 0, Rp_ = 0, nup_ = 0, PL_ = 0;
    double sigKo_ = 0, sigRo_ = 0, sigNu_ = 0, sigGam_ = 0, sigOmg_ = 0;
    double phi_ = 1, chi_ = 1;
    std::vector<double> kappa_, lambda_;

    // proposal scales
    std::vector<RwScale> s_kL_, s_rL_, s_Ko_, s_Ro_, s_gam_, s_omg_, s_kappa_, s_lambda_;
    std::vector<std::vector<RwScale>> s_nu_, s_tauK_, s_tauR_;
    std::vector<RwScale> s_tauKp_, s_tauRp_, s_sigTauK_, s_sigTauR_;
    std::vector<RwScale> j_tauKp_, j_tauRp_, j_sigTauK_, j_sigTauR_;
    RwScale j_Kp_, j_Rp_, j_sigKo_, j_sigRo_, j_nup_, j_sigNu_, j_sigGam_, j_sigOmg_;
    std::vector<RwScale> c_tauKp_, c_tauRp_, c_sigTauK_, c_sigTauR_;
    RwScale c_Kp_, c_Rp_, c_sigKo_, c_sigRo_, c_nup_, c_sigNu_, c_sigGam_, c_sigOmg_;
    RwScale s_alpha_, s_beta_, s_Kp_, s_Rp_, s_nup_, s_PL_, s_sigKo_, s_sigRo_, s_sigNu_,
        s_sigGam_, s_sigOmg_, s_phi_, s_chi_;
    bool adapting_ = true;

    double ssr(std::size_t j, double kL, double rL, double PL) const
    {
        const auto& rp = reps_[j];
        const double K = std::exp(kL), r = std::exp(rL), P = std::exp(PL);
        double s = 0.0;
        for (std::size_t n = 0; n < rp.t.size(); ++n) {
            const double d = rp.y[n] - logistic_fast(K, r, P, rp.t[n]);
            s += d * d;
        }
        return s;
    }

    double data_ll(std::size_t j, double ssr_value) const
    {
        const auto& rp = reps_[j];
        const double n = static_cast<double>(rp.t.size());
        const double nu = nu_[rp.c][rp.l];
        return n * (0.5 * nu - kHalfLog2Pi) - 0.5 * std::exp(nu) * ssr_value;
    }

    double muK(std::size_t j, int delta) const
    {
        const auto& rp = reps_[j];
        double m = (rp.c == 1 ? alpha_ : 0.0) + Ko_[rp.l];
        if (rp.c == 1 && interaction_) m += delta * gam_[rp.l];
        m /= phi_;
        if (variant_ == JhmVariant::Batch) m += kappa_[rp.b];
        return m;
    }

    double muR(std::size_t j, int delta) const
    {
        const auto& rp = reps_[j];
        double m = (rp.c == 1 ? beta_ : 0.0) + Ro_[rp.l];
        if (rp.c == 1 && interaction_) m += delta * omg_[rp.l];
        m /= chi_;
        if (variant_ == JhmVariant::Batch) m += lambda_[rp.b];
        return m;
    }

    double repK(std::size_t j, int delta) const
    {
        if (kL_[j] > 0) return kNegInf;
        const auto& rp = reps_[j];
        const double prec = std::exp(tauK_[rp.c][rp.l]);
        const double m = muK(j, delta);
        return norm_logpdf_prec(kL_[j], m, prec) - norm_log_mass_below(0.0, m, prec);
    }
    double repK(std::size_t j) const { return repK(j, interaction_ ? delta_[reps_[j].l] : 0); }

    double repR(std::size_t j, int delta) const
    {
        if (rL_[j] > kLogRUpper) return kNegInf;
        const auto& rp = reps_[j];
        const double prec = std::exp(tauR_[rp.c][rp.l]);
        const double m = muR(j, delta);
        return norm_logpdf_prec(rL_[j], m, prec) - norm_log_mass_below(kLogRUpper, m, prec);
    }
    double repR(std::size_t j) const { return repR(j, interaction_ ? delta_[reps_[j].l] : 0); }

    double geneK(std::size_t l) const
    {
        const double loc = std::exp(Kp_), prec = std::exp(sigKo_);
        return scaled_t3_logpdf(std::exp(Ko_[l]), loc, prec) + Ko_[l] -
               t3_log_mass_positive(loc, prec);
    }
    double geneR(std::size_t l) const
    {
        const double loc = std::exp(Rp_), prec = std::exp(sigRo_);
        return scaled_t3_logpdf(std::exp(Ro_[l]), loc, prec) + Ro_[l] -
               t3_log_mass_positive(loc, prec);
    }
    double strength_prior(double logv, double sig) const
    {
        const double prec = std::exp(sig);
        return scaled_t3_logpdf(std::exp(logv), 1.0, prec) + logv - t3_log_mass_positive(1.0, prec);
    }
    double nuTerm(int c, std::size_t l) const
    {
        return norm_logpdf_prec(nu_[c][l], nup_, std::exp(sigNu_));
    }
    double tauKTerm(int c, std::size_t l) const
    {
        if (tauK_[c][l] < 0) return kNegInf;
        const double prec = std::exp(sigTauK_[c]);
        return norm_logpdf_prec(tauK_[c][l], tauKp_[c], prec) -
               norm_log_mass_above(0.0, tauKp_[c], prec);
    }
    double tauRTerm(int c, std::size_t l) const
    {
        return norm_logpdf_prec(tauR_[c][l], tauRp_[c], std::exp(sigTauR_[c]));
    }

    template <class F>
    void mh(double& x, RwScale& sc, F&& logp, const char* what)
    {
        if (x != sc.last) sc.rejects_in_row = 0;
        const double old = x;
        const double lp_old = logp();
        x = old + sc.sd * rng_.normal();
        const double lp_new = logp();
        const bool acc = std::isfinite(lp_new) && mh_accept(rng_, lp_new - lp_old);
        if (!acc) x = old;
        sc.record(acc);
        sc.last = x;
        if (sc.rejects_in_row >= opts_.adapt.stuck_limit) {
            std::ostringstream os;
            os << "stuck chain: " << sc.rejects_in_row << " consecutive rejections on " << what
               << " (proposal sd " << sc.sd << ", value " << x << ")";
            throw StuckChain(os.str());
        }
        if (adapting_ && sc.window_tries >= opts_.adapt.window)
            sc.adapt(opts_.adapt.low, opts_.adapt.high);
    }

    template <class Draw, class F>
    void refresh(double& x, Draw&& draw, F&& loglik)
    {
        moves::refresh(rng_, x, draw, loglik);
    }
    template <class F>
    void shift_move(RwScale& sc, double& hyper, std::vector<double*> kids, F&& logt)
    {
        moves::shift(rng_, sc, opts_.adapt, adapting_, hyper, std::move(kids), logt);
    }
    template <class F>
    void scale_move(RwScale& sc, double& logprec, double centre, std::vector<double*> kids,
                    bool exp_scale, F&& logt)
    {
        moves::scale(rng_, sc, opts_.adapt, adapting_, logprec, centre, std::move(kids), exp_scale,
                     logt);
    }

    template <class Draw, class Prior, class F>
    void collapsed_move(RwScale& sc, double& hyper, std::vector<double*> kids, Draw&& draw,
                        Prior&& prior, F&& loglik)
    {
        moves::collapsed(rng_, sc, opts_.adapt, adapting_, hyper, std::move(kids), draw, prior,
                         loglik);
    }

    void initialise();
    void sweep();
    void collapsed_moves();
    void joint_moves();
    std::vector<std::string> names() const;
    std::vector<double> row() const;
};

void GrowthSampler::initialise()
{
    const std::size_t J = reps_.size();
    PL_ = h_.P_mu;
    kL_.assign(J, 0);
    rL_.assign(J, 0);
    ssr_.assign(J, 0);
    for (std::size_t j = 0; j < J; ++j) {
        double ymax = 0;
        for (double y : reps_[j].y) ymax = std::max(ymax, y);
        kL_[j] = std::min(std::log(std::max(ymax, 2.0 * std::exp(PL_))), -1e-3);
        double best = std::numeric_limits<double>::infinity();
        double br = h_.r_mu;
        for (double rl = -2.0; rl <= kLogRUpper; rl += 0.05) {
            const double s = ssr(j, kL_[j], rl, PL_);
            if (s < best) {
                best = s;
                br = rl;
            }
        }
        rL_[j] = std::min(br, kLogRUpper - 1e-3);
        ssr_[j] = ssr(j, kL_[j], rL_[j], PL_);
    }

    auto mean_over = [&](const std::vector<int>& idx, const std::vector<double>& v, double dflt) {
        if (idx.empty()) return dflt;
        double s = 0;
        for (int j : idx) s += v[j];
        return s / idx.size();
    };
    Ko_.assign(L_, h_.K_mu);
    Ro_.assign(L_, h_.r_mu);
    for (std::size_t l = 0; l < L_; ++l) {
        const auto& base = !reps_of_[0][l].empty() ? reps_of_[0][l] : gene_reps_[l];
        Ko_[l] = mean_over(base, kL_, h_.K_mu);
        Ro_[l] = mean_over(base, rL_, h_.r_mu);
    }
    if (interaction_) {
        double dk = 0, dr = 0;
        int n = 0;
        for (std::size_t l = 0; l < L_; ++l) {
            if (reps_of_[0][l].empty() || reps_of_[1][l].empty()) continue;
            dk += mean_over(reps_of_[1][l], kL_, 0) - mean_over(reps_of_[0][l], kL_, 0);
            dr += mean_over(reps_of_[1][l], rL_, 0) - mean_over(reps_of_[0][l], rL_, 0);
            ++n;
        }
        alpha_ = n ? dk / n : h_.alpha_mu;
        beta_ = n ? dr / n : h_.beta_mu;
    }
    gam_.assign(L_, 0.0);
    omg_.assign(L_, 0.0);
    delta_.assign(L_, 0);

    nu_.assign(C_, std::vector<double>(L_, h_.nu_mu));
    tauK_.assign(C_, std::vector<double>(L_, std::max(h_.tau_K_mu, 0.0)));
    tauR_.assign(C_, std::vector<double>(L_, h_.tau_r_mu));
    for (int c = 0; c < C_; ++c)
        for (std::size_t l = 0; l < L_; ++l) {
            double s = 0, n = 0;
            for (int j : reps_of_[c][l]) {
                s += ssr_[j];
                n += reps_[j].t.size();
            }
            if (n > 0 && s > 0) nu_[c][l] = std::clamp(std::log(n / s), 0.0, 30.0);
        }
    tauKp_.assign(C_, h_.tau_K_mu);
    tauRp_.assign(C_, h_.tau_r_mu);
    sigTauK_.assign(C_, h_.eta_tau_K);
    sigTauR_.assign(C_, h_.eta_tau_r);

    double sk = 0, sr = 0;
    for (std::size_t l = 0; l < L_; ++l) {
        sk += std::exp(Ko_[l]);
        sr += std::exp(Ro_[l]);
    }
    Kp_ = L_ ? std::log(sk / L_) : h_.K_mu;
    Rp_ = L_ ? std::log(sr / L_) : h_.r_mu;
    double snu = 0;
    for (int c = 0; c < C_; ++c)
        for (std::size_t l = 0; l < L_; ++l) snu += nu_[c][l];
    nup_ = L_ ? snu / (C_ * L_) : h_.nu_mu;
    sigKo_ = h_.eta_K_o;
    sigRo_ = h_.eta_r_o;
    sigNu_ = h_.eta_nu;
    sigGam_ = h_.eta_gamma;
    sigOmg_ = h_.eta_omega;
    kappa_.assign(B_, h_.kappa_p);
    lambda_.assign(B_, h_.lambda_p);
    phi_ = chi_ = 1.0;

    auto scales = [](std::size_t n, double sd) {
        std::vector<RwScale> v(n);
        for (auto& s : v) s.sd = sd;
        return v;
    };
    s_kL_ = scales(J, 0.05);
    s_rL_ = scales(J, 0.05);
    s_Ko_ = scales(L_, 0.1);
    s_Ro_ = scales(L_, 0.1);
    s_gam_ = scales(L_, 0.2);
    s_omg_ = scales(L_, 0.2);
    s_kappa_ = scales(B_, 0.1);
    s_lambda_ = scales(B_, 0.1);
    s_nu_.assign(C_, scales(L_, 0.3));
    s_tauK_.assign(C_, scales(L_, 0.3));
    s_tauR_.assign(C_, scales(L_, 0.3));
    s_tauKp_ = scales(C_, 0.3);
    s_tauRp_ = scales(C_, 0.3);
    s_sigTauK_ = scales(C_, 0.3);
    s_sigTauR_ = scales(C_, 0.3);
    j_tauKp_ = scales(C_, 0.3);
    j_tauRp_ = scales(C_, 0.3);
    j_sigTauK_ = scales(C_, 0.3);
    j_sigTauR_ = scales(C_, 0.3);
    for (RwScale* s : {&j_Kp_, &j_Rp_, &j_sigKo_, &j_sigRo_, &j_nup_, &j_sigNu_, &j_sigGam_, &j_sigOmg_})
        s->sd = 0.1;
    c_tauKp_ = scales(C_, 1.0);
    c_tauRp_ = scales(C_, 1.0);
    c_sigTauK_ = scales(C_, 1.0);
    c_sigTauR_ = scales(C_, 1.0);
    for (RwScale* s : {&c_Kp_, &c_Rp_, &c_sigKo_, &c_sigRo_, &c_nup_, &c_sigNu_, &c_sigGam_, &c_sigOmg_})
        s->sd = 1.0;
    for (RwScale* s : {&s_alpha_, &s_beta_, &s_Kp_, &s_Rp_, &s_nup_, &s_PL_, &s_sigKo_, &s_sigRo_,
                       &s_sigNu_, &s_sigGam_, &s_sigOmg_, &s_phi_, &s_chi_})
        s->sd = 0.1;
    s_PL_.sd = 0.02;
}

void GrowthSampler::sweep()
{
    const std::size_t J = reps_.size();
    // repeat level
    for (std::size_t j = 0; j < J; ++j) {
        mh(kL_[j], s_kL_[j],
           [&] { return repK(j) + data_ll(j, ssr(j, kL_[j], rL_[j], PL_)); }, "log K (repeat)");
        ssr_[j] = ssr(j, kL_[j], rL_[j], PL_);
        mh(rL_[j], s_rL_[j],
           [&] { return repR(j) + data_ll(j, ssr(j, kL_[j], rL_[j], PL_)); }, "log r (repeat)");
        ssr_[j] = ssr(j, kL_[j], rL_[j], PL_);
    }

    // gene-by-condition level
    for (int c = 0; c < C_; ++c)
        for (std::size_t l = 0; l < L_; ++l) {
            const auto& idx = reps_of_[c][l];
            mh(nu_[c][l], s_nu_[c][l],
               [&] {
                   double s = nuTerm(c, l);
                   for (int j : idx) s += data_ll(j, ssr_[j]);
                   return s;
               },
               "nu");
            refresh(nu_[c][l], [&] { return rng_.normal(nup_, std::exp(-0.5 * sigNu_)); },
                    [&] {
                        double s = 0;
                        for (int j : idx) s += data_ll(j, ssr_[j]);
                        return s;
                    });
            mh(tauK_[c][l], s_tauK_[c][l],
               [&] {
                   double s = tauKTerm(c, l);
                   if (!std::isfinite(s)) return s;
                   for (int j : idx) s += repK(j);
                   return s;
               },
               "tau_K");
            refresh(tauK_[c][l],
                    [&] { return draw_normal_above(rng_, tauKp_[c], std::exp(sigTauK_[c]), 0.0); },
                    [&] {
                        double s = 0;
                        for (int j : idx) s += repK(j);
                        return s;
                    });
            mh(tauR_[c][l], s_tauR_[c][l],
               [&] {
                   double s = tauRTerm(c, l);
                   for (int j : idx) s += repR(j);
                   return s;
               },
               "tau_r");
            refresh(tauR_[c][l],
                    [&] { return rng_.normal(tauRp_[c], std::exp(-0.5 * sigTauR_[c])); },
                    [&] {
                        double s = 0;
                        for (int j : idx) s += repR(j);
                        return s;
                    });
        }

    // gene level
    const double p = h_.p;
    for (std::size_t l = 0; l < L_; ++l) {
        const auto& idx = gene_reps_[l];
        mh(Ko_[l], s_Ko_[l],
           [&] {
               double s = geneK(l);
               for (int j : idx) s += repK(j);
               return s;
           },
           "K_o");
        refresh(Ko_[l], [&] { return std::log(draw_positive_t3(rng_, std::exp(Kp_), std::exp(sigKo_))); },
                [&] {
                    double s = 0;
                    for (int j : idx) s += repK(j);
                    return s;
                });
        mh(Ro_[l], s_Ro_[l],
           [&] {
               double s = geneR(l);
               for (int j : idx) s += repR(j);
               return s;
           },
           "r_o");
        refresh(Ro_[l], [&] { return std::log(draw_positive_t3(rng_, std::exp(Rp_), std::exp(sigRo_))); },
                [&] {
                    double s = 0;
                    for (int j : idx) s += repR(j);
                    return s;
                });
        if (!interaction_) continue;
        const auto& q = reps_of_[1][l];
        if (delta_[l] == 1) {
            mh(gam_[l], s_gam_[l],
               [&] {
                   double s = strength_prior(gam_[l], sigGam_);
                   for (int j : q) s += repK(j);
                   return s;
               },
               "gamma");
            refresh(gam_[l], [&] { return std::log(draw_positive_t3(rng_, 1.0, std::exp(sigGam_))); },
                    [&] {
                        double s = 0;
                        for (int j : q) s += repK(j);
                        return s;
                    });
            mh(omg_[l], s_omg_[l],
               [&] {
                   double s = strength_prior(omg_[l], sigOmg_);
                   for (int j : q) s += repR(j);
                   return s;
               },
               "omega");
            refresh(omg_[l], [&] { return std::log(draw_positive_t3(rng_, 1.0, std::exp(sigOmg_))); },
                    [&] {
                        double s = 0;
                        for (int j : q) s += repR(j);
                        return s;
                    });
        } else {
            gam_[l] = std::log(draw_positive_t3(rng_, 1.0, std::exp(sigGam_)));
            omg_[l] = std::log(draw_positive_t3(rng_, 1.0, std::exp(sigOmg_)));
        }
        double l1 = 0, l0 = 0;
        for (int j : q) {
            l1 += repK(j, 1) + repR(j, 1);
            l0 += repK(j, 0) + repR(j, 0);
        }
        double p1;
        if (!std::isfinite(l1))
            p1 = 0.0;
        else if (!std::isfinite(l0))
            p1 = 1.0;
        else
            p1 = 1.0 / (1.0 + (1.0 - p) / p * std::exp(l0 - l1));
        delta_[l] = rng_.uniform() < p1 ? 1 : 0;
    }

    // condition level
    if (interaction_) {
        mh(alpha_, s_alpha_,
           [&] {
               double s = norm_logpdf_prec(alpha_, h_.alpha_mu, h_.eta_alpha);
               for (std::size_t j = 0; j < J; ++j)
                   if (reps_[j].c == 1) s += repK(j);
               return s;
           },
           "alpha");
        mh(beta_, s_beta_,
           [&] {
               double s = norm_logpdf_prec(beta_, h_.beta_mu, h_.eta_beta);
               for (std::size_t j = 0; j < J; ++j)
                   if (reps_[j].c == 1) s += repR(j);
               return s;
           },
           "beta");
    }
    for (int c = 0; c < C_; ++c) {
        auto tauK_children = [&] {
            double s = 0;
            for (std::size_t l = 0; l < L_; ++l) s += tauKTerm(c, l);
            return s;
        };
        auto tauR_children = [&] {
            double s = 0;
            for (std::size_t l = 0; l < L_; ++l) s += tauRTerm(c, l);
            return s;
        };
        mh(tauKp_[c], s_tauKp_[c],
           [&] { return norm_logpdf_prec(tauKp_[c], h_.tau_K_mu, h_.eta_tau_K_p) + tauK_children(); },
           "tau_K_p");
        mh(sigTauK_[c], s_sigTauK_[c],
           [&] { return norm_logpdf_prec(sigTauK_[c], h_.eta_tau_K, h_.psi_tau_K) + tauK_children(); },
           "sigma_tau_K");
        mh(tauRp_[c], s_tauRp_[c],
           [&] { return norm_logpdf_prec(tauRp_[c], h_.tau_r_mu, h_.eta_tau_r_p) + tauR_children(); },
           "tau_r_p");
        mh(sigTauR_[c], s_sigTauR_[c],
           [&] { return norm_logpdf_prec(sigTauR_[c], h_.eta_tau_r, h_.psi_tau_r) + tauR_children(); },
           "sigma_tau_r");
    }

    // variants
    if (variant_ == JhmVariant::Batch) {
        for (std::size_t b = 0; b < B_; ++b) {
            mh(kappa_[b], s_kappa_[b],
               [&] {
                   double s = norm_logpdf_prec(kappa_[b], h_.kappa_p, h_.eta_kappa);
                   for (int j : batch_reps_[b]) s += repK(j);
                   return s;
               },
               "kappa");
            refresh(kappa_[b], [&] { return rng_.normal(h_.kappa_p, 1.0 / std::sqrt(h_.eta_kappa)); },
                    [&] {
                        double s = 0;
                        for (int j : batch_reps_[b]) s += repK(j);
                        return s;
                    });
            mh(lambda_[b], s_lambda_[b],
               [&] {
                   double s = norm_logpdf_prec(lambda_[b], h_.lambda_p, h_.eta_lambda);
                   for (int j : batch_reps_[b]) s += repR(j);
                   return s;
               },
               "lambda");
            refresh(lambda_[b], [&] { return rng_.normal(h_.lambda_p, 1.0 / std::sqrt(h_.eta_lambda)); },
                    [&] {
                        double s = 0;
                        for (int j : batch_reps_[b]) s += repR(j);
                        return s;
                    });
        }
    }
    if (variant_ == JhmVariant::Transform && !opts_.fix_transform) {
        double lphi = std::log(phi_);
        mh(lphi, s_phi_,
           [&] {
               phi_ = std::exp(lphi);
               double s = gamma_logpdf(phi_, h_.phi_shape, h_.phi_scale) + lphi;
               for (std::size_t j = 0; j < J; ++j) s += repK(j);
               return s;
           },
           "phi");
        phi_ = std::exp(lphi);
        double lchi = std::log(chi_);
        mh(lchi, s_chi_,
           [&] {
               chi_ = std::exp(lchi);
               double s = gamma_logpdf(chi_, h_.chi_shape, h_.chi_scale) + lchi;
               for (std::size_t j = 0; j < J; ++j) s += repR(j);
               return s;
           },
           "chi");
        chi_ = std::exp(lchi);
    }

    // population level
    mh(PL_, s_PL_,
       [&] {
           double s = norm_logpdf_prec(PL_, h_.P_mu, h_.eta_P);
           for (std::size_t j = 0; j < J; ++j) s += data_ll(j, ssr(j, kL_[j], rL_[j], PL_));
           return s;
       },
       "P");
    for (std::size_t j = 0; j < J; ++j) ssr_[j] = ssr(j, kL_[j], rL_[j], PL_);
    auto geneK_all = [&] {
        double s = 0;
        for (std::size_t l = 0; l < L_; ++l) s += geneK(l);
        return s;
    };
    auto geneR_all = [&] {
        double s = 0;
        for (std::size_t l = 0; l < L_; ++l) s += geneR(l);
        return s;
    };
    auto nu_all = [&] {
        double s = 0;
        for (int c = 0; c < C_; ++c)
            for (std::size_t l = 0; l < L_; ++l) s += nuTerm(c, l);
        return s;
    };
    mh(Kp_, s_Kp_, [&] { return norm_logpdf_prec(Kp_, h_.K_mu, h_.eta_K_p) + geneK_all(); }, "K_p");
    mh(sigKo_, s_sigKo_,
       [&] { return norm_logpdf_prec(sigKo_, h_.eta_K_o, h_.psi_K_o) + geneK_all(); }, "sigma_K_o");
    mh(Rp_, s_Rp_, [&] { return norm_logpdf_prec(Rp_, h_.r_mu, h_.eta_r_p) + geneR_all(); }, "r_p");
    mh(sigRo_, s_sigRo_,
       [&] { return norm_logpdf_prec(sigRo_, h_.eta_r_o, h_.psi_r_o) + geneR_all(); }, "sigma_r_o");
    mh(nup_, s_nup_, [&] { return norm_logpdf_prec(nup_, h_.nu_mu, h_.eta_nu_p) + nu_all(); }, "nu_p");
    mh(sigNu_, s_sigNu_,
       [&] { return norm_logpdf_prec(sigNu_, h_.eta_nu, h_.psi_nu) + nu_all(); }, "sigma_nu");
    if (interaction_) {
        mh(sigGam_, s_sigGam_,
           [&] {
               double s = norm_logpdf_prec(sigGam_, h_.eta_gamma, h_.psi_gamma);
               for (std::size_t l = 0; l < L_; ++l) s += strength_prior(gam_[l], sigGam_);
               return s;
           },
           "sigma_gamma");
        mh(sigOmg_, s_sigOmg_,
           [&] {
               double s = norm_logpdf_prec(sigOmg_, h_.eta_omega, h_.psi_omega);
               for (std::size_t l = 0; l < L_; ++l) s += strength_prior(omg_[l], sigOmg_);
               return s;
           },
           "sigma_omega");
    }
    joint_moves();
    collapsed_moves();
}

void GrowthSampler::joint_moves()
{
    const std::size_t J = reps_.size();
    const auto ptrs = moves::pointers;
    auto sum_repK = [&](int c) {
        double s = 0;
        for (std::size_t j = 0; j < J; ++j)
            if (c < 0 || reps_[j].c == c) s += repK(j);
        return s;
    };
    auto sum_repR = [&](int c) {
        double s = 0;
        for (std::size_t j = 0; j < J; ++j)
            if (c < 0 || reps_[j].c == c) s += repR(j);
        return s;
    };
    for (int c = 0; c < C_; ++c) {
        auto tk = [&] {
            double s = 0;
            for (std::size_t l = 0; l < L_; ++l) s += tauKTerm(c, l);
            return std::isfinite(s) ? s + sum_repK(c) : s;
        };
        auto tr = [&] {
            double s = 0;
            for (std::size_t l = 0; l < L_; ++l) s += tauRTerm(c, l);
            return s + sum_repR(c);
        };
        shift_move(j_tauKp_[c], tauKp_[c], ptrs(tauK_[c]), [&] {
            return norm_logpdf_prec(tauKp_[c], h_.tau_K_mu, h_.eta_tau_K_p) + tk();
        });
        scale_move(j_sigTauK_[c], sigTauK_[c], tauKp_[c], ptrs(tauK_[c]), false, [&] {
            return norm_logpdf_prec(sigTauK_[c], h_.eta_tau_K, h_.psi_tau_K) + tk();
        });
        shift_move(j_tauRp_[c], tauRp_[c], ptrs(tauR_[c]), [&] {
            return norm_logpdf_prec(tauRp_[c], h_.tau_r_mu, h_.eta_tau_r_p) + tr();
        });
        scale_move(j_sigTauR_[c], sigTauR_[c], tauRp_[c], ptrs(tauR_[c]), false, [&] {
            return norm_logpdf_prec(sigTauR_[c], h_.eta_tau_r, h_.psi_tau_r) + tr();
        });
    }

    std::vector<double*> nus;
    for (auto& row : nu_)
        for (double& x : row) nus.push_back(&x);
    auto nu_target = [&] {
        double s = 0;
        for (int c = 0; c < C_; ++c)
            for (std::size_t l = 0; l < L_; ++l) s += nuTerm(c, l);
        for (std::size_t j = 0; j < J; ++j) s += data_ll(j, ssr_[j]);
        return s;
    };
    shift_move(j_nup_, nup_, nus,
               [&] { return norm_logpdf_prec(nup_, h_.nu_mu, h_.eta_nu_p) + nu_target(); });
    scale_move(j_sigNu_, sigNu_, nup_, nus, false,
               [&] { return norm_logpdf_prec(sigNu_, h_.eta_nu, h_.psi_nu) + nu_target(); });

    auto k_target = [&] {
        double s = 0;
        for (std::size_t l = 0; l < L_; ++l) s += geneK(l);
        return s + sum_repK(-1);
    };
    auto r_target = [&] {
        double s = 0;
        for (std::size_t l = 0; l < L_; ++l) s += geneR(l);
        return s + sum_repR(-1);
    };
    shift_move(j_Kp_, Kp_, ptrs(Ko_),
               [&] { return norm_logpdf_prec(Kp_, h_.K_mu, h_.eta_K_p) + k_target(); });
    scale_move(j_sigKo_, sigKo_, std::exp(Kp_), ptrs(Ko_), true,
               [&] { return norm_logpdf_prec(sigKo_, h_.eta_K_o, h_.psi_K_o) + k_target(); });
    shift_move(j_Rp_, Rp_, ptrs(Ro_),
               [&] { return norm_logpdf_prec(Rp_, h_.r_mu, h_.eta_r_p) + r_target(); });
    scale_move(j_sigRo_, sigRo_, std::exp(Rp_), ptrs(Ro_), true,
               [&] { return norm_logpdf_prec(sigRo_, h_.eta_r_o, h_.psi_r_o) + r_target(); });

    if (!interaction_) return;
    scale_move(j_sigGam_, sigGam_, 1.0, ptrs(gam_), true, [&] {
        double s = norm_logpdf_prec(sigGam_, h_.eta_gamma, h_.psi_gamma);
        for (std::size_t l = 0; l < L_; ++l) s += strength_prior(gam_[l], sigGam_);
        return s + sum_repK(1);
    });
    scale_move(j_sigOmg_, sigOmg_, 1.0, ptrs(omg_), true, [&] {
        double s = norm_logpdf_prec(sigOmg_, h_.eta_omega, h_.psi_omega);
        for (std::size_t l = 0; l < L_; ++l) s += strength_prior(omg_[l], sigOmg_);
        return s + sum_repR(1);
    });
}

void GrowthSampler::collapsed_moves()
{
    const std::size_t J = reps_.size();
    const auto ptrs = moves::pointers;
    auto sum_rep = [&](bool k, int c) {
        double s = 0;
        for (std::size_t j = 0; j < J; ++j)
            if (c < 0 || reps_[j].c == c) s += k ? repK(j) : repR(j);
        return s;
    };
    for (int c = 0; c < C_; ++c) {
        auto dk = [&] { return draw_normal_above(rng_, tauKp_[c], std::exp(sigTauK_[c]), 0.0); };
        auto dr = [&] { return rng_.normal(tauRp_[c], std::exp(-0.5 * sigTauR_[c])); };
        auto lk = [&] { return sum_rep(true, c); };
        auto lr = [&] { return sum_rep(false, c); };
        collapsed_move(c_tauKp_[c], tauKp_[c], ptrs(tauK_[c]), dk,
                       [&] { return norm_logpdf_prec(tauKp_[c], h_.tau_K_mu, h_.eta_tau_K_p); }, lk);
        collapsed_move(c_sigTauK_[c], sigTauK_[c], ptrs(tauK_[c]), dk,
                       [&] { return norm_logpdf_prec(sigTauK_[c], h_.eta_tau_K, h_.psi_tau_K); }, lk);
        collapsed_move(c_tauRp_[c], tauRp_[c], ptrs(tauR_[c]), dr,
                       [&] { return norm_logpdf_prec(tauRp_[c], h_.tau_r_mu, h_.eta_tau_r_p); }, lr);
        collapsed_move(c_sigTauR_[c], sigTauR_[c], ptrs(tauR_[c]), dr,
                       [&] { return norm_logpdf_prec(sigTauR_[c], h_.eta_tau_r, h_.psi_tau_r); }, lr);
    }

    std::vector<double*> nus;
    for (auto& row : nu_)
        for (double& x : row) nus.push_back(&x);
    auto dnu = [&] { return rng_.normal(nup_, std::exp(-0.5 * sigNu_)); };
    auto lnu = [&] {
        double s = 0;
        for (std::size_t j = 0; j < J; ++j) s += data_ll(j, ssr_[j]);
        return s;
    };
    collapsed_move(c_nup_, nup_, nus, dnu,
                   [&] { return norm_logpdf_prec(nup_, h_.nu_mu, h_.eta_nu_p); }, lnu);
    collapsed_move(c_sigNu_, sigNu_, nus, dnu,
                   [&] { return norm_logpdf_prec(sigNu_, h_.eta_nu, h_.psi_nu); }, lnu);

    auto dko = [&] { return std::log(draw_positive_t3(rng_, std::exp(Kp_), std::exp(sigKo_))); };
    auto dro = [&] { return std::log(draw_positive_t3(rng_, std::exp(Rp_), std::exp(sigRo_))); };
    auto lk = [&] { return sum_rep(true, -1); };
    auto lr = [&] { return sum_rep(false, -1); };
    collapsed_move(c_Kp_, Kp_, ptrs(Ko_), dko, [&] { return norm_logpdf_prec(Kp_, h_.K_mu, h_.eta_K_p); }, lk);
    collapsed_move(c_sigKo_, sigKo_, ptrs(Ko_), dko,
                   [&] { return norm_logpdf_prec(sigKo_, h_.eta_K_o, h_.psi_K_o); }, lk);
    collapsed_move(c_Rp_, Rp_, ptrs(Ro_), dro, [&] { return norm_logpdf_prec(Rp_, h_.r_mu, h_.eta_r_p); }, lr);
    collapsed_move(c_sigRo_, sigRo_, ptrs(Ro_), dro,
                   [&] { return norm_logpdf_prec(sigRo_, h_.eta_r_o, h_.psi_r_o); }, lr);

    if (!interaction_) return;
    collapsed_move(c_sigGam_, sigGam_, ptrs(gam_),
                   [&] { return std::log(draw_positive_t3(rng_, 1.0, std::exp(sigGam_))); },
                   [&] { return norm_logpdf_prec(sigGam_, h_.eta_gamma, h_.psi_gamma); },
                   [&] { return sum_rep(true, 1); });
    collapsed_move(c_sigOmg_, sigOmg_, ptrs(omg_),
                   [&] { return std::log(draw_positive_t3(rng_, 1.0, std::exp(sigOmg_))); },
                   [&] { return norm_logpdf_prec(sigOmg_, h_.eta_omega, h_.psi_omega); },
                   [&] { return sum_rep(false, 1); });
}

std::vector<std::string> GrowthSampler::names() const
{
    std::vector<std::string> n{"P_L", "K_p", "r_p", "nu_p", "sigma_K_o", "sigma_r_o", "sigma_nu"};
    auto sfx = [&](const std::string& base, int c) {
        return C_ == 1 ? base : base + "[" + std::to_string(c) + "]";
    };
    for (int c = 0; c < C_; ++c) {
        n.push_back(sfx("tau_K_p", c));
        n.push_back(sfx("tau_r_p", c));
        n.push_back(sfx("sigma_tau_K", c));
        n.push_back(sfx("sigma_tau_r", c));
    }
    if (interaction_) {
        for (const char* s : {"alpha_1", "beta_1", "sigma_gamma", "sigma_omega"}) n.push_back(s);
    }
    if (variant_ == JhmVariant::Batch)
        for (std::size_t b = 0; b < B_; ++b) {
            n.push_back("kappa[" + batch_names_[b] + "]");
            n.push_back("lambda[" + batch_names_[b] + "]");
        }
    if (variant_ == JhmVariant::Transform) {
        n.push_back("phi");
        n.push_back("chi");
    }
    if (opts_.record_genes)
        for (std::size_t l = 0; l < L_; ++l) {
            n.push_back("K_o_L[" + genes_[l] + "]");
            n.push_back("r_o_L[" + genes_[l] + "]");
            if (interaction_) {
                n.push_back("delta[" + genes_[l] + "]");
                n.push_back("gamma_L[" + genes_[l] + "]");
                n.push_back("omega_L[" + genes_[l] + "]");
            }
        }
    return n;
}

std::vector<double> GrowthSampler::row() const
{
    std::vector<double> v{PL_, Kp_, Rp_, nup_, sigKo_, sigRo_, sigNu_};
    for (int c = 0; c < C_; ++c) {
        v.push_back(tauKp_[c]);
        v.push_back(tauRp_[c]);
        v.push_back(sigTauK_[c]);
        v.push_back(sigTauR_[c]);
    }
    if (interaction_) {
        v.push_back(alpha_);
        v.push_back(beta_);
        v.push_back(sigGam_);
        v.push_back(sigOmg_);
    }
    if (variant_ == JhmVariant::Batch)
        for (std::size_t b = 0; b < B_; ++b) {
            v.push_back(kappa_[b]);
            v.push_back(lambda_[b]);
        }
    if (variant_ == JhmVariant::Transform) {
        v.push_back(phi_);
        v.push_back(chi_);
    }
    if (opts_.record_genes)
        for (std::size_t l = 0; l < L_; ++l) {
            v.push_back(Ko_[l]);
            v.push_back(Ro_[l]);
            if (interaction_) {
                v.push_back(delta_[l]);
                v.push_back(gam_[l]);
                v.push_back(omg_[l]);
            }
        }
    return v;
}

HierarchyFit GrowthSampler::run()
{
    const auto& sch = opts_.schedule;
    if (sch.thin == 0 || sch.samples == 0) throw InvalidParameter("schedule: thin and samples > 0");
    const std::size_t J = reps_.size();
    HierarchyFit fit;
    fit.chain.names = names();
    fit.chain.burn_in = sch.burn_in;
    fit.chain.thin = sch.thin;
    fit.chain.seed = opts_.seed;
    std::vector<double> sumK(J, 0), sumR(J, 0);
    double sumP = 0;
    std::vector<double> sdelta(L_, 0), sgam(L_, 0), somg(L_, 0), sfc(L_, 0), sfq(L_, 0);

    const std::size_t total = sch.burn_in + sch.thin * sch.samples;
    for (std::size_t it = 0; it < total; ++it) {
        adapting_ = it < sch.burn_in;
        sweep();
        if (it < sch.burn_in || (it - sch.burn_in + 1) % sch.thin != 0) continue;
        fit.chain.push_row(row());
        for (std::size_t j = 0; j < J; ++j) {
            sumK[j] += std::exp(kL_[j]);
            sumR[j] += std::exp(rL_[j]);
        }
        const double P = std::exp(PL_);
        sumP += P;
        if (interaction_)
            for (std::size_t l = 0; l < L_; ++l) {
                sdelta[l] += delta_[l];
                sgam[l] += std::exp(delta_[l] * gam_[l]);
                somg[l] += std::exp(delta_[l] * omg_[l]);
                const double kc = std::exp(Ko_[l] / phi_), rc = std::exp(Ro_[l] / chi_);
                const double kq = std::exp((alpha_ + Ko_[l] + delta_[l] * gam_[l]) / phi_);
                const double rq = std::exp((beta_ + Ro_[l] + delta_[l] * omg_[l]) / chi_);
                sfc[l] += fitness({kc, rc, P}).product;
                sfq[l] += fitness({kq, rq, P}).product;
            }
    }
    const double n = static_cast<double>(sch.samples);
    fit.repeat_K.resize(J);
    fit.repeat_r.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
        fit.repeat_K[j] = sumK[j] / n;
        fit.repeat_r[j] = sumR[j] / n;
    }
    fit.P = sumP / n;
    if (interaction_)
        for (std::size_t l = 0; l < L_; ++l) {
            InteractionResult r;
            r.gene = genes_[l];
            r.delta_mean = sdelta[l] / n;
            r.gamma_strength = sgam[l] / n;
            r.omega_strength = somg[l] / n;
            r.control_fitness = sfc[l] / n;
            r.query_fitness = sfq[l] / n;
            r.classification = classify(r.delta_mean, r.omega_strength);
            fit.interactions.push_back(r);
            if (reps_of_[0][l].empty() || reps_of_[1][l].empty()) fit.missing.push_back(genes_[l]);
        }
    return fit;
}

}  // namespace

HierarchyFit fit_shm(const ScreenDataset& screen, const HyperParams& hyper,
                     const HierarchyOptions& opts)
{
    for (const auto& r : screen.repeats)
        if (r.condition != 0) throw DataError("fit_shm expects a single condition");
    GrowthSampler s(screen, hyper, 1, JhmVariant::None, opts);
    return s.run();
}

HierarchyFit fit_jhm(const ScreenDataset& screen, const HyperParams& hyper, JhmVariant variant,
                     const HierarchyOptions& opts)
{
    GrowthSampler s(screen, hyper, 2, variant, opts);
    return s.run();
}

FitnessTable shm_fitnesses(const HierarchyFit& fit, const ScreenDataset& screen)
{
    if (fit.repeat_K.size() != screen.repeats.size())
        throw KeyingError("shm_fitnesses: fit and screen differ in repeat count");
    FitnessTable out;
    for (std::size_t j = 0; j < screen.repeats.size(); ++j)
        out[screen.repeats[j].gene].push_back(
            fitness({fit.repeat_K[j], fit.repeat_r[j], fit.P}).product);
    return out;
}

}  // namespace qfa
