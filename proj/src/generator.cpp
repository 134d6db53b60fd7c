#include <cmath>
#include <cstdio>

#include "qfa/distributions.hpp"
#include "qfa/errors.hpp"
#include "qfa/hierarchy.hpp"
#include "qfa/random.hpp"

namespace qfa {

namespace {

std::string gene_name(std::size_t l)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "G%04zu", l + 1);
    return buf;
}

}  // namespace

std::vector<PlantedEffect> fold_plants(std::size_t genes, std::size_t n_planted, double fold)
{
    if (n_planted > genes) throw InvalidParameter("fold_plants: more plants than genes");
    std::vector<PlantedEffect> out;
    for (std::size_t i = 0; i < n_planted; ++i) {
        const std::size_t l = i * genes / n_planted;
        const double s = (i % 2 == 0 ? 1.0 : -1.0) * std::log(fold);
        out.push_back({gene_name(l), s, s});
    }
    return out;
}

GeneratedScreen generate_screen(const HyperParams& hyper, const GeneratorConfig& cfg,
                                const std::vector<PlantedEffect>& planted, std::uint64_t seed)
{
    if (cfg.genes == 0 || cfg.repeats == 0 || cfg.timepoints == 0)
        throw InvalidParameter("generate_screen: dimensions must be positive");
    GeneratedScreen out;
    auto& ds = out.data;
    for (std::size_t l = 0; l < cfg.genes; ++l) {
        ds.genes.push_back(gene_name(l));
        out.truth[ds.genes.back()] = false;
    }
    for (const auto& p : planted) {
        if (!out.truth.count(p.gene)) throw KeyingError("generate_screen: planted gene " + p.gene + " not in screen");
        out.truth[p.gene] = true;
        out.effects[p.gene] = p;
    }

    const double Kloc = cfg.K_location > 0 ? cfg.K_location : std::exp(hyper.K_mu);
    const double rloc = cfg.r_location > 0 ? cfg.r_location : std::exp(hyper.r_mu);
    const double P = cfg.P > 0 ? cfg.P : std::exp(hyper.P_mu);
    std::vector<double> times(cfg.timepoints);
    for (std::size_t n = 0; n < cfg.timepoints; ++n)
        times[n] = cfg.t_max * static_cast<double>(n + 1) / static_cast<double>(cfg.timepoints);

    Rng rng(derive_seed(seed, "generate_screen"));
    std::vector<double> kappa(cfg.batches), lambda(cfg.batches);
    for (std::size_t b = 0; b < cfg.batches; ++b) {
        kappa[b] = rng.normal(0.0, cfg.batch_sd);
        lambda[b] = rng.normal(0.0, cfg.batch_sd);
    }

    for (std::size_t l = 0; l < cfg.genes; ++l) {
        const std::string& g = ds.genes[l];
        const double Ko = draw_positive_t3(rng, Kloc, 1.0 / (cfg.gene_K_scale * cfg.gene_K_scale));
        const double Ro = draw_positive_t3(rng, rloc, 1.0 / (cfg.gene_r_scale * cfg.gene_r_scale));
        const auto eff = out.effects.find(g);
        for (int c = 0; c < 2; ++c)
            for (std::size_t m = 0; m < cfg.repeats; ++m) {
                RepeatSeries rep;
                rep.gene = g;
                rep.condition = c;
                rep.id = std::to_string(m + 1);
                double muK = (c == 1 ? cfg.alpha : 0.0) + std::log(Ko);
                double muR = (c == 1 ? cfg.beta : 0.0) + std::log(Ro);
                if (c == 1 && eff != out.effects.end()) {
                    muK += eff->second.gamma;
                    muR += eff->second.omega;
                }
                if (cfg.batches > 0) {
                    const std::size_t b = m % cfg.batches;
                    rep.batch = "plate" + std::to_string(b + 1);
                    muK += kappa[b];
                    muR += lambda[b];
                }
                const double K = std::exp(draw_normal_below(rng, muK, 1.0 / (cfg.repeat_K_sd * cfg.repeat_K_sd), 0.0));
                const double r = std::exp(draw_normal_below(rng, muR, 1.0 / (cfg.repeat_r_sd * cfg.repeat_r_sd), 3.5));
                rep.times = times;
                for (double t : times)
                    rep.values.push_back(logistic_fast(K, r, P, t) + cfg.noise_sd * rng.normal());
                ds.repeats.push_back(std::move(rep));
            }
    }
    return out;
}

}  // namespace qfa
