#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qfa/baseline.hpp"
#include "qfa/chain.hpp"
#include "qfa/growth.hpp"
#include "qfa/screen.hpp"

namespace qfa {

// Fixed prior hyper-parameters. Every "Normal" pair is (mean, precision).
struct HyperParams {
    // growth hierarchy (SHM and JHM)
    double tau_K_mu = 2.20064039227566;
    double eta_tau_K_p = 0.0239817523340161;
    double eta_K_o = -0.79421175992029;
    double psi_K_o = 0.610871036009521;
    double tau_r_mu = 3.64993037268256;
    double eta_tau_r_p = 0.0188443648965434;
    double eta_r_o = 0.468382435659566;
    double psi_r_o = 0.0985295312016232;
    double eta_nu = -0.834166609695065;
    double psi_nu = 0.855886535578262;
    double K_mu = -2.01259579112252;
    double eta_K_p = 0.032182397822033;
    double r_mu = 0.97398228941848;
    double eta_r_p = 0.133208648543871;
    double nu_mu = 19.8220570630669;
    double eta_nu_p = 0.0174869367984725;
    double P_mu = -9.03928728018792;
    double eta_P = 0.469209463148874;
    double eta_tau_K = 2.20064039227566;
    double psi_tau_K = 0.0239817523340161;
    double eta_tau_r = 3.64993037268256;
    double psi_tau_r = 0.0188443648965434;
    // interaction terms (JHM)
    double alpha_mu = 0.0;
    double eta_alpha = 0.25;
    double beta_mu = 0.0;
    double eta_beta = 0.25;
    double p = 0.05;
    double eta_gamma = -0.79421175992029;
    double psi_gamma = 0.610871036009521;
    double eta_omega = 0.468382435659566;
    double psi_omega = 0.0985295312016232;
    // IHM
    double ihm_Z_mu = 3.65544229414228;
    double ihm_eta_Z_p = 0.697331530063874;
    double ihm_eta_Z = 0.104929506383255;
    double ihm_psi_Z = 0.417096744759774;
    double ihm_eta_nu = 0.101545024587153;
    double ihm_psi_nu = 2.45077729037385;
    double ihm_nu_mu = 2.60267545154548;
    double ihm_eta_nu_p = 0.0503202367841729;
    double ihm_alpha_mu = 0.0;
    double ihm_eta_alpha = 0.309096075088720;
    double ihm_p = 0.05;
    double ihm_eta_gamma = 0.104929506383255;
    double ihm_psi_gamma = 0.417096744759774;
    // batch and transformation variants
    double kappa_p = 0.0;
    double eta_kappa = 1.166666666666;
    double lambda_p = 0.0;
    double eta_lambda = 1.166666666666;
    double phi_shape = 100.0;
    double phi_scale = 0.01;
    double chi_shape = 100.0;
    double chi_scale = 0.01;

    void set(const std::string& key, double value);
    double get(const std::string& key) const;
    std::map<std::string, double> to_map() const;
    void validate() const;
};

enum class JhmVariant { None, Batch, Transform };

struct HierarchyOptions {
    Schedule schedule{20000, 20, 1000};
    AdaptConfig adapt;
    std::uint64_t seed = 1;
    bool record_genes = true;
    // Holds phi = chi = 1 in the transform variant.
    bool fix_transform = false;
};

Schedule desk_hierarchy_schedule();
Schedule paper_hierarchy_schedule();

struct InteractionResult {
    std::string gene;
    double delta_mean = 0.0;
    double gamma_strength = 1.0;
    double omega_strength = 1.0;
    double control_fitness = 0.0;
    double query_fitness = 0.0;
    std::string classification = "none";
};

struct HierarchyFit {
    Chain chain;
    std::vector<double> repeat_K;  // posterior means per repeat, dataset order
    std::vector<double> repeat_r;
    double P = 0.0;
    std::vector<InteractionResult> interactions;  // JHM only
    std::vector<std::string> missing;             // genes without data in some condition
};


HierarchyFit fit_shm(const ScreenDataset& screen, const HyperParams& hyper,
                     const HierarchyOptions& opts);

// Per-repeat fitnesses from posterior means (K, r, P), keyed by gene.
FitnessTable shm_fitnesses(const HierarchyFit& fit, const ScreenDataset& screen);

struct IhmOptions {
    Schedule schedule{20000, 20, 1000};
    AdaptConfig adapt;
    std::uint64_t seed = 1;
    // Genes lacking repeats in either condition are skipped and reported.
    bool skip_incomplete = true;
};

struct IhmFit {
    Chain chain;
    std::vector<InteractionResult> interactions;
    std::vector<std::string> missing;
};

IhmFit fit_ihm(const FitnessTable& control, const FitnessTable& query, const HyperParams& hyper,
               const IhmOptions& opts);

HierarchyFit fit_jhm(const ScreenDataset& screen, const HyperParams& hyper, JhmVariant variant,
                     const HierarchyOptions& opts);

struct PlantedEffect {
    std::string gene;
    double gamma = 0.0;  // log multiplicative effect on K in the query condition
    double omega = 0.0;  // log multiplicative effect on r
};

struct GeneratorConfig {
    std::size_t genes = 50;
    std::size_t repeats = 4;
    std::size_t timepoints = 10;
    double t_max = 6.0;
    double K_location = 0.0;  // 0 selects exp(K_mu)
    double r_location = 0.0;  // 0 selects exp(r_mu)
    double P = 0.0;           // 0 selects exp(P_mu)
    double gene_K_scale = 0.02;
    double gene_r_scale = 0.3;
    double alpha = -0.1;
    double beta = -0.05;
    double repeat_K_sd = 0.1;
    double repeat_r_sd = 0.1;
    double noise_sd = 0.005;
    std::size_t batches = 0;  // 0 disables batch labels
    double batch_sd = 0.0;
};

struct GeneratedScreen {
    ScreenDataset data;
    std::map<std::string, bool> truth;
    std::map<std::string, PlantedEffect> effects;
};

GeneratedScreen generate_screen(const HyperParams& hyper, const GeneratorConfig& cfg,
                                const std::vector<PlantedEffect>& planted, std::uint64_t seed);

// The desk preset plants n_planted genes at fold strength (half up, half down).
std::vector<PlantedEffect> fold_plants(std::size_t genes, std::size_t n_planted, double fold);

std::string classify(double delta_mean, double strength);

}  // namespace qfa
