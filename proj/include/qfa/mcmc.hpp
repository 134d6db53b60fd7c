#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "qfa/chain.hpp"
#include "qfa/lna.hpp"
#include "qfa/sde.hpp"

namespace qfa {

struct NormalPrior {
    double mean = 0.0;
    double prec = 1.0;
};

// Normal priors on log K, log r, log P, log sigma^-2, log nu^-2.
struct SdePriors {
    NormalPrior log_K{std::log(0.1), 2.0};
    NormalPrior log_r{std::log(3.0), 5.0};
    NormalPrior log_P{std::log(1e-4), 0.1};
    NormalPrior log_sigma_prec{std::log(100.0), 0.1};
    NormalPrior log_nu_prec{std::log(10000.0), 0.1};
    double log_sigma_prec_lower = 1.0;
};

Schedule desk_sde_schedule();
Schedule paper_sde_schedule();

struct SdeFitOptions {
    ModelKind kind = ModelKind::LNAA;
    ErrorKind error = ErrorKind::Normal;
    SdePriors priors;
    Schedule schedule = desk_sde_schedule();
    AdaptConfig adapt;
    int sigma_nu_subiters = 3;
    std::uint64_t seed = 1;
    std::optional<SdeParams> init;
};

// Chain columns: K, r, P, sigma, nu.
Chain fit_sde(const GrowthCurve& curve, const SdeFitOptions& opts);

struct ExactFitOptions {
    ErrorKind error = ErrorKind::Normal;
    SdePriors priors;
    Schedule schedule = desk_sde_schedule();
    AdaptConfig adapt;
    int imputed_per_interval = 15;
    int sigma_nu_subiters = 3;
    std::uint64_t seed = 1;
    std::optional<SdeParams> init;
    // Parameters held at their initial values (names from the chain columns).
    std::vector<std::string> fixed;
};

// Data augmentation over the Euler-Maruyama latent log-path of the SLGM.
Chain fit_sde_exact(const GrowthCurve& curve, const ExactFitOptions& opts);

}  // namespace qfa
