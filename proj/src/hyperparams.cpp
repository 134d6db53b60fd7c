#include <cmath>

#include "qfa/errors.hpp"
#include "qfa/hierarchy.hpp"

namespace qfa {

namespace {

using Field = double HyperParams::*;

const std::map<std::string, Field>& fields()
{
    static const std::map<std::string, Field> f{
        {"tau_K_mu", &HyperParams::tau_K_mu},
        {"eta_tau_K_p", &HyperParams::eta_tau_K_p},
        {"eta_K_o", &HyperParams::eta_K_o},
        {"psi_K_o", &HyperParams::psi_K_o},
        {"tau_r_mu", &HyperParams::tau_r_mu},
        {"eta_tau_r_p", &HyperParams::eta_tau_r_p},
        {"eta_r_o", &HyperParams::eta_r_o},
        {"psi_r_o", &HyperParams::psi_r_o},
        {"eta_nu", &HyperParams::eta_nu},
        {"psi_nu", &HyperParams::psi_nu},
        {"K_mu", &HyperParams::K_mu},
        {"eta_K_p", &HyperParams::eta_K_p},
        {"r_mu", &HyperParams::r_mu},
        {"eta_r_p", &HyperParams::eta_r_p},
        {"nu_mu", &HyperParams::nu_mu},
        {"eta_nu_p", &HyperParams::eta_nu_p},
        {"P_mu", &HyperParams::P_mu},
        {"eta_P", &HyperParams::eta_P},
        {"eta_tau_K", &HyperParams::eta_tau_K},
        {"psi_tau_K", &HyperParams::psi_tau_K},
        {"eta_tau_r", &HyperParams::eta_tau_r},
        {"psi_tau_r", &HyperParams::psi_tau_r},
        {"alpha_mu", &HyperParams::alpha_mu},
        {"eta_alpha", &HyperParams::eta_alpha},
        {"beta_mu", &HyperParams::beta_mu},
        {"eta_beta", &HyperParams::eta_beta},
        {"p", &HyperParams::p},
        {"eta_gamma", &HyperParams::eta_gamma},
        {"psi_gamma", &HyperParams::psi_gamma},
        {"eta_omega", &HyperParams::eta_omega},
        {"psi_omega", &HyperParams::psi_omega},
        {"ihm.Z_mu", &HyperParams::ihm_Z_mu},
        {"ihm.eta_Z_p", &HyperParams::ihm_eta_Z_p},
        {"ihm.eta_Z", &HyperParams::ihm_eta_Z},
        {"ihm.psi_Z", &HyperParams::ihm_psi_Z},
        {"ihm.eta_nu", &HyperParams::ihm_eta_nu},
        {"ihm.psi_nu", &HyperParams::ihm_psi_nu},
        {"ihm.nu_mu", &HyperParams::ihm_nu_mu},
        {"ihm.eta_nu_p", &HyperParams::ihm_eta_nu_p},
        {"ihm.alpha_mu", &HyperParams::ihm_alpha_mu},
        {"ihm.eta_alpha", &HyperParams::ihm_eta_alpha},
        {"ihm.p", &HyperParams::ihm_p},
        {"ihm.eta_gamma", &HyperParams::ihm_eta_gamma},
        {"ihm.psi_gamma", &HyperParams::ihm_psi_gamma},
        {"kappa_p", &HyperParams::kappa_p},
        {"eta_kappa", &HyperParams::eta_kappa},
        {"lambda_p", &HyperParams::lambda_p},
        {"eta_lambda", &HyperParams::eta_lambda},
        {"phi_shape", &HyperParams::phi_shape},
        {"phi_scale", &HyperParams::phi_scale},
        {"chi_shape", &HyperParams::chi_shape},
        {"chi_scale", &HyperParams::chi_scale},
    };
    return f;
}

}  // namespace

void HyperParams::set(const std::string& key, double value)
{
    auto it = fields().find(key);
    if (it == fields().end()) throw UsageError("unknown hyper-parameter " + key);
    this->*(it->second) = value;
}

double HyperParams::get(const std::string& key) const
{
    auto it = fields().find(key);
    if (it == fields().end()) throw UsageError("unknown hyper-parameter " + key);
    return this->*(it->second);
}

std::map<std::string, double> HyperParams::to_map() const
{
    std::map<std::string, double> m;
    for (const auto& [k, f] : fields()) m[k] = this->*f;
    return m;
}

void HyperParams::validate() const
{
    for (const auto& [k, f] : fields())
        if (!std::isfinite(this->*f)) throw UsageError("hyper-parameter " + k + " is not finite");
    if (!(p > 0 && p < 1) || !(ihm_p > 0 && ihm_p < 1))
        throw UsageError("hyper-parameter p must lie in (0,1)");
    for (const char* k : {"eta_tau_K_p", "psi_K_o", "eta_tau_r_p", "psi_r_o", "psi_nu", "eta_K_p",
                          "eta_r_p", "eta_nu_p", "eta_P", "psi_tau_K", "psi_tau_r", "eta_alpha",
                          "eta_beta", "psi_gamma", "psi_omega", "ihm.eta_Z_p", "ihm.psi_Z",
                          "ihm.psi_nu", "ihm.eta_nu_p", "ihm.eta_alpha", "ihm.psi_gamma",
                          "eta_kappa", "eta_lambda", "phi_shape", "phi_scale", "chi_shape",
                          "chi_scale"})
        if (!(get(k) > 0)) throw UsageError(std::string("hyper-parameter ") + k + " must be > 0");
}

}  // namespace qfa
