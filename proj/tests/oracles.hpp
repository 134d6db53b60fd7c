#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "qfa/kalman.hpp"
#include "qfa/lna.hpp"

namespace oracle {

// Log-density of the observation vector under the joint Gaussian implied by the
// linear state-space model: Z = mu + L e, y = Z + noise.
inline double joint_gaussian_loglik(const qfa::StateSpaceSpec& spec, const qfa::GrowthCurve& c)
{
    const std::size_t n = c.times.size();
    if (n == 0) return 0.0;
    const bool lg = spec.error == qfa::ErrorKind::LogNormal;
    Eigen::VectorXd mu(n), y(n), xi(n), B(n);
    double prev = qfa::log_scale(spec.kind) ? std::log(spec.params.growth.P)
                                            : spec.params.growth.P;
    double tp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto m = qfa::transition_coeffs(spec.kind, spec.params, tp, c.times[i]);
        mu(i) = m.A + m.B * prev;
        B(i) = m.B;
        xi(i) = m.variance;
        prev = mu(i);
        tp = c.times[i];
        y(i) = lg ? std::log(c.values[i]) : c.values[i];
    }
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double prod = 1.0;
        for (std::size_t i = j; i < n; ++i) {
            if (i > j) prod *= B(i);
            L(i, j) = prod * std::sqrt(xi(j));
        }
    }
    const double nu2 = spec.params.nu * spec.params.nu;
    Eigen::MatrixXd S = L * L.transpose() + nu2 * Eigen::MatrixXd::Identity(n, n);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
    const Eigen::VectorXd d = y - mu;
    const double quad = d.dot(ldlt.solve(d));
    const double logdet = ldlt.vectorD().array().log().sum();
    return -0.5 * (n * std::log(2 * std::numbers::pi) + logdet + quad);
}

}  // namespace oracle

#include <string>
#include <utility>

#include "qfa/diagnostics.hpp"
#include "qfa/distributions.hpp"
#include "qfa/hierarchy.hpp"

namespace oracle {

struct NormalMarginal {
    std::string name;
    double mean;
    double prec;
};

// Population-level prior marginals of the growth hierarchy (one condition unless jhm).
inline std::vector<NormalMarginal> growth_prior_marginals(const qfa::HyperParams& h, bool jhm)
{
    std::vector<NormalMarginal> out{
        {"P_L", h.P_mu, h.eta_P},
        {"K_p", h.K_mu, h.eta_K_p},
        {"r_p", h.r_mu, h.eta_r_p},
        {"nu_p", h.nu_mu, h.eta_nu_p},
        {"sigma_K_o", h.eta_K_o, h.psi_K_o},
        {"sigma_r_o", h.eta_r_o, h.psi_r_o},
        {"sigma_nu", h.eta_nu, h.psi_nu},
    };
    const std::vector<std::string> suffix =
        jhm ? std::vector<std::string>{"[0]", "[1]"} : std::vector<std::string>{""};
    for (const auto& s : suffix) {
        out.push_back({"tau_K_p" + s, h.tau_K_mu, h.eta_tau_K_p});
        out.push_back({"tau_r_p" + s, h.tau_r_mu, h.eta_tau_r_p});
        out.push_back({"sigma_tau_K" + s, h.eta_tau_K, h.psi_tau_K});
        out.push_back({"sigma_tau_r" + s, h.eta_tau_r, h.psi_tau_r});
    }
    if (jhm) {
        out.push_back({"alpha_1", h.alpha_mu, h.eta_alpha});
        out.push_back({"beta_1", h.beta_mu, h.eta_beta});
        out.push_back({"sigma_gamma", h.eta_gamma, h.psi_gamma});
        out.push_back({"sigma_omega", h.eta_omega, h.psi_omega});
    }
    return out;
}

inline std::vector<NormalMarginal> ihm_prior_marginals(const qfa::HyperParams& h)
{
    return {
        {"alpha_1", h.ihm_alpha_mu, h.ihm_eta_alpha},
        {"Z_p", h.ihm_Z_mu, h.ihm_eta_Z_p},
        {"nu_p", h.ihm_nu_mu, h.ihm_eta_nu_p},
        {"sigma_Z", h.ihm_eta_Z, h.ihm_psi_Z},
        {"sigma_nu", h.ihm_eta_nu, h.ihm_psi_nu},
        {"sigma_gamma", h.ihm_eta_gamma, h.ihm_psi_gamma},
    };
}

inline double ks_normal(const std::vector<double>& x, const NormalMarginal& m)
{
    return qfa::ks_test(x, [&](double v) {
               return qfa::norm_cdf((v - m.mean) * std::sqrt(m.prec));
           }).pvalue;
}

}  // namespace oracle
