#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qfa/sde.hpp"

namespace qfa {

enum class ModelKind { RRTR, LNAM, LNAA };

std::string to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

// RRTR and LNAM live on the log-density scale, LNAA on the density scale.
bool log_scale(ModelKind k);

struct TransitionMoments {
    double mean = 0.0;
    double variance = 0.0;
    double A = 0.0;
    double B = 1.0;
    bool clamped = false;
};

// Deterministic path on the model state scale (log density for RRTR and LNAM).
double det_skeleton(ModelKind kind, const SdeParams& params, double t);

TransitionMoments transition(ModelKind kind, const SdeParams& params, double prev_state,
                             double t_prev, double t);

// Affine part only; prev_state enters through mean = A + B * prev.
TransitionMoments transition_coeffs(ModelKind kind, const SdeParams& params, double t_prev,
                                    double t);

// Samples a path by exact draws from the Gaussian transitions, starting at the skeleton value
// at grid[0]. Values are reported on the density scale.
Trajectory simulate_approx(ModelKind kind, const SdeParams& params,
                           const std::vector<double>& grid, std::uint64_t seed);

}  // namespace qfa
