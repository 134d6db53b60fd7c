#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qfa/growth.hpp"

namespace qfa {

struct SdeParams {
    LogisticParams growth;
    double sigma = 0.0;
    double nu = 0.0;
};

enum class SdeKind { SLGM, DemographicSqrt, DemographicSym };
enum class ErrorKind { Normal, LogNormal };

std::string to_string(SdeKind k);
std::string to_string(ErrorKind k);
SdeKind parse_sde_kind(const std::string& s);
ErrorKind parse_error_kind(const std::string& s);

struct Trajectory {
    std::vector<double> times;
    std::vector<double> values;
    std::uint64_t seed = 0;
};

struct GrowthCurve {
    std::vector<double> times;
    std::vector<double> values;
};

// Grid points at which the state is reported. The path starts from X = P at t = 0;
// a leading interval [0, grid[0]] is simulated when grid[0] > 0.
Trajectory euler_maruyama(const SdeParams& params, SdeKind kind, const std::vector<double>& grid,
                          int substeps, std::uint64_t seed);

// Same scheme with a fixed number of steps per unit time (at least one per interval).
Trajectory euler_maruyama_fine(const SdeParams& params, SdeKind kind,
                               const std::vector<double>& grid, double steps_per_unit,
                               std::uint64_t seed);

GrowthCurve observe(const Trajectory& traj, ErrorKind error_kind, double nu, std::uint64_t seed);

// |y| with zeros lifted to floor; lets Normal-error data feed log-scale models.
GrowthCurve make_positive(const GrowthCurve& curve, double floor = 1e-12);

std::vector<double> uniform_grid(double t0, double t1, std::size_t n);

}  // namespace qfa
