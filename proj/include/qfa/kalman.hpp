#pragma once

#include <vector>

#include "qfa/lna.hpp"
#include "qfa/sde.hpp"

namespace qfa {

struct StateSpaceSpec {
    ModelKind kind = ModelKind::LNAA;
    ErrorKind error = ErrorKind::Normal;
    SdeParams params;
};

// RRTR/LNAM pair with LogNormal error, LNAA with Normal error.
ErrorKind natural_error(ModelKind kind);
void validate(const StateSpaceSpec& spec);

struct FilterState {
    double m = 0.0;
    double C = 0.0;
    double loglik = 0.0;
    double t = 0.0;
};

FilterState filter_init(const StateSpaceSpec& spec);

// One predict/accumulate/update cycle for an observation y at time t.
FilterState filter_step(const StateSpaceSpec& spec, const FilterState& s, double t, double y,
                        std::size_t index = 0);

double marginal_loglik(const StateSpaceSpec& spec, const GrowthCurve& curve);

// Continues from an existing filter state; loglik accumulates onto start.loglik.
FilterState run_filter(const StateSpaceSpec& spec, const GrowthCurve& curve,
                       const FilterState& start);

std::vector<FilterState> filter_states(const StateSpaceSpec& spec, const GrowthCurve& curve);

}  // namespace qfa
