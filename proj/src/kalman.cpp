#include "qfa/kalman.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qfa/errors.hpp"

namespace qfa {

ErrorKind natural_error(ModelKind kind)
{
    return kind == ModelKind::LNAA ? ErrorKind::Normal : ErrorKind::LogNormal;
}

void validate(const StateSpaceSpec& spec)
{
    if (spec.error != natural_error(spec.kind))
        throw InvalidParameter("state-space spec: " + to_string(spec.kind) + " requires " +
                               to_string(natural_error(spec.kind)) + " measurement error");
    if (!(spec.params.nu >= 0) || !std::isfinite(spec.params.nu))
        throw InvalidParameter("state-space spec: nu must be finite and >= 0");
}

FilterState filter_init(const StateSpaceSpec& spec)
{
    FilterState s;
    s.m = log_scale(spec.kind) ? std::log(spec.params.growth.P) : spec.params.growth.P;
    return s;
}

FilterState filter_step(const StateSpaceSpec& spec, const FilterState& s, double t, double y,
                        std::size_t index)
{
    double obs = y;
    if (spec.error == ErrorKind::LogNormal) {
        if (!(y > 0))
            throw DomainError("non-positive observation at index " + std::to_string(index) +
                                  " under log-normal error",
                              index);
        obs = std::log(y);
    }
    const auto tm = transition_coeffs(spec.kind, spec.params, s.t, t);
    const double a = tm.A + tm.B * s.m;
    const double R = tm.B * tm.B * s.C + tm.variance;
    const double nu2 = spec.params.nu * spec.params.nu;
    const double S = R + nu2;
    const double e = obs - a;

    FilterState n;
    n.t = t;
    if (S > 0) {
        n.loglik = s.loglik - 0.5 * (std::log(2.0 * std::numbers::pi * S) + e * e / S);
        const double gain = R / S;
        n.m = a + gain * e;
        n.C = R * nu2 / S;
    } else {
        n.loglik = e == 0.0 ? s.loglik : -std::numeric_limits<double>::infinity();
        n.m = obs;
        n.C = 0.0;
    }
    return n;
}

FilterState run_filter(const StateSpaceSpec& spec, const GrowthCurve& curve,
                       const FilterState& start)
{
    validate(spec);
    FilterState s = start;
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        if (curve.times[i] < s.t || (i > 0 && !(curve.times[i] > curve.times[i - 1])))
            throw DataError("kalman: observation times must be strictly increasing");
        s = filter_step(spec, s, curve.times[i], curve.values[i], i);
    }
    return s;
}

double marginal_loglik(const StateSpaceSpec& spec, const GrowthCurve& curve)
{
    if (curve.times.empty()) return 0.0;
    return run_filter(spec, curve, filter_init(spec)).loglik;
}

std::vector<FilterState> filter_states(const StateSpaceSpec& spec, const GrowthCurve& curve)
{
    validate(spec);
    std::vector<FilterState> out;
    out.reserve(curve.times.size());
    FilterState s = filter_init(spec);
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        if (i > 0 && !(curve.times[i] > curve.times[i - 1]))
            throw DataError("kalman: observation times must be strictly increasing");
        s = filter_step(spec, s, curve.times[i], curve.values[i], i);
        out.push_back(s);
    }
    return out;
}

}  // namespace qfa
