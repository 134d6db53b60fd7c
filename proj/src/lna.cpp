#include "qfa/lna.hpp"

#include <cmath>

#include "qfa/errors.hpp"
#include "qfa/random.hpp"

namespace qfa {

std::string to_string(ModelKind k)
{
    switch (k) {
    case ModelKind::RRTR: return "rrtr";
    case ModelKind::LNAM: return "lnam";
    case ModelKind::LNAA: return "lnaa";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& s)
{
    if (s == "rrtr" || s == "RRTR") return ModelKind::RRTR;
    if (s == "lnam" || s == "LNAM") return ModelKind::LNAM;
    if (s == "lnaa" || s == "LNAA") return ModelKind::LNAA;
    throw UsageError("unknown model kind: " + s);
}

bool log_scale(ModelKind k) { return k != ModelKind::LNAA; }

namespace {

void check(const SdeParams& p)
{
    const auto& g = p.growth;
    if (!std::isfinite(g.K) || !std::isfinite(g.r) || !std::isfinite(g.P) ||
        !std::isfinite(p.sigma) || !(g.K > 0) || !(g.r > 0) || !(g.P > 0) || p.sigma < 0)
        throw InvalidParameter("lna: invalid parameters");
}

double lnam_rate(const SdeParams& p)
{
    const double a = p.growth.r - 0.5 * p.sigma * p.sigma;
    if (!(a > 0))
        throw InvalidRegime("lnam: sigma^2 >= 2r, drift rate a = r - sigma^2/2 is not positive");
    return a;
}

// [-expm1(-2ad) + 4Q e^{-at} (-expm1(-ad)) + 2aQ^2 d e^{-2at}] / (2a)
double ou_integral(double a, double Q, double t, double d)
{
    const double et = std::exp(-a * t);
    return (-std::expm1(-2.0 * a * d) + 4.0 * Q * et * (-std::expm1(-a * d)) +
            2.0 * a * Q * Q * d * et * et) /
           (2.0 * a);
}

}  // namespace

double det_skeleton(ModelKind kind, const SdeParams& params, double t)
{
    check(params);
    const auto& g = params.growth;
    if (kind == ModelKind::LNAM) {
        const double a = lnam_rate(params);
        const double b = g.r / g.K;
        const double Q = (a / b) / g.P - 1.0;
        return std::log(a / b) - std::log1p(Q * std::exp(-a * t));
    }
    const double x = logistic_fast(g.K, g.r, g.P, t);
    return kind == ModelKind::RRTR ? std::log(x) : x;
}

TransitionMoments transition_coeffs(ModelKind kind, const SdeParams& params, double t_prev,
                                    double t)
{
    check(params);
    if (t < t_prev || t_prev < 0) throw InvalidParameter("transition: need t >= t_prev >= 0");
    const auto& g = params.growth;
    const double s2 = params.sigma * params.sigma;
    const double d = t - t_prev;
    TransitionMoments m;
    switch (kind) {
    case ModelKind::RRTR: {
        const double Q = g.K / g.P - 1.0;
        m.B = 1.0;
        m.A = std::log1p(Q * std::exp(-g.r * t_prev)) - std::log1p(Q * std::exp(-g.r * t)) -
              0.5 * s2 * d;
        m.variance = s2 * d;
        break;
    }
    case ModelKind::LNAM: {
        const double a = lnam_rate(params);
        const double b = g.r / g.K;
        const double Q = (a / b) / g.P - 1.0;
        const double ep = std::exp(-a * t_prev), et = std::exp(-a * t);
        const double lab = std::log(a / b);
        const double vp = lab - std::log1p(Q * ep);
        const double vt = lab - std::log1p(Q * et);
        const double den = 1.0 + Q * et;
        m.B = std::exp(-a * d) * (1.0 + Q * ep) / den;
        m.A = vt - m.B * vp;
        m.variance = s2 * ou_integral(a, Q, t, d) / (den * den);
        break;
    }
    case ModelKind::LNAA: {
        const double a = g.r;
        const double Q = g.K / g.P - 1.0;
        const double ep = std::exp(-a * t_prev), et = std::exp(-a * t);
        const double vp = g.K / (1.0 + Q * ep);
        const double vt = g.K / (1.0 + Q * et);
        const double ratio = (1.0 + Q * ep) / (1.0 + Q * et);
        m.B = std::exp(-a * d) * ratio * ratio;
        m.A = vt - m.B * vp;
        const double den = 1.0 + Q * et;
        const double den2 = den * den;
        m.variance = s2 * g.K * g.K * ou_integral(a, Q, t, d) / (den2 * den2);
        break;
    }
    }
    if (d == 0.0) {
        m.A = 0.0;
        m.B = 1.0;
        m.variance = 0.0;
    }
    if (m.variance < 0.0 || !std::isfinite(m.variance)) {
        m.clamped = true;
        m.variance = std::isfinite(m.variance) ? 0.0 : m.variance;
    }
    return m;
}

TransitionMoments transition(ModelKind kind, const SdeParams& params, double prev_state,
                             double t_prev, double t)
{
    TransitionMoments m = transition_coeffs(kind, params, t_prev, t);
    m.mean = m.A + m.B * prev_state;
    return m;
}

Trajectory simulate_approx(ModelKind kind, const SdeParams& params,
                           const std::vector<double>& grid, std::uint64_t seed)
{
    if (grid.empty()) throw InvalidParameter("simulate_approx: empty grid");
    Rng rng(seed);
    Trajectory out;
    out.seed = seed;
    out.times = grid;
    const bool lg = log_scale(kind);
    double x = det_skeleton(kind, params, grid[0]);
    out.values.push_back(lg ? std::exp(x) : x);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const auto m = transition(kind, params, x, grid[i - 1], grid[i]);
        x = m.mean + std::sqrt(m.variance) * rng.normal();
        out.values.push_back(lg ? std::exp(x) : x);
    }
    return out;
}

}  // namespace qfa
