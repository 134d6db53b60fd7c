#include "qfa/sde.hpp"

#include <cmath>

#include "qfa/errors.hpp"
#include "qfa/random.hpp"

namespace qfa {

std::string to_string(SdeKind k)
{
    switch (k) {
    case SdeKind::SLGM: return "slgm";
    case SdeKind::DemographicSqrt: return "demographic-sqrt";
    case SdeKind::DemographicSym: return "demographic-sym";
    }
    return "?";
}

std::string to_string(ErrorKind k)
{
    return k == ErrorKind::Normal ? "normal" : "lognormal";
}

SdeKind parse_sde_kind(const std::string& s)
{
    if (s == "slgm") return SdeKind::SLGM;
    if (s == "demographic-sqrt") return SdeKind::DemographicSqrt;
    if (s == "demographic-sym") return SdeKind::DemographicSym;
    throw UsageError("unknown sde kind: " + s);
}

ErrorKind parse_error_kind(const std::string& s)
{
    if (s == "normal") return ErrorKind::Normal;
    if (s == "lognormal") return ErrorKind::LogNormal;
    throw UsageError("unknown error kind: " + s);
}

namespace {

constexpr double kDivergence = 1e12;
constexpr double kFloor = 1e-12;

template <class StepsFor>
Trajectory run_em(const SdeParams& p, SdeKind kind, const std::vector<double>& grid,
                  StepsFor steps_for, std::uint64_t seed)
{
    if (grid.empty()) throw InvalidParameter("euler_maruyama: empty grid");
    if (grid.front() < 0.0) throw InvalidParameter("euler_maruyama: negative time");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw InvalidParameter("euler_maruyama: grid not strictly increasing");
    const double K = p.growth.K, r = p.growth.r, P = p.growth.P, s = p.sigma;
    if (!(K > 0) || !(P > 0) || !(r >= 0) || !(s >= 0))
        throw InvalidParameter("euler_maruyama: invalid parameters");

    Rng rng(seed);
    Trajectory out;
    out.seed = seed;
    out.times = grid;
    out.values.reserve(grid.size());

    const bool logspace = kind == SdeKind::SLGM;
    double x = logspace ? std::log(P) : P;
    const double drift0 = r - 0.5 * s * s;

    auto advance = [&](double dt, int n, std::size_t interval) {
        const double h = dt / n;
        const double sh = std::sqrt(h);
        for (int k = 0; k < n; ++k) {
            const double dw = sh * rng.normal();
            if (logspace) {
                x += (drift0 - (r / K) * std::exp(x)) * h + s * dw;
            } else {
                const double f = r * x * (1.0 - x / K);
                const double g = kind == SdeKind::DemographicSqrt
                                     ? std::sqrt(r * x)
                                     : std::sqrt(r * x * (1.0 + x / K));
                x += f * h + s * g * dw;
                if (x < kFloor) x = 2.0 * kFloor - x;
                if (x < kFloor) x = kFloor;
            }
            const double v = logspace ? std::exp(x) : x;
            if (!std::isfinite(x) || v > kDivergence)
                throw SimulationDiverged("simulation diverged in interval " +
                                             std::to_string(interval),
                                         interval);
        }
    };

    double t = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double dt = grid[i] - t;
        if (dt > 0.0) advance(dt, steps_for(dt), i);
        t = grid[i];
        out.values.push_back(logspace ? std::exp(x) : x);
    }
    return out;
}

}  // namespace

Trajectory euler_maruyama(const SdeParams& params, SdeKind kind, const std::vector<double>& grid,
                          int substeps, std::uint64_t seed)
{
    if (substeps < 1) throw InvalidParameter("euler_maruyama: substeps must be >= 1");
    return run_em(params, kind, grid, [substeps](double) { return substeps; }, seed);
}

Trajectory euler_maruyama_fine(const SdeParams& params, SdeKind kind,
                               const std::vector<double>& grid, double steps_per_unit,
                               std::uint64_t seed)
{
    if (!(steps_per_unit > 0)) throw InvalidParameter("euler_maruyama: steps_per_unit <= 0");
    return run_em(
        params, kind, grid,
        [steps_per_unit](double dt) {
            return std::max(1, static_cast<int>(std::ceil(dt * steps_per_unit - 1e-9)));
        },
        seed);
}

GrowthCurve observe(const Trajectory& traj, ErrorKind error_kind, double nu, std::uint64_t seed)
{
    Rng rng(seed);
    GrowthCurve c;
    c.times = traj.times;
    c.values.reserve(traj.values.size());
    for (double x : traj.values) {
        const double e = nu * rng.normal();
        c.values.push_back(error_kind == ErrorKind::Normal ? x + e : x * std::exp(e));
    }
    return c;
}

GrowthCurve make_positive(const GrowthCurve& curve, double floor)
{
    GrowthCurve c = curve;
    for (double& v : c.values) {
        v = std::fabs(v);
        if (v < floor) v = floor;
    }
    return c;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t n)
{
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = t0;
        return g;
    }
    for (std::size_t i = 0; i < n; ++i)
        g[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

}  // namespace qfa
