#include "qfa/growth.hpp"

#include <cmath>

#include "qfa/errors.hpp"

namespace qfa {

namespace {
constexpr double kRewriteThreshold = 30.0;
}

double logistic_fast(double K, double r, double P, double t)
{
    const double rt = r * t;
    if (rt > kRewriteThreshold) {
        const double e = std::exp(-rt);
        return K * P / (K * e + P * (1.0 - e));
    }
    const double g = std::expm1(rt);
    return K * P * (g + 1.0) / (K + P * g);
}

double logistic_solution(const LogisticParams& p, double t)
{
    if (!std::isfinite(p.K) || !std::isfinite(p.r) || !std::isfinite(p.P) || !std::isfinite(t))
        throw InvalidParameter("logistic_solution: non-finite parameter");
    return logistic_fast(p.K, p.r, p.P, t);
}

FitnessScore fitness(const LogisticParams& p)
{
    FitnessScore f;
    if (!(p.K > 0.0) || !(p.P > 0.0) || !std::isfinite(p.K) || !std::isfinite(p.P) ||
        !std::isfinite(p.r)) {
        f.dead = true;
        return f;
    }
    f.mdp = p.K > p.P ? std::log2(p.K / p.P) : 0.0;
    if (p.K <= 2.0 * p.P) {
        f.dead = true;
        return f;
    }
    if (p.r <= 0.0) return f;
    f.mdr = p.r / std::log(2.0 * (p.K - p.P) / (p.K - 2.0 * p.P));
    f.product = f.mdr * f.mdp;
    return f;
}

}  // namespace qfa
