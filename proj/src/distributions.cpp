#include "qfa/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qfa/random.hpp"

namespace qfa {

namespace {
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
const double kLogT3Norm = std::log(2.0 / (std::numbers::pi * std::sqrt(3.0)));
}

double norm_logpdf_prec(double x, double mean, double prec)
{
    const double d = x - mean;
    return 0.5 * std::log(prec) - kLogSqrt2Pi - 0.5 * prec * d * d;
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double norm_logcdf(double z)
{
    if (z > -20.0) return std::log(norm_cdf(z));
    // asymptotic Mills ratio
    const double z2 = z * z;
    return -0.5 * z2 - std::log(-z) - kLogSqrt2Pi +
           std::log1p(-1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2));
}

double t3_cdf(double u)
{
    const double s3 = std::sqrt(3.0);
    if (u < 0) return 1.0 - t3_cdf(-u);
    return 0.5 + (u / (s3 * (1.0 + u * u / 3.0)) + std::atan(u / s3)) / std::numbers::pi;
}

double t3_logpdf_std(double u) { return kLogT3Norm - 2.0 * std::log1p(u * u / 3.0); }

double scaled_t3_logpdf(double x, double location, double prec)
{
    const double sp = std::sqrt(prec);
    return t3_logpdf_std((x - location) * sp) + std::log(sp);
}

double t3_log_mass_positive(double location, double prec)
{
    const double u = location * std::sqrt(prec);
    if (u >= 0) return std::log(t3_cdf(u));
    // upper tail of t3 beyond |u|, computed without cancellation
    const double v = -u;
    const double s3 = std::sqrt(3.0);
    const double tail = (std::atan(s3 / v) - v / (s3 * (1.0 + v * v / 3.0))) / std::numbers::pi;
    if (tail > 1e-12) return std::log(tail);
    // leading terms of the tail expansion: 2 sqrt(3)/(pi v^3) (1 - 18/(5 v^2))
    return std::log(2.0 * s3 / std::numbers::pi) - 3.0 * std::log(v) +
           std::log1p(-18.0 / (5.0 * v * v));
}

double norm_log_mass_below(double upper, double mean, double prec)
{
    return norm_logcdf((upper - mean) * std::sqrt(prec));
}

double norm_log_mass_above(double lower, double mean, double prec)
{
    return norm_logcdf((mean - lower) * std::sqrt(prec));
}

double gamma_logpdf(double x, double shape, double scale)
{
    if (!(x > 0)) return -std::numeric_limits<double>::infinity();
    return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale);
}

namespace {

// Excess z - a of a standard normal conditioned on z >= a.
double std_normal_excess(Rng& rng, double a)
{
    if (a <= 0.0) {
        for (;;) {
            const double z = rng.normal();
            if (z >= a) return z - a;
        }
    }
    const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
        const double e = -std::log(1.0 - rng.uniform()) / lambda;
        const double d = a + e - lambda;
        if (rng.uniform() <= std::exp(-0.5 * d * d)) return e;
    }
}

}  // namespace

double draw_normal_above(Rng& rng, double mean, double prec, double lower)
{
    const double sd = 1.0 / std::sqrt(prec);
    return lower + sd * std_normal_excess(rng, (lower - mean) / sd);
}

double draw_normal_below(Rng& rng, double mean, double prec, double upper)
{
    const double sd = 1.0 / std::sqrt(prec);
    return upper - sd * std_normal_excess(rng, (mean - upper) / sd);
}

double draw_positive_t3(Rng& rng, double location, double prec)
{
    const double scale = 1.0 / std::sqrt(prec);
    if (location >= 0.0) {
        for (;;) {
            const double x = location + scale * rng.student_t(3.0);
            if (x > 0) return x;
        }
    }
    // Inverse CDF on the retained tail.
    const double lo = t3_cdf(-location / scale);
    double u = lo + (1.0 - lo) * rng.uniform();
    u = std::min(u, 1.0 - 1e-16);
    double a = -location / scale, b = a + 1.0;
    while (t3_cdf(b) < u) b = a + 2.0 * (b - a);
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        (t3_cdf(m) < u ? a : b) = m;
    }
    return std::max(location + scale * 0.5 * (a + b), std::numeric_limits<double>::min());
}

}  // namespace qfa
