#pragma once

namespace qfa {

class Rng;

// Normal parameterised by precision.
double norm_logpdf_prec(double x, double mean, double prec);
double norm_logcdf(double z);
double norm_cdf(double z);

// Standard Student t with 3 degrees of freedom.
double t3_cdf(double u);
double t3_logpdf_std(double u);

// Three-parameter t3 with location and precision (scale = prec^{-1/2}).
double scaled_t3_logpdf(double x, double location, double prec);

// log P(X >= 0) for X ~ scaled t3(location, prec); normaliser of the [0, inf) truncation.
double t3_log_mass_positive(double location, double prec);

// log P(X <= upper) and log P(X >= lower) for X ~ N(mean, 1/prec).
double norm_log_mass_below(double upper, double mean, double prec);
double norm_log_mass_above(double lower, double mean, double prec);

// Gamma with shape and scale.
double gamma_logpdf(double x, double shape, double scale);

// Exact draws from truncated laws; precision parameterisation throughout.
double draw_normal_above(Rng& rng, double mean, double prec, double lower);
double draw_normal_below(Rng& rng, double mean, double prec, double upper);
// X ~ scaled t3(location, prec) conditioned on X > 0.
double draw_positive_t3(Rng& rng, double location, double prec);

}  // namespace qfa
