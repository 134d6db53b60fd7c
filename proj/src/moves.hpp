#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "qfa/chain.hpp"
#include "qfa/random.hpp"

namespace qfa::moves {

// Independence proposal from the node's conditional prior; accepted on the
// likelihood of its children alone.
template <class Draw, class F>
void refresh(Rng& rng, double& x, Draw&& draw, F&& loglik)
{
    const double old = x;
    const double l0 = loglik();
    x = draw();
    const double l1 = loglik();
    if (!(std::isfinite(l1) && mh_accept(rng, l1 - l0))) x = old;
}

// Random-walk move through the bijection move(d), which returns the log-Jacobian.
template <class Move, class F>
void joint(Rng& rng, RwScale& sc, const AdaptConfig& ac, bool adapting, std::vector<double*> vars,
           Move&& move, F&& logt)
{
    std::vector<double> saved;
    saved.reserve(vars.size());
    for (double* v : vars) saved.push_back(*v);
    const double l0 = logt();
    const double logj = move(sc.sd * rng.normal());
    const double l1 = logt();
    const bool acc = std::isfinite(l1) && std::isfinite(logj) && mh_accept(rng, l1 - l0 + logj);
    if (!acc)
        for (std::size_t i = 0; i < vars.size(); ++i) *vars[i] = saved[i];
    sc.record(acc);
    sc.rejects_in_row = 0;
    if (adapting && sc.window_tries >= ac.window) sc.adapt(ac.low, ac.high);
}

// Location shift of a hyper-parameter carried by its children.
template <class F>
void shift(Rng& rng, RwScale& sc, const AdaptConfig& ac, bool adapting, double& hyper,
           std::vector<double*> kids, F&& logt)
{
    std::vector<double*> vars = kids;
    vars.push_back(&hyper);
    joint(rng, sc, ac, adapting, vars,
          [&](double d) {
              hyper += d;
              for (double* k : kids) *k += d;
              return 0.0;
          },
          logt);
}

// Log-precision change that rescales the children's deviations from centre; with
// exp_scale the deviation is taken on exp(child).
template <class F>
void scale(Rng& rng, RwScale& sc, const AdaptConfig& ac, bool adapting, double& logprec,
           double centre, std::vector<double*> kids, bool exp_scale, F&& logt)
{
    std::vector<double*> vars = kids;
    vars.push_back(&logprec);
    joint(rng, sc, ac, adapting, vars,
          [&](double d) {
              logprec += d;
              const double f = std::exp(-0.5 * d);
              double logj = 0.0;
              for (double* k : kids) {
                  if (!exp_scale) {
                      *k = centre + (*k - centre) * f;
                      logj -= 0.5 * d;
                      continue;
                  }
                  const double v = centre + (std::exp(*k) - centre) * f;
                  if (!(v > 0)) return -std::numeric_limits<double>::infinity();
                  const double nk = std::log(v);
                  logj += *k - 0.5 * d - nk;
                  *k = nk;
              }
              return logj;
          },
          logt);
}

// Random-walk move on a hyper-parameter that redraws every child from its new
// conditional prior; accepted on the hyper prior and the children's likelihood.
template <class Draw, class Prior, class F>
void collapsed(Rng& rng, RwScale& sc, const AdaptConfig& ac, bool adapting, double& hyper,
               std::vector<double*> kids, Draw&& draw, Prior&& prior, F&& loglik)
{
    std::vector<double*> vars = kids;
    vars.push_back(&hyper);
    joint(rng, sc, ac, adapting, vars,
          [&](double d) {
              hyper += d;
              for (double* k : kids) *k = draw();
              return 0.0;
          },
          [&] { return prior() + loglik(); });
}

inline std::vector<double*> pointers(std::vector<double>& v)
{
    std::vector<double*> out;
    out.reserve(v.size());
    for (double& x : v) out.push_back(&x);
    return out;
}

}  // namespace qfa::moves
