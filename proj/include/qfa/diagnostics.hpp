#pragma once

#include <set>
#include <string>
#include <vector>

#include "qfa/chain.hpp"

namespace qfa {

// Biased autocorrelation estimator, lags 0..max_lag.
std::vector<double> acf(const std::vector<double>& x, std::size_t max_lag);

struct EssResult {
    double ess = 0.0;
    bool degenerate = false;
};

// n / (1 + 2 sum rho_k), initial positive sequence truncation, capped at n.
EssResult ess(const std::vector<double>& x);

// Spectral density at frequency zero from an AR fit chosen by AIC.
double spectrum0_ar(const std::vector<double>& x);

struct HwResult {
    double pvalue = 0.0;     // stationarity p-value on the full chain
    bool passed = false;     // passed at some start within the first half
    std::size_t start = 0;   // first retained index when passed
    bool degenerate = false;
};

HwResult heidelberger_welch(const std::vector<double>& x, double alpha = 0.05);

// Distribution function of the Cramer-von Mises statistic.
double pcramer(double q);

double spearman(const std::vector<double>& x, const std::vector<double>& y);
double pearson(const std::vector<double>& x, const std::vector<double>& y);
std::vector<double> mid_ranks(const std::vector<double>& x);
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

struct KsResult {
    double statistic = 0.0;
    double pvalue = 0.0;
};

// One-sample Kolmogorov-Smirnov test against a continuous CDF.
template <class Cdf>
KsResult ks_test(std::vector<double> x, Cdf cdf);
double kolmogorov_pvalue(double d, std::size_t n);

struct ParamDiagnostics {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
    double ess = 0.0;
    double hw_pvalue = 0.0;
    bool degenerate = false;
    std::vector<double> acf;
};

std::vector<ParamDiagnostics> diagnose(const Chain& chain, std::size_t max_lag = 20);

}  // namespace qfa

#include <algorithm>

template <class Cdf>
qfa::KsResult qfa::ks_test(std::vector<double> x, Cdf cdf)
{
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
    }
    return {d, kolmogorov_pvalue(d, x.size())};
}
