#include "qfa/chain.hpp"

#include <algorithm>
#include <cmath>

#include "qfa/errors.hpp"
#include "qfa/random.hpp"

namespace qfa {

std::size_t Chain::index(const std::string& name) const
{
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw KeyingError("chain has no parameter named " + name);
    return static_cast<std::size_t>(it - names.begin());
}

bool Chain::has(const std::string& name) const
{
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<double> Chain::column(std::size_t j) const
{
    const std::size_t n = n_draws(), p = n_params();
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = draws[i * p + j];
    return c;
}

std::vector<double> Chain::column(const std::string& name) const { return column(index(name)); }

void Chain::push_row(const std::vector<double>& row)
{
    draws.insert(draws.end(), row.begin(), row.end());
}

double Chain::mean(const std::string& name) const
{
    const auto c = column(name);
    double s = 0;
    for (double v : c) s += v;
    return c.empty() ? 0.0 : s / c.size();
}

double Chain::sd(const std::string& name) const
{
    const auto c = column(name);
    if (c.size() < 2) return 0.0;
    const double m = mean(name);
    double s = 0;
    for (double v : c) s += (v - m) * (v - m);
    return std::sqrt(s / (c.size() - 1));
}

void RwScale::record(bool accepted)
{
    ++tries;
    ++window_tries;
    if (accepted) {
        ++acc;
        ++window_acc;
        rejects_in_row = 0;
    } else {
        ++rejects_in_row;
    }
}

void RwScale::adapt(double low, double high)
{
    if (window_tries == 0) return;
    const double rate = static_cast<double>(window_acc) / window_tries;
    if (rate < low)
        sd *= std::max(0.5, rate / low + 0.1);
    else if (rate > high)
        sd *= std::min(2.0, 1.0 + (rate - high) / (1.0 - high) + 0.1);
    window_acc = window_tries = 0;
}

bool mh_accept(Rng& rng, double log_ratio)
{
    if (std::isnan(log_ratio)) return false;
    if (log_ratio >= 0) return true;
    return std::log(rng.uniform()) < log_ratio;
}

}  // namespace qfa
