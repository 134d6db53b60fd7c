#include "qfa/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qfa/errors.hpp"

namespace qfa {

namespace {

double mean_of(const std::vector<double>& x)
{
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

std::vector<double> acf(const std::vector<double>& x, std::size_t max_lag)
{
    const std::size_t n = x.size();
    std::vector<double> out;
    if (n == 0) return out;
    max_lag = std::min(max_lag, n - 1);
    const double m = mean_of(x);
    double c0 = 0;
    for (double v : x) c0 += (v - m) * (v - m);
    out.assign(max_lag + 1, 0.0);
    if (c0 == 0) {
        out[0] = 1.0;
        return out;
    }
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double s = 0;
        for (std::size_t i = 0; i + k < n; ++i) s += (x[i] - m) * (x[i + k] - m);
        out[k] = s / c0;
    }
    return out;
}

EssResult ess(const std::vector<double>& x)
{
    const std::size_t n = x.size();
    if (n < 10) throw InvalidParameter("ess: need at least 10 draws");
    const double m = mean_of(x);
    double c0 = 0;
    for (double v : x) c0 += (v - m) * (v - m);
    if (c0 <= 0 || !std::isfinite(c0)) return {0.0, true};

    const auto rho = acf(x, n - 1);
    double sum = 0.0;  // sum of Gamma_k = rho_{2k} + rho_{2k+1}
    for (std::size_t k = 0; 2 * k + 1 < rho.size(); ++k) {
        const double g = rho[2 * k] + rho[2 * k + 1];
        if (g <= 0) break;
        sum += g;
    }
    const double tau = std::max(2.0 * sum - 1.0, 1e-12);
    return {std::min(static_cast<double>(n), n / tau), false};
}

double spectrum0_ar(const std::vector<double>& x)
{
    const std::size_t n = x.size();
    const std::size_t order_max =
        std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::floor(10.0 * std::log10(n))));
    const auto r = acf(x, order_max);
    const double m = mean_of(x);
    double c0 = 0;
    for (double v : x) c0 += (v - m) * (v - m);
    c0 /= n;

    // Levinson-Durbin; keep the AIC-best order
    std::vector<double> phi, best_phi;
    double v = c0, best_v = c0;
    double best_aic = n * std::log(c0 * n / (n - 1.0));
    for (std::size_t k = 1; k <= order_max; ++k) {
        double num = r[k];
        for (std::size_t j = 0; j < phi.size(); ++j) num -= phi[j] * r[k - 1 - j];
        const double refl = num / (v / c0);
        std::vector<double> next(k);
        for (std::size_t j = 0; j + 1 < k; ++j) next[j] = phi[j] - refl * phi[k - 2 - j];
        next[k - 1] = refl;
        phi = std::move(next);
        v *= (1.0 - refl * refl);
        if (v <= 0) break;
        const double vp = v * n / (n - (k + 1.0));
        const double aic = n * std::log(vp) + 2.0 * k;
        if (aic < best_aic) {
            best_aic = aic;
            best_phi = phi;
            best_v = v;
        }
    }
    const double vpred = best_v * n / (n - (best_phi.size() + 1.0));
    const double s = 1.0 - std::accumulate(best_phi.begin(), best_phi.end(), 0.0);
    return vpred / (s * s);
}

double pcramer(double q)
{
    if (!(q > 0)) return 0.0;
    const double log_eps = std::log(1e-5);
    double total = 0.0;
    for (int k = 0; k <= 3; ++k) {
        const double z = std::tgamma(k + 0.5) * std::sqrt(4.0 * k + 1.0) /
                         (std::tgamma(k + 1.0) * std::pow(std::numbers::pi, 1.5) * std::sqrt(q));
        const double u = (4.0 * k + 1.0) * (4.0 * k + 1.0) / (16.0 * q);
        if (u > -log_eps) continue;
        total += z * std::exp(-u) * std::cyl_bessel_k(0.25, u);
    }
    return std::min(1.0, total);
}

namespace {

double cvm_pvalue(const std::vector<double>& y, double s0)
{
    const std::size_t n = y.size();
    const double m = mean_of(y);
    double cum = 0.0, stat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cum += y[i];
        const double b = cum - m * (i + 1.0);
        stat += b * b / (n * s0);
    }
    stat /= n;
    return 1.0 - pcramer(stat);
}

bool constant(const std::vector<double>& x)
{
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

}  // namespace

HwResult heidelberger_welch(const std::vector<double>& x, double alpha)
{
    if (x.size() < 100) throw InvalidParameter("heidelberger_welch: need at least 100 draws");
    HwResult res;
    if (constant(x)) {
        res.degenerate = true;
        res.pvalue = 1.0;
        return res;
    }
    const std::size_t n = x.size();
    // Spectral density at zero from the latter half, shared by every start.
    const double s0 = spectrum0_ar(std::vector<double>(x.begin() + n / 2, x.end()));
    for (std::size_t k = 0; k < 5; ++k) {
        const std::size_t start = k * n / 10;
        std::vector<double> y(x.begin() + start, x.end());
        const double p = cvm_pvalue(y, s0);
        if (k == 0) res.pvalue = p;
        if (p >= alpha) {
            res.passed = true;
            res.start = start;
            break;
        }
    }
    return res;
}

std::vector<double> mid_ranks(const std::vector<double>& x)
{
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * (i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidParameter("correlation: need equal lengths >= 2");
    const double mx = mean_of(x), my = mean_of(y);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidParameter("spearman: need equal lengths >= 2");
    return pearson(mid_ranks(x), mid_ranks(y));
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b)
{
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& s : a) inter += b.count(s);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

double kolmogorov_pvalue(double d, std::size_t n)
{
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

std::vector<ParamDiagnostics> diagnose(const Chain& chain, std::size_t max_lag)
{
    std::vector<ParamDiagnostics> out;
    for (std::size_t j = 0; j < chain.n_params(); ++j) {
        ParamDiagnostics d;
        d.name = chain.names[j];
        const auto col = chain.column(j);
        d.mean = chain.mean(d.name);
        d.sd = chain.sd(d.name);
        if (col.size() >= 10) {
            const auto e = ess(col);
            d.ess = e.ess;
            d.degenerate = e.degenerate;
        }
        if (col.size() >= 100) {
            const auto hw = heidelberger_welch(col);
            d.hw_pvalue = hw.pvalue;
            d.degenerate = d.degenerate || hw.degenerate;
        }
        d.acf = acf(col, max_lag);
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace qfa
