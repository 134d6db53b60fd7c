#include "qfa/baseline.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "qfa/errors.hpp"

namespace qfa {

FitnessTable scale_fitnesses(const FitnessTable& fits)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [g, v] : fits) {
        sum += std::accumulate(v.begin(), v.end(), 0.0);
        n += v.size();
    }
    if (n == 0) throw DataError("scale_fitnesses: empty screen");
    const double mean = sum / n;
    if (mean == 0.0 || !std::isfinite(mean))
        throw DataError("scale_fitnesses: degenerate screen with zero grand mean");
    FitnessTable out = fits;
    for (auto& [g, v] : out)
        for (double& x : v) x /= mean;
    return out;
}

GeneTest gene_test(const std::vector<double>& control, const std::vector<double>& query)
{
    const std::size_t n0 = control.size(), n1 = query.size();
    if (n0 < 2 || n1 < 2) throw DataError("gene_test: need at least 2 repeats per condition");
    const double m0 = std::accumulate(control.begin(), control.end(), 0.0) / n0;
    const double m1 = std::accumulate(query.begin(), query.end(), 0.0) / n1;
    double ss = 0.0;
    for (double v : control) ss += (v - m0) * (v - m0);
    for (double v : query) ss += (v - m1) * (v - m1);
    const double df = static_cast<double>(n0 + n1 - 2);
    const double s2 = ss / df;
    GeneTest res;
    res.gamma_hat = m1 - m0;
    const double se = std::sqrt(s2 * (1.0 / n0 + 1.0 / n1));
    if (se == 0.0) {
        res.p_value = res.gamma_hat == 0.0 ? 1.0 : 0.0;
        return res;
    }
    const double t = std::fabs(res.gamma_hat / se);
    boost::math::students_t dist(df);
    res.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
    return res;
}

std::vector<double> benjamini_hochberg(const std::vector<double>& p)
{
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::vector<double> q(m);
    double running = 1.0;
    for (std::size_t k = m; k-- > 0;) {
        const double v = p[order[k]] * static_cast<double>(m) / static_cast<double>(k + 1);
        running = std::min(running, v);
        q[order[k]] = std::min(1.0, running);
    }
    return q;
}

BaselineReport run_baseline(const FitnessTable& control, const FitnessTable& query,
                            double threshold)
{
    const auto c = scale_fitnesses(control);
    const auto q = scale_fitnesses(query);
    BaselineReport rep;
    std::vector<double> pv;
    for (const auto& [gene, cv] : c) {
        auto it = q.find(gene);
        if (it == q.end() || cv.size() < 2 || it->second.size() < 2) {
            rep.skipped.push_back(gene);
            continue;
        }
        const auto t = gene_test(cv, it->second);
        GeneTestResult r;
        r.gene = gene;
        r.gamma_hat = t.gamma_hat;
        r.p_value = t.p_value;
        r.control_mean = std::accumulate(cv.begin(), cv.end(), 0.0) / cv.size();
        r.query_mean =
            std::accumulate(it->second.begin(), it->second.end(), 0.0) / it->second.size();
        rep.results.push_back(r);
        pv.push_back(t.p_value);
    }
    for (const auto& [gene, qv] : q)
        if (!c.count(gene)) rep.skipped.push_back(gene);
    const auto qs = benjamini_hochberg(pv);
    for (std::size_t i = 0; i < rep.results.size(); ++i) {
        rep.results[i].q_value = qs[i];
        rep.results[i].significant = qs[i] < threshold;
    }
    return rep;
}

}  // namespace qfa
