#pragma once

#include <map>
#include <string>
#include <vector>

namespace qfa {

struct GeneTestResult {
    std::string gene;
    double gamma_hat = 0.0;
    double p_value = 1.0;
    double q_value = 1.0;
    bool significant = false;
    double control_mean = 0.0;
    double query_mean = 0.0;
};

// Per-repeat fitnesses keyed by gene, one map per condition.
using FitnessTable = std::map<std::string, std::vector<double>>;

// Divides every value by the grand mean of the screen.
FitnessTable scale_fitnesses(const FitnessTable& fits);

struct GeneTest {
    double gamma_hat = 0.0;
    double p_value = 1.0;
};

// Pooled-variance two-sample t test, query minus control.
GeneTest gene_test(const std::vector<double>& control, const std::vector<double>& query);

std::vector<double> benjamini_hochberg(const std::vector<double>& p);

struct BaselineReport {
    std::vector<GeneTestResult> results;
    std::vector<std::string> skipped;
};

// Scale both screens, test every gene with >= 2 repeats per condition, BH-adjust, q < threshold.
BaselineReport run_baseline(const FitnessTable& control, const FitnessTable& query,
                            double threshold = 0.05);

}  // namespace qfa
