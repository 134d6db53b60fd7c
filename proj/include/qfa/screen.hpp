#pragma once

#include <map>
#include <string>
#include <vector>

namespace qfa {

struct RepeatSeries {
    std::string gene;
    int condition = 0;  // 0 control, 1 query
    std::string batch;
    std::string id;
    std::vector<double> times;
    std::vector<double> values;
};

struct ScreenDataset {
    std::vector<std::string> genes;  // ordered gene list
    std::vector<RepeatSeries> repeats;
    std::vector<std::string> condition_labels{"control", "query"};

    std::size_t gene_index(const std::string& gene) const;
    bool has_gene(const std::string& gene) const;
    std::size_t n_repeats(int condition, const std::string& gene) const;
    // Dataset restricted to one condition, relabelled as condition 0.
    ScreenDataset condition_slice(int condition) const;
    // Drops genes listed in exclude (and their repeats).
    ScreenDataset without(const std::vector<std::string>& exclude) const;
    void validate() const;
};

// Dataset with the given genes and no repeats; used for prior checks.
ScreenDataset empty_screen(const std::vector<std::string>& genes);

}  // namespace qfa
