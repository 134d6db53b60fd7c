#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qfa {

class Rng;

struct Chain {
    std::vector<std::string> names;
    std::vector<double> draws;  // row-major, one row per retained draw
    std::size_t burn_in = 0;
    std::size_t thin = 1;
    std::uint64_t seed = 0;
    std::vector<double> acceptance;

    std::size_t n_params() const { return names.size(); }
    std::size_t n_draws() const { return names.empty() ? 0 : draws.size() / names.size(); }
    std::size_t index(const std::string& name) const;
    bool has(const std::string& name) const;
    std::vector<double> column(std::size_t j) const;
    std::vector<double> column(const std::string& name) const;
    double at(std::size_t row, std::size_t j) const { return draws[row * names.size() + j]; }
    void push_row(const std::vector<double>& row);
    double mean(const std::string& name) const;
    double sd(const std::string& name) const;
};

struct Schedule {
    std::size_t burn_in = 0;
    std::size_t thin = 1;
    std::size_t samples = 1000;
};

// Random-walk proposal scale adapted toward an acceptance band during burn-in.
struct RwScale {
    double sd = 0.1;
    std::size_t window_acc = 0;
    std::size_t window_tries = 0;
    std::size_t acc = 0;
    std::size_t tries = 0;
    std::size_t rejects_in_row = 0;
    // Value left by the last update; a change made by another kernel clears rejects_in_row.
    double last = 0.0;

    void record(bool accepted);
    void adapt(double low, double high);
    double rate() const { return tries ? static_cast<double>(acc) / tries : 0.0; }
};

bool mh_accept(Rng& rng, double log_ratio);

struct AdaptConfig {
    std::size_t window = 100;
    double low = 0.2;
    double high = 0.4;
    std::size_t stuck_limit = 10000;
};

}  // namespace qfa
