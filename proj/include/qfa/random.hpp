#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qfa {

std::uint64_t splitmix64(std::uint64_t x);

// Stable child seed for a labelled sub-stream.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return unif_(eng_); }
    double normal() { return norm_(eng_); }
    double normal(double mean, double sd) { return mean + sd * norm_(eng_); }
    double gamma(double shape, double scale)
    {
        std::gamma_distribution<double> g(shape, scale);
        return g(eng_);
    }
    double student_t(double dof)
    {
        std::student_t_distribution<double> t(dof);
        return t(eng_);
    }
    bool bernoulli(double p) { return uniform() < p; }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace qfa
