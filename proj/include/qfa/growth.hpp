#pragma once

namespace qfa {

struct LogisticParams {
    double K = 0.0;
    double r = 0.0;
    double P = 0.0;
};

struct FitnessScore {
    double mdr = 0.0;
    double mdp = 0.0;
    double product = 0.0;
    bool dead = false;
};

// Closed-form logistic solution with t0 = 0.
double logistic_solution(const LogisticParams& p, double t);

// Unchecked variant for inner sampler loops.
double logistic_fast(double K, double r, double P, double t);

// MDR, MDP and their product. Cultures with K <= 2P are dead: mdr = 0 and product = 0.
FitnessScore fitness(const LogisticParams& p);

}  // namespace qfa
