#include <doctest.h>

#include <cmath>
#include <random>

#include "qfa/baseline.hpp"
#include "qfa/diagnostics.hpp"

using namespace qfa;

TEST_CASE("pooled t test against textbook values")
{
    auto r = gene_test({1, 2, 3}, {4, 5, 6});
    CHECK(r.gamma_hat == doctest::Approx(3.0));
    CHECK(r.p_value == doctest::Approx(0.021311641128756727).epsilon(1e-10));
    r = gene_test({1.1, 0.9, 1.3, 1.0}, {0.5, 0.7, 0.4, 0.6});
    CHECK(r.gamma_hat == doctest::Approx(-0.525));
    CHECK(r.p_value == doctest::Approx(0.002698493110868346).epsilon(1e-10));
}

TEST_CASE("Benjamini-Hochberg golden values")
{
    const auto q = benjamini_hochberg({0.01, 0.02, 0.03, 0.04});
    for (double v : q) CHECK(std::abs(v - 0.04) < 1e-12);
    const auto q2 = benjamini_hochberg({0.04, 0.001, 0.5, 0.03});
    CHECK(q2[1] == doctest::Approx(0.004));
    CHECK(q2[3] == doctest::Approx(0.04 * 4 / 3.0).epsilon(1e-12));
    CHECK(q2[0] == doctest::Approx(0.04 * 4 / 3.0).epsilon(1e-12));
    CHECK(q2[2] == doctest::Approx(0.5));
    CHECK(benjamini_hochberg({}).empty());
}

TEST_CASE("Jaccard golden value")
{
    CHECK(std::abs(jaccard({"A", "B"}, {"B", "C"}) - 1.0 / 3.0) < 1e-12);
    CHECK(jaccard({}, {}) == 1.0);
}

TEST_CASE("scaling divides by the screen mean")
{
    FitnessTable t{{"a", {1.0, 3.0}}, {"b", {2.0, 6.0}}};
    const auto s = scale_fitnesses(t);
    CHECK(s.at("a")[0] == doctest::Approx(1.0 / 3.0));
    CHECK(s.at("b")[1] == doctest::Approx(2.0));
}

TEST_CASE("baseline flags a clear shift and skips thin genes")
{
    FitnessTable ctl, qry;
    std::mt19937_64 eng(5);
    std::normal_distribution<double> noise(0.0, 0.04);
    for (int g = 0; g < 200; ++g) {
        const std::string name = "g" + std::to_string(g);
        for (int m = 0; m < 4; ++m) {
            ctl[name].push_back(1.0 + noise(eng));
            qry[name].push_back(1.0 + noise(eng));
        }
    }
    ctl["hit"] = {1.0, 1.02, 0.98, 1.01};
    qry["hit"] = {2.0, 2.03, 1.98, 2.01};
    ctl["thin"] = {1.0};
    qry["thin"] = {1.0, 1.1};
    const auto rep = run_baseline(ctl, qry);
    CHECK(rep.skipped == std::vector<std::string>{"thin"});
    int sig = 0;
    for (const auto& r : rep.results) {
        if (r.significant) {
            ++sig;
            CHECK(r.gene == "hit");
            CHECK(r.gamma_hat > 0);
        }
    }
    CHECK(sig == 1);
}
