#include "sgrid/benchmarks.hpp"
#include "sgrid/errors.hpp"
#include "sgrid/modelselect.hpp"
#include "sgrid/spem.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace sgrid;
using Catch::Approx;

namespace {

EquationCandidate member(double J, int k)
{
    EquationCandidate c;
    c.objectives = {J, k};
    c.bits.assign(6, 0);
    for (int i = 0; i < k && i < 6; ++i)
        c.bits[static_cast<std::size_t>(i)] = 1;
    c.reals.assign(6, 0.5);
    c.gamma = {1.0, 1.0};
    return c;
}

Bits mask_with_ones(std::size_t n2, std::initializer_list<std::size_t> ones)
{
    Bits m(n2, 0);
    for (auto i : ones)
        m[i] = 1;
    return m;
}

// Candidate carrying the true topology and exponents of one equation, with
// rate constants estimated from the data.
EquationCandidate truth_candidate(const SSystemModel& truth, std::size_t eq, const EquationProblem& problem)
{
    const std::size_t n = truth.genes();
    EquationCandidate c;
    c.bits = true_mask(truth, eq);
    c.reals.resize(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        c.reals[j] = truth.g(eq, j);
        c.reals[n + j] = truth.h(eq, j);
    }
    evaluate_into(problem, c);
    return c;
}

} // namespace

TEST_CASE("AIC values")
{
    CHECK(aic({51.0, 0}, 51) == 0.0);
    CHECK(aic({0.51, 2}, 51) == Approx(-4.526738813439072).epsilon(1e-14));
    CHECK(aic({0.3, 2}, 51) < aic({0.3, 3}, 51));
    CHECK(std::isfinite(aic({0.0, 4}, 51)));
    CHECK_THROWS_AS(aic({1.0, 1}, 0), DomainError);
}

TEST_CASE("AIC selection examples")
{
    const std::vector<EquationCandidate> tie{member(1e-9, 2), member(1e-9, 5)};
    CHECK(select_by_aic(tie, 51).objectives.k == 2);

    const std::vector<EquationCandidate> single{member(3.0, 4)};
    CHECK(&select_by_aic(single, 51) == &single[0]);

    // Underfit k=1 with large J against the true k=4 with tiny J.
    const std::vector<EquationCandidate> fit{member(40.0, 1), member(1e-6, 4)};
    REQUIRE(std::log(40.0 / 1e-6) > 2.0 * 3 / 51);
    CHECK(select_by_aic(fit, 51).objectives.k == 4);

    // Gap smaller than the penalty: the smaller model wins.
    const std::vector<EquationCandidate> close{member(1.0, 1), member(0.99, 4)};
    REQUIRE(std::log(1.0 / 0.99) < 2.0 * 3 / 51);
    CHECK(select_by_aic(close, 51).objectives.k == 1);

    CHECK_THROWS_AS(select_by_aic(std::vector<EquationCandidate>{}, 51), SelectionError);
}

TEST_CASE("AIC choice is a front member and survives a common shift")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> logj(-20.0, 3.0), shift(0.01, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<EquationCandidate> front;
        double j = std::exp(logj(rng));
        for (int k = 0; k < 6; ++k) {
            front.push_back(member(j, k));
            j *= std::exp(-std::abs(logj(rng)) / 4.0);
        }
        const auto& pick = select_by_aic(front, 51);
        CHECK((&pick >= front.data() && &pick < front.data() + front.size()));

        const double c = shift(rng);
        auto scaled = front;
        for (auto& m : scaled)
            m.objectives.J *= c;
        CHECK(select_by_aic(scaled, 51).objectives.k == pick.objectives.k);
    }
}

TEST_CASE("confusion counts")
{
    const auto truth = mask_with_ones(10, {0, 3, 7});
    auto c = confusion_counts(truth, truth);
    CHECK(c.tp == 3);
    CHECK(c.fn == 0);
    CHECK(c.tn == 7);
    CHECK(c.fp == 0);

    c = confusion_counts(Bits(10, 1), truth);
    CHECK(c.tp == 3);
    CHECK(c.fp == 7);
    CHECK(c.fn == 0);
    CHECK(c.tn == 0);

    c = confusion_counts(mask_with_ones(10, {0, 5}), truth);
    CHECK(c.tp == 1);
    CHECK(c.fn == 2);
    CHECK(c.fp == 1);
    CHECK(c.tn == 6);

    CHECK_THROWS_AS(confusion_counts(Bits(8, 0), truth), DomainError);
}

TEST_CASE("sensitivity and specificity from averaged counts")
{
    auto r = sensitivity_specificity(MeanConfusion{3.0, 0.05, 6.1, 0.85});
    REQUIRE(r.sensitivity);
    REQUIRE(r.specificity);
    CHECK(std::round(*r.sensitivity * 100) / 100 == Approx(0.98));
    CHECK(std::round(*r.specificity * 100) / 100 == Approx(0.88));

    r = sensitivity_specificity(MeanConfusion{3.0, 0.0, 6.6, 0.4});
    CHECK(*r.sensitivity == 1.0);
    CHECK(*r.specificity == Approx(0.943).margin(5e-4));

    r = sensitivity_specificity(ConfusionCounts{3, 0, 7, 0});
    CHECK(*r.sensitivity == 1.0);
    CHECK(*r.specificity == 1.0);

    r = sensitivity_specificity(ConfusionCounts{0, 2, 8, 0});
    CHECK(*r.sensitivity == 0.0);
}

TEST_CASE("undefined ratios are absent")
{
    auto r = sensitivity_specificity(ConfusionCounts{0, 0, 10, 0});
    CHECK_FALSE(r.sensitivity.has_value());
    CHECK(*r.specificity == 1.0);
    r = sensitivity_specificity(ConfusionCounts{10, 0, 0, 0});
    CHECK_FALSE(r.specificity.has_value());
}

TEST_CASE("averaging counts over runs")
{
    const std::vector<ConfusionCounts> runs{{3, 0, 7, 0}, {3, 0, 6, 1}};
    const auto m = average(runs);
    CHECK(m.tp == 3.0);
    CHECK(m.tn == 6.5);
    CHECK(m.fp == 0.5);
    CHECK(m.fn == 0.0);
}

TEST_CASE("confusion properties on random masks")
{
    std::mt19937_64 rng(5);
    std::bernoulli_distribution bit(0.4);
    for (int trial = 0; trial < 500; ++trial) {
        Bits a(10), b(10);
        for (std::size_t i = 0; i < 10; ++i) {
            a[i] = bit(rng);
            b[i] = bit(rng);
        }
        const auto c = confusion_counts(a, b);
        CHECK(c.total() == 10);
        const auto r = sensitivity_specificity(c);
        for (const auto& v : {r.sensitivity, r.specificity})
            if (v) {
                CHECK(*v >= 0.0);
                CHECK(*v <= 1.0);
            }
        if (same_topology(a, b)) {
            CHECK(r.sensitivity.value_or(1.0) == 1.0);
            CHECK(r.specificity.value_or(1.0) == 1.0);
        }
    }
}

TEST_CASE("true masks of S2")
{
    const auto m = benchmark("S2").truth;
    // Equation 2: g21 and h22.
    CHECK(true_mask(m, 1) == mask_with_ones(8, {0, 5}));
    CHECK_THROWS_AS(true_mask(m, 4), DomainError);
}

TEST_CASE("assembled models zero the masked-off orders")
{
    std::vector<EquationCandidate> sel(2);
    for (auto& c : sel) {
        c.bits = {1, 0, 0, 1};
        c.reals = {0.7, -2.5, 1.9, 0.4};
        c.gamma = {2.0, 3.0};
    }
    const auto m = assemble_model(sel);
    CHECK(m.g(0, 0) == 0.7);
    CHECK(m.g(0, 1) == 0.0);
    CHECK(m.h(1, 0) == 0.0);
    CHECK(m.h(1, 1) == 0.4);
    CHECK(m.alpha[1] == 2.0);
    CHECK(m.beta[0] == 3.0);

    sel[1].gamma.beta = 0.0;
    try {
        assemble_model(sel);
        FAIL("expected an assembly error");
    } catch (const AssemblyError& e) {
        CHECK(e.equation() == 1);
    }
}

TEST_CASE("S1 truth candidates reassemble the published model")
{
    const auto spec = benchmark("S1");
    const auto sets = simulate_benchmark(spec);
    std::vector<EquationCandidate> sel;
    for (std::size_t i = 0; i < spec.truth.genes(); ++i)
        sel.push_back(truth_candidate(spec.truth, i, EquationProblem(i, sets)));
    const auto m = assemble_model(sel);
    // Rate constants inherit the stencil error of the early transient (~1%).
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(m.alpha[i] == Approx(spec.truth.alpha[i]).epsilon(1e-2));
        CHECK(m.beta[i] == Approx(spec.truth.beta[i]).epsilon(1e-2));
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(m.g(i, j) == spec.truth.g(i, j));
            CHECK(m.h(i, j) == spec.truth.h(i, j));
        }
    }
}

TEST_CASE("S2 truth candidates re-simulate the benchmark")
{
    const auto spec = benchmark("S2");
    const auto sets = simulate_benchmark(spec);
    std::vector<EquationCandidate> sel;
    for (std::size_t i = 0; i < spec.truth.genes(); ++i)
        sel.push_back(truth_candidate(spec.truth, i, EquationProblem(i, sets)));
    CHECK(concentration_error(assemble_model(sel), sets.front()) < 1e-2);
}

TEST_CASE("scoring a front set")
{
    const auto spec = benchmark("S2");
    const auto sets = simulate_benchmark(spec);
    std::vector<ParetoSet> fronts;
    for (std::size_t i = 0; i < 4; ++i) {
        auto good = truth_candidate(spec.truth, i, EquationProblem(i, sets));
        fronts.push_back({good});
    }
    const auto r = select_and_score(fronts, sets.front().samples(), spec.truth);
    REQUIRE(r.success.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(r.success[i]);
        CHECK(r.confusion[i].fp == 0);
        CHECK(r.confusion[i].fn == 0);
    }
    CHECK(r.model.genes() == 4);
}
