#include "sgrid/benchmarks.hpp"
#include "sgrid/errors.hpp"
#include "sgrid/spem.hpp"

#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

using namespace sgrid;
using Catch::Approx;

namespace {

constexpr LeastSquaresOptions kExact{0.0};

Matrix to_matrix(const oracle::Design& d)
{
    Matrix m(d.a.size(), 2);
    for (std::size_t k = 0; k < d.a.size(); ++k) {
        m(k, 0) = d.a[k];
        m(k, 1) = d.b[k];
    }
    return m;
}

double norm2(std::span<const double> v)
{
    return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

EquationExponents true_exponents(const SSystemModel& m, std::size_t i)
{
    EquationExponents e;
    e.index = i;
    for (std::size_t j = 0; j < m.genes(); ++j) {
        e.g_row.push_back(m.g(i, j));
        e.h_row.push_back(m.h(i, j));
        e.mask_g.push_back(m.g(i, j) != 0.0);
        e.mask_h.push_back(m.h(i, j) != 0.0);
    }
    return e;
}

std::vector<DerivativeTable> analytic(const SSystemModel& m, const std::vector<TimeSeriesDataset>& sets)
{
    std::vector<DerivativeTable> out;
    for (const auto& ds : sets)
        out.push_back(oracle::analytic_slopes(m, ds));
    return out;
}

std::vector<double> column_of(const std::vector<DerivativeTable>& tables, std::size_t i)
{
    std::vector<double> s;
    for (const auto& t : tables)
        for (std::size_t k = 0; k < t.samples(); ++k)
            s.push_back(t.slopes(k, i));
    return s;
}

Matrix random_design(std::mt19937_64& rng, std::size_t m)
{
    std::uniform_real_distribution<double> u(0.2, 3.0);
    Matrix x(m, 2);
    for (std::size_t k = 0; k < m; ++k) {
        x(k, 0) = u(rng);
        x(k, 1) = -u(rng);
    }
    return x;
}

} // namespace

TEST_CASE("design rows for empty masks and unit data are (1, -1)")
{
    const auto sets = simulate_benchmark(benchmark("S1"));
    auto e = true_exponents(benchmark("S1").truth, 0);
    std::fill(e.mask_g.begin(), e.mask_g.end(), 0);
    std::fill(e.mask_h.begin(), e.mask_h.end(), 0);
    const auto x = design_matrix(e, sets);
    for (std::size_t k = 0; k < x.rows(); ++k) {
        CHECK(x(k, 0) == 1.0);
        CHECK(x(k, 1) == -1.0);
    }

    TimeSeriesDataset ones;
    ones.values = Matrix(6, 3, 1.0);
    for (int k = 0; k < 6; ++k)
        ones.times.push_back(0.1 * k);
    const auto e2 = true_exponents(benchmark("S1").truth, 2);
    const auto y = design_matrix(e2, std::vector<TimeSeriesDataset>{ones});
    for (std::size_t k = 0; k < y.rows(); ++k) {
        CHECK(y(k, 0) == 1.0);
        CHECK(y(k, 1) == -1.0);
    }
}

TEST_CASE("design rows match direct power products")
{
    const auto spec = benchmark("S1");
    const auto sets = simulate_benchmark(spec);
    const auto e = true_exponents(spec.truth, 2); // g32 = 0.75, h33 = 0.5
    const auto x = design_matrix(e, sets);
    const auto& ds = sets.front();
    REQUIRE(x.rows() == ds.samples());
    for (std::size_t k = 0; k < ds.samples(); ++k) {
        CHECK(x(k, 0) == Approx(std::pow(ds.values(k, 1), 0.75)).epsilon(1e-13));
        CHECK(x(k, 1) == Approx(-std::pow(ds.values(k, 2), 0.5)).epsilon(1e-13));
    }
}

TEST_CASE("extreme exponents are reported as out of range")
{
    const auto sets = simulate_benchmark(benchmark("S2"));
    EquationExponents e;
    e.index = 0;
    e.g_row = {40.0, 0, 0, 0}; // X1 starts at 10: 10^40
    e.h_row = {0, 0, 0, 0};
    e.mask_g = {1, 0, 0, 0};
    e.mask_h = {0, 0, 0, 0};
    CHECK_THROWS_AS(design_matrix(e, sets), NumericRangeError);

    const auto tables = five_point_derivatives(sets);
    const auto ev = evaluate_candidate(e, tables, sets);
    CHECK(std::isinf(ev.J));
    CHECK(ev.k == 1);
    CHECK(ev.out_of_range);
}

TEST_CASE("minimum-norm solution for a rank-one design")
{
    const double c = 2.5;
    Matrix x(12, 2);
    std::vector<double> s(12, c);
    for (std::size_t k = 0; k < 12; ++k) {
        x(k, 0) = 1.0;
        x(k, 1) = -1.0;
    }
    const auto est = estimate_rate_constants(x, s);
    CHECK(est.gamma.alpha == Approx(c / 2).epsilon(1e-6));
    CHECK(est.gamma.beta == Approx(-c / 2).epsilon(1e-6));
    CHECK(est.ill_conditioned);
}

TEST_CASE("orthonormal design returns the slopes")
{
    const Matrix x = Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}});
    const std::vector<double> s{3.0, 5.0};
    const auto est = estimate_rate_constants(x, s);
    CHECK(est.gamma.alpha == Approx(3.0).epsilon(1e-6));
    CHECK(est.gamma.beta == Approx(5.0).epsilon(1e-6));
}

TEST_CASE("S1 equation 3 recovers its rate constants from exact slopes")
{
    const auto spec = benchmark("S1");
    const auto sets = simulate_benchmark(spec);
    const auto tables = analytic(spec.truth, sets);
    const auto x = design_matrix(true_exponents(spec.truth, 2), sets);
    const auto est = estimate_rate_constants(x, column_of(tables, 2));
    CHECK(std::abs(est.gamma.alpha - 3.0) < 1e-6);
    CHECK(std::abs(est.gamma.beta - 5.0) < 1e-6);
}

TEST_CASE("residual of slopes inside or orthogonal to the column space")
{
    const Matrix x = Matrix::from_rows({{1, 0}, {0, 1}, {0, 0}, {0, 0}});
    CHECK(residual_objective(x, std::vector<double>{2.0, -1.0, 0.0, 0.0}) < 1e-10);
    const std::vector<double> orth{0.0, 0.0, 3.0, -4.0};
    CHECK(std::abs(residual_objective(x, orth) - 25.0) < 1e-10);
}

TEST_CASE("residual equals the grid-search minimum")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_design(rng, 10);
        std::vector<double> s(10);
        for (std::size_t k = 0; k < 10; ++k)
            s[k] = 1.5 * x(k, 0) + 0.7 * x(k, 1) + noise(rng);
        oracle::Design d;
        for (std::size_t k = 0; k < 10; ++k) {
            d.a.push_back(x(k, 0));
            d.b.push_back(x(k, 1));
        }
        const auto grid = oracle::grid_minimum(d, s, 20.0);
        const double j = residual_objective(x, s);
        const double slack = oracle::normal_lambda_max(d) * grid.spacing * grid.spacing;
        CHECK(j <= grid.J + 1e-9 * grid.J);
        CHECK(grid.J - j <= slack + 1e-12);
    }
}

TEST_CASE("projection and substituted forms agree")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = random_design(rng, 5 + trial % 40);
        std::vector<double> s(x.rows());
        for (auto& v : s)
            v = u(rng);
        const double a = residual_objective(x, s, kExact);
        const double b = projection_residual(x, s);
        CHECK(std::abs(a - b) <= 1e-8 * std::max(std::abs(a), 1e-12 * norm2(s)));
    }
}

TEST_CASE("least-squares residual is orthogonal to the design")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = random_design(rng, 5 + trial % 30);
        std::vector<double> s(x.rows());
        for (auto& v : s)
            v = u(rng);
        const auto g = estimate_rate_constants(x, s, kExact).gamma;
        double c0 = 0.0, c1 = 0.0;
        for (std::size_t k = 0; k < x.rows(); ++k) {
            const double r = s[k] - g.alpha * x(k, 0) - g.beta * x(k, 1);
            c0 += x(k, 0) * r;
            c1 += x(k, 1) * r;
        }
        CHECK(std::hypot(c0, c1) < 1e-6 * std::sqrt(norm2(s)));
    }
}

TEST_CASE("adding a free connection never increases the residual")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> level(0.3, 3.0), expo(-2.0, 2.0), coin(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 3;
        TimeSeriesDataset ds;
        ds.values = Matrix(5, n);
        for (std::size_t k = 0; k < 5; ++k) {
            ds.times.push_back(0.1 * k);
            for (std::size_t j = 0; j < n; ++j)
                ds.values(k, j) = level(rng);
        }
        const std::vector<TimeSeriesDataset> sets{ds};
        std::vector<double> s(5);
        for (auto& v : s)
            v = expo(rng);
        Bits bits(2 * n);
        std::vector<double> reals(2 * n);
        for (std::size_t i = 0; i < 2 * n; ++i) {
            bits[i] = coin(rng) < 0.4;
            reals[i] = expo(rng);
        }
        const auto base = oracle::design(bits, reals, sets);
        const double j0 = residual_objective(to_matrix(base), s, kExact);
        for (std::size_t pos = 0; pos < 2 * n; ++pos) {
            if (bits[pos])
                continue;
            auto grown = bits;
            grown[pos] = 1;
            auto r = reals;
            double best = std::numeric_limits<double>::infinity();
            for (int step = -40; step <= 40; ++step) {
                r[pos] = 0.05 * step; // includes 0: the old column space
                best = std::min(best, residual_objective(to_matrix(oracle::design(grown, r, sets)), s, kExact));
            }
            CHECK(best <= j0 + 1e-9 * std::max(1.0, j0));
        }
    }
}

TEST_CASE("every benchmark equation is exact at the truth")
{
    for (const auto* name : {"S1", "S2", "S3", "S4", "S4-multi"}) {
        const auto spec = benchmark(name);
        const auto sets = simulate_benchmark(spec);
        const auto tables = analytic(spec.truth, sets);
        for (std::size_t i = 0; i < spec.truth.genes(); ++i) {
            const auto ev = evaluate_candidate(true_exponents(spec.truth, i), tables, sets);
            INFO(name << " equation " << i + 1);
            CHECK(ev.J < 1e-8);
            CHECK(std::abs(ev.gamma.alpha - spec.truth.alpha[i]) < 1e-4);
            CHECK(std::abs(ev.gamma.beta - spec.truth.beta[i]) < 1e-4);
        }
    }
}

TEST_CASE("S2 equation 2 at the truth")
{
    const auto spec = benchmark("S2");
    const auto sets = simulate_benchmark(spec);
    const auto tables = analytic(spec.truth, sets);
    const auto ev = evaluate_candidate(true_exponents(spec.truth, 1), tables, sets);
    CHECK(ev.J < 1e-8);
    CHECK(ev.k == 2);
    CHECK(ev.gamma.alpha == Approx(8.0).epsilon(1e-6));
    CHECK(ev.gamma.beta == Approx(3.0).epsilon(1e-6));
}

TEST_CASE("empty network fits the best constant")
{
    const auto spec = benchmark("S2");
    const auto sets = simulate_benchmark(spec);
    const auto tables = five_point_derivatives(sets);
    for (std::size_t i = 0; i < 4; ++i) {
        EquationExponents e;
        e.index = i;
        e.g_row = e.h_row = {0.5, -1.0, 2.0, 0.1};
        e.mask_g = e.mask_h = {0, 0, 0, 0};
        const auto ev = evaluate_candidate(e, tables, sets);
        const auto s = column_of(tables, i);
        const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
        double centred = 0.0;
        for (double v : s)
            centred += (v - mean) * (v - mean);
        CHECK(ev.k == 0);
        CHECK(ev.J == Approx(centred).epsilon(1e-9));
        CHECK(ev.gamma.alpha > 0.0);
        CHECK(ev.gamma.beta > 0.0);
        CHECK(ev.gamma.alpha - ev.gamma.beta == Approx(mean).epsilon(1e-7));
    }
}

TEST_CASE("stacked datasets share one set of rate constants")
{
    const auto spec = benchmark("S4-multi");
    const auto sets = simulate_benchmark(spec);
    const auto tables = five_point_derivatives(sets);
    const auto e = true_exponents(spec.truth, 1);
    const auto one = evaluate_candidate(e, std::span(tables).first(1), std::span(sets).first(1));
    const auto all = evaluate_candidate(e, tables, sets);
    CHECK(one.k == all.k);

    const Bits bits = [&] {
        Bits b(e.mask_g);
        b.insert(b.end(), e.mask_h.begin(), e.mask_h.end());
        return b;
    }();
    std::vector<double> reals(e.g_row);
    reals.insert(reals.end(), e.h_row.begin(), e.h_row.end());
    double sum = 0.0;
    for (std::size_t d = 0; d < sets.size(); ++d) {
        const auto des = oracle::design(bits, reals, {sets[d]});
        sum += oracle::residual(des, column_of({tables[d]}, 1), all.gamma.alpha, all.gamma.beta);
    }
    CHECK(all.J == Approx(sum).epsilon(1e-8));
}

TEST_CASE("rate constants are always positive after evaluation")
{
    const auto spec = benchmark("S1");
    const auto sets = simulate_benchmark(spec);
    const auto tables = five_point_derivatives(sets);
    const EquationProblem problem(0, sets, tables);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> expo(-3.0, 3.0);
    std::bernoulli_distribution coin(0.5);
    int repaired = 0;
    for (int trial = 0; trial < 500; ++trial) {
        Bits bits(6);
        std::vector<double> reals(6);
        for (int i = 0; i < 6; ++i) {
            bits[i] = coin(rng);
            reals[i] = expo(rng);
        }
        const auto ev = problem.evaluate(bits, reals);
        if (!std::isfinite(ev.J))
            continue;
        CHECK(ev.gamma.alpha > 0.0);
        CHECK(ev.gamma.beta > 0.0);
        repaired += ev.repaired;
        // The reported J is the residual of the reported constants.
        const auto d = oracle::design(bits, reals, sets);
        CHECK(ev.J == Approx(oracle::residual(d, problem.slopes(), ev.gamma.alpha, ev.gamma.beta)).epsilon(1e-6));
    }
    CHECK(repaired > 0);
}

TEST_CASE("cached problem agrees with the reference path")
{
    const auto spec = benchmark("S3");
    const auto sets = simulate_benchmark(spec);
    const auto tables = five_point_derivatives(sets);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> expo(-3.0, 3.0);
    std::bernoulli_distribution coin(0.4);
    for (std::size_t i = 0; i < 5; ++i) {
        const EquationProblem problem(i, sets, tables);
        for (int trial = 0; trial < 40; ++trial) {
            Bits bits(10);
            std::vector<double> reals(10);
            for (int p = 0; p < 10; ++p) {
                bits[p] = coin(rng);
                reals[p] = expo(rng);
            }
            const auto fast = problem.evaluate(bits, reals);
            const auto ref = evaluate_candidate(EquationExponents::from_packed(i, bits, reals), tables, sets);
            CHECK(fast.k == ref.k);
            if (std::isfinite(ref.J))
                CHECK(fast.J == Approx(ref.J).epsilon(1e-9).margin(1e-12));
            else
                CHECK(std::isinf(fast.J));
        }
    }
}
