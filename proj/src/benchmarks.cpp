#include "sgrid/benchmarks.hpp"

#include "sgrid/errors.hpp"

#include <cmath>

namespace sgrid {

namespace {

using Rows = std::vector<std::vector<double>>;

SSystemModel make_model(std::vector<double> alpha, Rows g, std::vector<double> beta, Rows h)
{
    SSystemModel m{std::move(alpha), std::move(beta), Matrix::from_rows(g), Matrix::from_rows(h)};
    m.validate();
    return m;
}

SSystemModel s1_truth()
{
    return make_model({12.0, 10.0, 3.0},
                      {{0.0, 0.0, -0.8},
                       {0.5, 0.0, 0.0},
                       {0.0, 0.75, 0.0}},
                      {10.0, 3.0, 5.0},
                      {{0.5, 0.0, 0.0},
                       {0.0, 0.75, 0.0},
                       {0.0, 0.0, 0.5}});
}

SSystemModel s2_truth()
{
    return make_model({12.0, 8.0, 3.0, 2.0},
                      {{0.0, 0.0, -0.8, 0.0},
                       {0.5, 0.0, 0.0, 0.0},
                       {0.0, 0.75, 0.0, 0.0},
                       {0.5, 0.0, 0.0, 0.0}},
                      {10.0, 3.0, 5.0, 6.0},
                      {{0.5, 0.0, 0.0, 0.0},
                       {0.0, 0.75, 0.0, 0.0},
                       {0.0, 0.0, 0.5, 0.2},
                       {0.0, 0.0, 0.0, 0.8}});
}

SSystemModel s3_truth()
{
    return make_model({2.0, 2.0, 4.0, 4.0, 1.0},
                      {{0.0, 0.0, 0.0, 0.0, 0.0},
                       {0.5, 0.0, 0.0, 0.0, -1.0},
                       {0.0, 0.5, 0.0, 0.0, 0.0},
                       {0.0, 0.0, 0.8, 0.0, 0.0},
                       {0.0, 0.0, 0.0, 1.0, 0.0}},
                      {2.0, 4.0, 4.0, 1.0, 4.0},
                      {{0.5, 0.0, 0.0, 0.0, -1.0},
                       {0.0, 0.5, 0.0, 0.0, 0.0},
                       {0.0, 0.0, 0.8, 0.0, 0.0},
                       {0.0, 0.0, 0.0, 1.0, 0.0},
                       {0.0, 0.0, 0.0, 0.0, 0.5}});
}

SSystemModel s4_truth()
{
    return make_model({5.0, 10.0, 10.0, 8.0, 10.0},
                      {{0.0, 0.0, 1.0, 0.0, -1.0},
                       {2.0, 0.0, 0.0, 0.0, 0.0},
                       {0.0, -1.0, 0.0, 0.0, 0.0},
                       {0.0, 0.0, 2.0, 0.0, -1.0},
                       {0.0, 0.0, 0.0, 2.0, 0.0}},
                      {10.0, 10.0, 10.0, 10.0, 10.0},
                      {{2.0, 0.0, 0.0, 0.0, 0.0},
                       {0.0, 2.0, 0.0, 0.0, 0.0},
                       {0.0, -1.0, 2.0, 0.0, 0.0},
                       {0.0, 0.0, 0.0, 2.0, 0.0},
                       {0.0, 0.0, 0.0, 0.0, 2.0}});
}

constexpr double kS4Step = 0.0083;

} // namespace

void BenchmarkSpec::validate() const
{
    truth.validate();
    if (initial_conditions.empty())
        throw DomainError("benchmark '" + name + "': no initial conditions");
    for (const auto& x0 : initial_conditions) {
        if (x0.size() != truth.genes())
            throw DomainError("benchmark '" + name + "': initial condition has wrong size");
        for (double v : x0)
            if (!(v > 0.0))
                throw DomainError("benchmark '" + name + "': initial condition must be > 0");
    }
    if (!(step > 0.0) || !(t_end > t_start) || samples_per_set < 5)
        throw DomainError("benchmark '" + name + "': invalid sampling protocol");
}

const std::vector<std::string>& benchmark_names()
{
    static const std::vector<std::string> names{"S1", "S2", "S3", "S4", "S4-multi"};
    return names;
}

BenchmarkSpec benchmark(std::string_view name)
{
    BenchmarkSpec spec;
    spec.name = std::string(name);
    if (name == "S1") {
        spec.truth = s1_truth();
        spec.initial_conditions = {{1.9, 0.9, 3.0}};
        spec.t_start = 0.0;
        spec.t_end = 5.0;
        spec.step = 0.1;
        spec.samples_per_set = 51;
    } else if (name == "S2") {
        spec.truth = s2_truth();
        spec.initial_conditions = {{10.0, 1.0, 2.0, 3.0}};
        spec.t_start = 0.0;
        spec.t_end = 5.0;
        spec.step = 0.1;
        spec.samples_per_set = 51;
    } else if (name == "S3") {
        spec.truth = s3_truth();
        spec.initial_conditions = {{10.0, 1.0, 2.0, 3.0, 4.0}};
        spec.t_start = 0.0;
        spec.t_end = 10.0;
        spec.step = 0.1;
        spec.samples_per_set = 101;
    } else if (name == "S4") {
        // 0..0.5 at 0.0083 has 61 grid points; the protocol takes the first 60.
        spec.truth = s4_truth();
        spec.initial_conditions = {{0.7, 0.12, 0.14, 0.16, 0.18}};
        spec.t_start = 0.0;
        spec.t_end = 0.5;
        spec.step = kS4Step;
        spec.samples_per_set = 60;
    } else if (name == "S4-multi") {
        // Sets 1 and 2 are identical in the published protocol; kept verbatim.
        spec.truth = s4_truth();
        spec.initial_conditions = {{0.7, 0.12, 0.14, 0.16, 0.18},
                                   {0.7, 0.12, 0.14, 0.16, 0.18},
                                   {0.1, 0.12, 0.7, 0.16, 0.18},
                                   {0.1, 0.12, 0.14, 0.16, 0.7}};
        spec.t_start = 0.0;
        spec.samples_per_set = 15;
        spec.step = kS4Step;
        spec.t_end = spec.step * static_cast<double>(spec.samples_per_set - 1);
    } else {
        throw LookupError("unknown benchmark '" + std::string(name) + "' (expected S1, S2, S3, S4 or S4-multi)");
    }
    spec.validate();
    return spec;
}

std::vector<TimeSeriesDataset> simulate_benchmark(const BenchmarkSpec& spec)
{
    spec.validate();
    std::vector<TimeSeriesDataset> out;
    out.reserve(spec.initial_conditions.size());
    for (std::size_t s = 0; s < spec.initial_conditions.size(); ++s) {
        auto ds = simulate(spec.truth, spec.initial_conditions[s], spec.grid());
        ds.label = spec.name + "_set" + std::to_string(s + 1);
        out.push_back(std::move(ds));
    }
    return out;
}

} // namespace sgrid
