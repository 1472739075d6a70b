#pragma once

#include "sgrid/ssystem.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sgrid {

struct BenchmarkSpec {
    std::string name;
    SSystemModel truth;
    std::vector<std::vector<double>> initial_conditions;
    double t_start = 0.0;
    double t_end = 0.0;
    double step = 0.0;
    std::size_t samples_per_set = 0;

    SampleGrid grid() const { return {t_start, step, samples_per_set}; }
    void validate() const;
};

/// Names accepted by benchmark(), in registry order.
const std::vector<std::string>& benchmark_names();

/// Ground-truth system and sampling protocol; throws LookupError for an
/// unknown name.
BenchmarkSpec benchmark(std::string_view name);

/// One dataset per initial condition, labelled "<name>_set<k>".
std::vector<TimeSeriesDataset> simulate_benchmark(const BenchmarkSpec& spec);

} // namespace sgrid
