#pragma once

#include "sgrid/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sgrid::cli {

struct SimulateOptions {
    std::string name;                       // benchmark name
    std::optional<std::filesystem::path> model; // benchmark-style JSON instead of a name
    std::filesystem::path out = ".";
    bool slopes = false;
};

struct InferOptions {
    std::string benchmark;
    std::vector<std::filesystem::path> data;
    std::size_t datasets = 0; // 0: the benchmark's own set count
    std::vector<std::size_t> equations; // 1-based, as typed
    InferenceConfig config;
    std::filesystem::path out = "results";
};

struct EvaluateOptions {
    std::filesystem::path dir;
    std::string benchmark; // empty: take it from meta.json
    std::vector<std::filesystem::path> data;
};

struct BenchOptions {
    std::vector<std::string> names;
    InferenceConfig config;
    std::filesystem::path out = "bench";
};

// Each returns the process exit status.
int cmd_simulate(const SimulateOptions& opts);
int cmd_infer(const InferOptions& opts);
int cmd_evaluate(const EvaluateOptions& opts);
int cmd_bench(const BenchOptions& opts);

/// Parses "lo,hi".
SearchBounds parse_bounds(const std::string& text);

} // namespace sgrid::cli
