#pragma once

#include "sgrid/benchmarks.hpp"
#include "sgrid/deriv.hpp"
#include "sgrid/moea.hpp"
#include "sgrid/spem.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

namespace sgrid::io {

using nlohmann::json;

/// Shortest round-trip decimal representation.
std::string format_double(double v);

// CSV: header `t,X1,...,XN`, one row per sample, LF line endings.
void write_dataset_csv(std::ostream& os, const TimeSeriesDataset& dataset);
void write_dataset_csv(const std::filesystem::path& path, const TimeSeriesDataset& dataset);
TimeSeriesDataset read_dataset_csv(std::istream& is, std::string label = {});
TimeSeriesDataset read_dataset_csv(const std::filesystem::path& path);

// Header `t,dX1,...,dXN`.
void write_derivatives_csv(std::ostream& os, const DerivativeTable& table);
void write_derivatives_csv(const std::filesystem::path& path, const DerivativeTable& table);

json to_json(const SSystemModel& model);
SSystemModel model_from_json(const json& j);

json to_json(const BenchmarkSpec& spec);
BenchmarkSpec benchmark_from_json(const json& j);

// Infinite J is written as null.
json to_json(const EquationCandidate& candidate);
EquationCandidate candidate_from_json(const json& j);

json to_json(const ParetoSet& front);
ParetoSet front_from_json(const json& j);

/// Debug dump with keys `design`, `slopes`, `gamma`, `J`.
json spem_diagnostic(const Matrix& design, std::span<const double> slopes, const RateConstants& gamma, double J);

/// One run-log line: `gen`, `I`, `front` (list of {k, J}), `gbest_k`.
json generation_record(const SearchState& state, const Schedule& sched);

json read_json(const std::filesystem::path& path);

/// Writes to a sibling temporary file then renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json_atomic(const std::filesystem::path& path, const json& j);

} // namespace sgrid::io
