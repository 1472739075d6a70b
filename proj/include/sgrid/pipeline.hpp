#pragma once

#include "sgrid/benchmarks.hpp"
#include "sgrid/modelselect.hpp"
#include "sgrid/moea.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace sgrid {

struct InferenceConfig {
    std::size_t pop_size = 20;
    std::size_t max_gen = 4000;
    std::size_t runs = 20;
    std::uint64_t base_seed = 1;
    SearchBounds bounds;
    std::vector<std::size_t> equations; // 0-based; empty means all
    bool log_front = false;
    std::size_t threads = 0; // 0: hardware concurrency, capped by GRN_SGRID_THREADS
};

/// base_seed + 10007 * equation + run, both 0-based.
std::uint64_t run_seed(std::uint64_t base_seed, std::size_t equation, std::size_t run);

/// Worker count after applying the GRN_SGRID_THREADS cap.
std::size_t resolve_threads(std::size_t requested);

struct RunRecord {
    std::size_t equation = 0;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    ParetoSet front;
    std::optional<EquationCandidate> selected;
    double aic = 0.0;
    double seconds = 0.0;
    std::string error; // non-empty when the run failed
    std::vector<nlohmann::json> log;
};

struct EquationRuns {
    std::size_t equation = 0;
    std::vector<RunRecord> runs;
};

struct InferenceOutput {
    std::string label;
    std::size_t genes = 0;
    std::size_t samples = 0; // stacked sample count M
    std::size_t datasets = 0;
    InferenceConfig config;
    std::vector<EquationRuns> equations;
};

/// Runs the search for every requested equation and run. Independent
/// (equation, run) tasks are spread over worker threads; results do not depend
/// on the worker count.
InferenceOutput infer(const std::vector<TimeSeriesDataset>& datasets, const InferenceConfig& config,
                      std::string label = "custom");

struct EquationSummary {
    std::size_t equation = 0;
    std::size_t runs = 0;
    std::size_t failed_runs = 0;
    std::size_t front_successes = 0;    // true mask present in the front
    std::size_t selected_successes = 0; // AIC choice has the true mask
    std::vector<ConfusionCounts> confusion; // per successful run, AIC choice
    MeanConfusion mean;
    DetectionRates rates;           // from averaged counts
    DetectionRates mean_run_rates;  // average of per-run ratios
    double seconds = 0.0;

    double success_rate() const { return runs ? static_cast<double>(front_successes) / runs : 0.0; }
    double selected_success_rate() const { return runs ? static_cast<double>(selected_successes) / runs : 0.0; }
};

struct RunModelScore {
    std::size_t run = 0;
    std::optional<SSystemModel> model;
    std::optional<double> concentration_error;
    std::string error;
};

struct EvaluationReport {
    std::string label;
    std::vector<EquationSummary> equations;
    std::vector<RunModelScore> models; // only when every equation was inferred
    double success_rate = 0.0;
    DetectionRates rates;
    double seconds = 0.0;
};

EvaluationReport evaluate(const InferenceOutput& output, const SSystemModel& truth,
                          const std::vector<TimeSeriesDataset>& datasets);

/// `summary.json` document.
nlohmann::json summary_json(const EvaluationReport& report);

/// Per-run result report: selected candidates, AIC, confusion counts,
/// assembled model and concentration error.
nlohmann::json evaluation_json(const InferenceOutput& output, const EvaluationReport& report,
                               const SSystemModel& truth);

/// <dir>/meta.json and <dir>/eq<e>/{front_run<r>,selected_run<r>}.json
/// (plus log_run<r>.jsonl when logging).
void write_inference(const std::filesystem::path& dir, const InferenceOutput& output);

/// Reads what write_inference produced. Throws when nothing is found.
InferenceOutput read_inference(const std::filesystem::path& dir);

} // namespace sgrid
