#pragma once

#include "sgrid/moea.hpp"
#include "sgrid/ssystem.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sgrid {

// Residual floor inside the logarithm; noise-free data can reach J = 0.
inline constexpr double kAicResidualFloor = 1e-300;

/// log(J / M) + 2k / M.
double aic(const Objectives& objectives, std::size_t samples);

/// Front member with minimum AIC; ties by smaller k, then smaller J.
/// Throws SelectionError on an empty front.
const EquationCandidate& select_by_aic(std::span<const EquationCandidate> front, std::size_t samples);

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;

    std::size_t total() const noexcept { return tp + fn + tn + fp; }
};

/// Counts averaged over runs; entries may be fractional.
struct MeanConfusion {
    double tp = 0.0;
    double fn = 0.0;
    double tn = 0.0;
    double fp = 0.0;
};

MeanConfusion average(std::span<const ConfusionCounts> counts);

ConfusionCounts confusion_counts(std::span<const std::uint8_t> inferred, std::span<const std::uint8_t> truth);

/// Undefined ratios (zero denominator) are absent, never 0.
struct DetectionRates {
    std::optional<double> sensitivity;
    std::optional<double> specificity;
};

DetectionRates sensitivity_specificity(const MeanConfusion& counts);
DetectionRates sensitivity_specificity(const ConfusionCounts& counts);

/// Activation mask (bg_1..bg_N, bh_1..bh_N) of equation `equation` of a model.
Bits true_mask(const SSystemModel& model, std::size_t equation);

bool same_topology(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// True when any front member carries exactly the given mask.
bool front_contains(std::span<const EquationCandidate> front, std::span<const std::uint8_t> mask);

/// One candidate per equation, in order. Masked-off orders are exactly 0.
/// Throws AssemblyError for a non-positive rate constant.
SSystemModel assemble_model(std::span<const EquationCandidate> selected);

struct InferenceResult {
    std::vector<EquationCandidate> selected;
    std::vector<double> aic;
    SSystemModel model;
    std::vector<ConfusionCounts> confusion;
    std::vector<bool> success;
};

/// Selects by AIC per equation, assembles the model and scores the topology
/// against `truth`.
InferenceResult select_and_score(std::span<const ParetoSet> fronts, std::size_t samples, const SSystemModel& truth);

} // namespace sgrid
