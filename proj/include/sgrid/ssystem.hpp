#pragma once

#include "sgrid/matrix.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sgrid {

/// Power-law model dX_i/dt = alpha_i prod_j X_j^g_ij - beta_i prod_j X_j^h_ij.
struct SSystemModel {
    std::vector<double> alpha;
    std::vector<double> beta;
    Matrix g;
    Matrix h;

    std::size_t genes() const noexcept { return alpha.size(); }

    /// Throws DomainError when dimensions disagree or a rate constant is not
    /// strictly positive.
    void validate() const;
};

/// Uniformly sampled expression levels, one row per sample.
struct TimeSeriesDataset {
    std::vector<double> times;
    Matrix values;
    std::string label;

    std::size_t samples() const noexcept { return times.size(); }
    std::size_t genes() const noexcept { return values.cols(); }
    double step() const;

    /// Enforces the grid, positivity and minimum-length invariants.
    void validate() const;
};

struct SampleGrid {
    double t_start = 0.0;
    double step = 0.1;
    std::size_t samples = 0;

    double time(std::size_t k) const noexcept { return t_start + static_cast<double>(k) * step; }
};

/// Grid t_start, t_start + step, ..., up to and including t_end (within
/// floating tolerance).
SampleGrid make_grid(double t_start, double t_end, double step);

// Relative tolerance on step uniformity.
inline constexpr double kGridTolerance = 1e-9;

// Number of RK4 sub-steps per sample step.
inline constexpr int kSubstepsPerSample = 10;

std::vector<double> evaluate_rhs(const SSystemModel& model, std::span<const double> state);

TimeSeriesDataset simulate(const SSystemModel& model, std::span<const double> x0,
                           const SampleGrid& grid, int substeps = kSubstepsPerSample);

TimeSeriesDataset simulate(const SSystemModel& model, std::span<const double> x0,
                           double t_start, double t_end, double step);

/// Sum over samples and genes of the squared relative deviation between the
/// model trajectory (started from the dataset's first row) and the data.
double concentration_error(const SSystemModel& model, const TimeSeriesDataset& dataset);

} // namespace sgrid
