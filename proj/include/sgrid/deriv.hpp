#pragma once

#include "sgrid/matrix.hpp"
#include "sgrid/ssystem.hpp"

#include <vector>

namespace sgrid {

/// Slope estimates S_i(t_k), same shape as the source dataset.
struct DerivativeTable {
    std::vector<double> times;
    Matrix slopes;

    std::size_t samples() const noexcept { return times.size(); }
    std::size_t genes() const noexcept { return slopes.cols(); }
};

/// Fourth-order five-point differentiation: central stencil in the interior,
/// one-sided five-point stencils on the first two and last two samples.
/// Throws InsufficientSamplesError (M < 5) or GridError (non-uniform grid).
DerivativeTable five_point_derivatives(const TimeSeriesDataset& dataset);

/// Differentiates each dataset independently; stencils never cross datasets.
std::vector<DerivativeTable> five_point_derivatives(const std::vector<TimeSeriesDataset>& datasets);

} // namespace sgrid
