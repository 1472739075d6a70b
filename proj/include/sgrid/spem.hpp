#pragma once

#include "sgrid/deriv.hpp"
#include "sgrid/matrix.hpp"
#include "sgrid/ssystem.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sgrid {

using Bits = std::vector<std::uint8_t>;

/// Candidate kinetic orders for one equation. Masked-off entries count as 0.
struct EquationExponents {
    std::size_t index = 0; // 0-based equation
    std::vector<double> g_row;
    std::vector<double> h_row;
    Bits mask_g;
    Bits mask_h;

    std::size_t genes() const noexcept { return g_row.size(); }
    int connections() const;

    /// Packs as (bg_1..bg_N, bh_1..bh_N) and (g_1..g_N, h_1..h_N).
    static EquationExponents from_packed(std::size_t index, std::span<const std::uint8_t> bits,
                                         std::span<const double> reals);
};

struct RateConstants {
    double alpha = 0.0;
    double beta = 0.0;
};

struct RateEstimate {
    RateConstants gamma;
    bool ill_conditioned = false; // design columns (numerically) collinear
};

struct LeastSquaresOptions {
    // Ridge is ridge_factor * trace(X^T X) / 2, added only when the design
    // columns are collinear (see kCollinearity).
    double ridge_factor = 1e-8;
};

// Design products above this magnitude are rejected as out of range.
inline constexpr double kMaxDesignProduct = 1e12;
// Floor used when repairing non-positive rate constants.
inline constexpr double kMinRateConstant = 1e-6;
// sin^2 of the angle between the two design columns below which they are
// treated as collinear.
inline constexpr double kCollinearity = 1e-10;

/// Row k: (prod_j X_j(t_k)^g_ij, -prod_j X_j(t_k)^h_ij), rows of all datasets
/// stacked in order. Throws NumericRangeError if a product exceeds
/// kMaxDesignProduct or is not finite.
Matrix design_matrix(const EquationExponents& exponents, std::span<const TimeSeriesDataset> datasets);

/// Normal-equation solution of min ||S - X Gamma||^2; ridge-regularised only
/// for collinear designs.
RateEstimate estimate_rate_constants(const Matrix& design, std::span<const double> slopes,
                                     LeastSquaresOptions options = {});

/// ||S - X Gamma_hat||^2 with Gamma_hat from estimate_rate_constants.
double residual_objective(const Matrix& design, std::span<const double> slopes,
                          LeastSquaresOptions options = {});

/// S^T [I - X (X^T X)^-1 X^T] S evaluated literally (no ridge). Only
/// meaningful for well-conditioned designs.
double projection_residual(const Matrix& design, std::span<const double> slopes);

struct CandidateEvaluation {
    double J = 0.0;
    int k = 0;
    RateConstants gamma;
    bool ill_conditioned = false;
    bool repaired = false; // gamma was moved into the positive quadrant
    bool out_of_range = false;
};

/// Precomputed data for repeated evaluation of one equation: log X stacked
/// over all datasets and the matching slopes of gene `equation`.
class EquationProblem {
public:
    EquationProblem(std::size_t equation, std::span<const TimeSeriesDataset> datasets,
                    std::span<const DerivativeTable> slopes);

    /// Differentiates the datasets itself.
    EquationProblem(std::size_t equation, std::span<const TimeSeriesDataset> datasets);

    std::size_t equation() const noexcept { return equation_; }
    std::size_t genes() const noexcept { return genes_; }
    std::size_t samples() const noexcept { return slopes_.size(); }
    std::span<const double> slopes() const noexcept { return slopes_; }

    /// Same contract as design_matrix.
    Matrix design(std::span<const std::uint8_t> bits, std::span<const double> reals) const;

    CandidateEvaluation evaluate(std::span<const std::uint8_t> bits, std::span<const double> reals) const;
    CandidateEvaluation evaluate(const EquationExponents& exponents) const;

private:
    bool fill_columns(std::span<const std::uint8_t> bits, std::span<const double> reals,
                      std::vector<double>& production, std::vector<double>& degradation) const;

    std::size_t equation_;
    std::size_t genes_;
    Matrix log_values_;
    std::vector<double> slopes_;
};

/// First objective, second objective and positive rate constants for one
/// candidate. Overflow yields J = +inf with k unchanged.
CandidateEvaluation evaluate_candidate(const EquationExponents& exponents,
                                       std::span<const DerivativeTable> slopes_tables,
                                       std::span<const TimeSeriesDataset> datasets);

} // namespace sgrid
