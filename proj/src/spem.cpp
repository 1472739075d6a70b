#include "sgrid/spem.hpp"

#include "sgrid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sgrid {

namespace {

const double kLogMaxProduct = std::log(kMaxDesignProduct);

// Normal equations of the two-column least-squares problem.
struct Gram {
    double a11 = 0.0, a12 = 0.0, a22 = 0.0;
    double r1 = 0.0, r2 = 0.0;

    bool collinear() const
    {
        const double scale = a11 * a22;
        if (!(scale > 0.0))
            return true;
        return (scale - a12 * a12) / scale < kCollinearity;
    }
};

template <class Col1, class Col2>
Gram accumulate(std::size_t m, Col1 c1, Col2 c2, std::span<const double> s)
{
    Gram gr;
    for (std::size_t k = 0; k < m; ++k) {
        const double x1 = c1(k);
        const double x2 = c2(k);
        gr.a11 += x1 * x1;
        gr.a12 += x1 * x2;
        gr.a22 += x2 * x2;
        gr.r1 += x1 * s[k];
        gr.r2 += x2 * s[k];
    }
    return gr;
}

RateConstants solve(const Gram& gr, double ridge)
{
    const double b11 = gr.a11 + ridge;
    const double b22 = gr.a22 + ridge;
    const double det = b11 * b22 - gr.a12 * gr.a12;
    if (!(det != 0.0) || !std::isfinite(det))
        return {};
    return {(b22 * gr.r1 - gr.a12 * gr.r2) / det, (b11 * gr.r2 - gr.a12 * gr.r1) / det};
}

// Only (near-)singular systems are regularised; otherwise the plain normal
// equations are solved exactly.
double ridge_for(const Gram& gr, const LeastSquaresOptions& options)
{
    return options.ridge_factor * (gr.a11 + gr.a22) / 2.0;
}

template <class Col1, class Col2>
double sum_sq_residual(std::size_t m, Col1 c1, Col2 c2, std::span<const double> s, RateConstants gamma)
{
    double j = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double r = s[k] - c1(k) * gamma.alpha - c2(k) * gamma.beta;
        j += r * r;
    }
    return j;
}

void check_design(const Matrix& design, std::span<const double> slopes)
{
    if (design.cols() != 2)
        throw DomainError("design matrix must have two columns");
    if (design.rows() != slopes.size())
        throw DomainError("design matrix and slope vector lengths differ");
    if (design.rows() < 2)
        throw DomainError("at least two rows are required");
}

// Moves a non-positive Gamma into the positive quadrant. For collinear columns
// the shift runs along the null direction of X, which leaves the fit intact.
bool repair_positive(RateConstants& gamma, const Gram& gr, bool collinear)
{
    if (gamma.alpha > 0.0 && gamma.beta > 0.0)
        return false;
    if (collinear && gr.a11 > 0.0) {
        const double lambda = -gr.a12 / gr.a11; // col2 ~ -lambda * col1
        if (lambda > 0.0 && std::isfinite(lambda)) {
            const double t = std::max((kMinRateConstant - gamma.alpha) / lambda, kMinRateConstant - gamma.beta);
            if (t > 0.0) {
                gamma.alpha += t * lambda;
                gamma.beta += t;
            }
        }
    }
    if (!(gamma.alpha >= kMinRateConstant))
        gamma.alpha = kMinRateConstant;
    if (!(gamma.beta >= kMinRateConstant))
        gamma.beta = kMinRateConstant;
    return true;
}

} // namespace

int EquationExponents::connections() const
{
    int k = 0;
    for (auto b : mask_g)
        k += b ? 1 : 0;
    for (auto b : mask_h)
        k += b ? 1 : 0;
    return k;
}

EquationExponents EquationExponents::from_packed(std::size_t index, std::span<const std::uint8_t> bits,
                                                 std::span<const double> reals)
{
    if (bits.size() != reals.size() || bits.size() % 2 != 0)
        throw DomainError("from_packed: bits and reals must both have length 2N");
    const std::size_t n = bits.size() / 2;
    EquationExponents e;
    e.index = index;
    e.mask_g.assign(bits.begin(), bits.begin() + n);
    e.mask_h.assign(bits.begin() + n, bits.end());
    e.g_row.assign(reals.begin(), reals.begin() + n);
    e.h_row.assign(reals.begin() + n, reals.end());
    return e;
}

Matrix design_matrix(const EquationExponents& exponents, std::span<const TimeSeriesDataset> datasets)
{
    if (datasets.empty())
        throw DomainError("design_matrix: no datasets");
    const std::size_t n = exponents.genes();
    if (exponents.h_row.size() != n || exponents.mask_g.size() != n || exponents.mask_h.size() != n)
        throw DomainError("design_matrix: exponent vectors have inconsistent lengths");
    std::size_t rows = 0;
    for (const auto& ds : datasets) {
        if (ds.genes() != n)
            throw DomainError("design_matrix: dataset '" + ds.label + "' has the wrong gene count");
        rows += ds.samples();
    }

    Matrix out(rows, 2);
    std::size_t r = 0;
    for (const auto& ds : datasets) {
        for (std::size_t k = 0; k < ds.samples(); ++k, ++r) {
            double prod_g = 1.0;
            double prod_h = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double x = ds.values(k, j);
                if (!(x > 0.0))
                    throw DomainError("design_matrix: expression levels must be > 0");
                if (exponents.mask_g[j])
                    prod_g *= std::pow(x, exponents.g_row[j]);
                if (exponents.mask_h[j])
                    prod_h *= std::pow(x, exponents.h_row[j]);
            }
            if (!std::isfinite(prod_g) || !std::isfinite(prod_h) || prod_g > kMaxDesignProduct
                || prod_h > kMaxDesignProduct)
                throw NumericRangeError("design_matrix: power-law product out of range");
            out(r, 0) = prod_g;
            out(r, 1) = -prod_h;
        }
    }
    return out;
}

RateEstimate estimate_rate_constants(const Matrix& design, std::span<const double> slopes,
                                     LeastSquaresOptions options)
{
    check_design(design, slopes);
    const auto gr = accumulate(
        design.rows(), [&](std::size_t k) { return design(k, 0); },
        [&](std::size_t k) { return design(k, 1); }, slopes);
    const bool collinear = gr.collinear();
    return {solve(gr, collinear ? ridge_for(gr, options) : 0.0), collinear};
}

double residual_objective(const Matrix& design, std::span<const double> slopes, LeastSquaresOptions options)
{
    const auto est = estimate_rate_constants(design, slopes, options);
    return sum_sq_residual(
        design.rows(), [&](std::size_t k) { return design(k, 0); },
        [&](std::size_t k) { return design(k, 1); }, slopes, est.gamma);
}

double projection_residual(const Matrix& design, std::span<const double> slopes)
{
    check_design(design, slopes);
    const std::size_t m = design.rows();
    // (X^T X)^-1 X^T S, then S^T (S - X (X^T X)^-1 X^T S).
    double a11 = 0.0, a12 = 0.0, a22 = 0.0, r1 = 0.0, r2 = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        a11 += design(k, 0) * design(k, 0);
        a12 += design(k, 0) * design(k, 1);
        a22 += design(k, 1) * design(k, 1);
        r1 += design(k, 0) * slopes[k];
        r2 += design(k, 1) * slopes[k];
    }
    const double det = a11 * a22 - a12 * a12;
    const double c1 = (a22 * r1 - a12 * r2) / det;
    const double c2 = (a11 * r2 - a12 * r1) / det;
    double j = 0.0;
    for (std::size_t k = 0; k < m; ++k)
        j += slopes[k] * (slopes[k] - design(k, 0) * c1 - design(k, 1) * c2);
    return j;
}

EquationProblem::EquationProblem(std::size_t equation, std::span<const TimeSeriesDataset> datasets,
                                 std::span<const DerivativeTable> slopes)
    : equation_(equation), genes_(0)
{
    if (datasets.empty())
        throw DomainError("EquationProblem: no datasets");
    if (slopes.size() != datasets.size())
        throw DomainError("EquationProblem: one derivative table per dataset is required");
    genes_ = datasets.front().genes();
    if (equation >= genes_)
        throw DomainError("EquationProblem: equation index out of range");

    std::size_t rows = 0;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        datasets[d].validate();
        if (datasets[d].genes() != genes_)
            throw DomainError("EquationProblem: datasets disagree on gene count");
        if (slopes[d].samples() != datasets[d].samples() || slopes[d].genes() != genes_)
            throw DomainError("EquationProblem: derivative table not aligned with dataset");
        rows += datasets[d].samples();
    }

    log_values_ = Matrix(rows, genes_);
    slopes_.reserve(rows);
    std::size_t r = 0;
    for (std::size_t d = 0; d < datasets.size(); ++d)
        for (std::size_t k = 0; k < datasets[d].samples(); ++k, ++r) {
            for (std::size_t j = 0; j < genes_; ++j)
                log_values_(r, j) = std::log(datasets[d].values(k, j));
            slopes_.push_back(slopes[d].slopes(k, equation));
        }
}

EquationProblem::EquationProblem(std::size_t equation, std::span<const TimeSeriesDataset> datasets)
    : EquationProblem(equation, datasets,
                      five_point_derivatives(std::vector<TimeSeriesDataset>(datasets.begin(), datasets.end())))
{
}

bool EquationProblem::fill_columns(std::span<const std::uint8_t> bits, std::span<const double> reals,
                                   std::vector<double>& production, std::vector<double>& degradation) const
{
    if (bits.size() != 2 * genes_ || reals.size() != 2 * genes_)
        throw DomainError("EquationProblem: candidate must have 2N bits and 2N reals");
    const std::size_t m = samples();
    production.resize(m);
    degradation.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
        const auto logs = log_values_.row(r);
        double sg = 0.0;
        double sh = 0.0;
        for (std::size_t j = 0; j < genes_; ++j) {
            if (bits[j])
                sg += reals[j] * logs[j];
            if (bits[genes_ + j])
                sh += reals[genes_ + j] * logs[j];
        }
        if (!(sg <= kLogMaxProduct) || !(sh <= kLogMaxProduct))
            return false;
        production[r] = std::exp(sg);
        degradation[r] = std::exp(sh);
    }
    return true;
}

Matrix EquationProblem::design(std::span<const std::uint8_t> bits, std::span<const double> reals) const
{
    std::vector<double> p, q;
    if (!fill_columns(bits, reals, p, q))
        throw NumericRangeError("EquationProblem::design: power-law product out of range");
    Matrix out(p.size(), 2);
    for (std::size_t r = 0; r < p.size(); ++r) {
        out(r, 0) = p[r];
        out(r, 1) = -q[r];
    }
    return out;
}

CandidateEvaluation EquationProblem::evaluate(std::span<const std::uint8_t> bits,
                                              std::span<const double> reals) const
{
    CandidateEvaluation ev;
    for (auto b : bits)
        ev.k += b ? 1 : 0;

    thread_local std::vector<double> p, q;
    if (!fill_columns(bits, reals, p, q)) {
        ev.J = std::numeric_limits<double>::infinity();
        ev.out_of_range = true;
        return ev;
    }

    const std::size_t m = samples();
    auto c1 = [&](std::size_t k) { return p[k]; };
    auto c2 = [&](std::size_t k) { return -q[k]; };
    const auto gr = accumulate(m, c1, c2, slopes_);
    ev.ill_conditioned = gr.collinear();
    ev.gamma = solve(gr, ev.ill_conditioned ? ridge_for(gr, {}) : 0.0);
    ev.repaired = repair_positive(ev.gamma, gr, ev.ill_conditioned);
    ev.J = sum_sq_residual(m, c1, c2, slopes_, ev.gamma);
    if (!std::isfinite(ev.J)) {
        ev.J = std::numeric_limits<double>::infinity();
        ev.out_of_range = true;
    }
    return ev;
}

CandidateEvaluation EquationProblem::evaluate(const EquationExponents& exponents) const
{
    const std::size_t n = exponents.genes();
    if (n != genes_ || exponents.h_row.size() != n || exponents.mask_g.size() != n || exponents.mask_h.size() != n)
        throw DomainError("EquationProblem::evaluate: exponent vectors have inconsistent lengths");
    Bits bits(exponents.mask_g);
    bits.insert(bits.end(), exponents.mask_h.begin(), exponents.mask_h.end());
    std::vector<double> reals(exponents.g_row);
    reals.insert(reals.end(), exponents.h_row.begin(), exponents.h_row.end());
    return evaluate(bits, reals);
}

CandidateEvaluation evaluate_candidate(const EquationExponents& exponents,
                                       std::span<const DerivativeTable> slopes_tables,
                                       std::span<const TimeSeriesDataset> datasets)
{
    const EquationProblem problem(exponents.index, datasets, slopes_tables);
    return problem.evaluate(exponents);
}

} // namespace sgrid
