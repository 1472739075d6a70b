#include "sgrid/deriv.hpp"

#include "sgrid/errors.hpp"

#include <cmath>

namespace sgrid {

namespace {

// f'(x0) on samples f0..f4 at x0, x0+h, ...; and f'(x1) on the same samples.
double forward_0(double f0, double f1, double f2, double f3, double f4)
{
    return -25.0 * f0 + 48.0 * f1 - 36.0 * f2 + 16.0 * f3 - 3.0 * f4;
}

double forward_1(double f0, double f1, double f2, double f3, double f4)
{
    return -3.0 * f0 - 10.0 * f1 + 18.0 * f2 - 6.0 * f3 + f4;
}

void check_grid(const TimeSeriesDataset& ds)
{
    const std::size_t m = ds.samples();
    if (ds.values.rows() != m)
        throw GridError("five_point_derivatives: row count does not match time count");
    if (m < 5)
        throw InsufficientSamplesError("five_point_derivatives: need at least 5 samples, got "
                                       + std::to_string(m));
    const double h = ds.step();
    for (std::size_t k = 1; k < m; ++k) {
        const double dt = ds.times[k] - ds.times[k - 1];
        if (!(h > 0.0) || !(dt > 0.0) || std::abs(dt - h) > kGridTolerance * h)
            throw GridError("five_point_derivatives: non-uniform grid at sample " + std::to_string(k));
    }
}

} // namespace

DerivativeTable five_point_derivatives(const TimeSeriesDataset& dataset)
{
    check_grid(dataset);
    const std::size_t m = dataset.samples();
    const std::size_t n = dataset.genes();
    const double denom = 12.0 * dataset.step();
    const Matrix& f = dataset.values;

    DerivativeTable out{dataset.times, Matrix(m, n)};
    for (std::size_t i = 0; i < n; ++i) {
        out.slopes(0, i) = forward_0(f(0, i), f(1, i), f(2, i), f(3, i), f(4, i)) / denom;
        out.slopes(1, i) = forward_1(f(0, i), f(1, i), f(2, i), f(3, i), f(4, i)) / denom;
        for (std::size_t k = 2; k + 2 < m; ++k)
            out.slopes(k, i) = (f(k - 2, i) - 8.0 * f(k - 1, i) + 8.0 * f(k + 1, i) - f(k + 2, i)) / denom;
        // Mirror of the forward stencils: reversing time negates the slope.
        const std::size_t e = m - 1;
        out.slopes(e, i) = -forward_0(f(e, i), f(e - 1, i), f(e - 2, i), f(e - 3, i), f(e - 4, i)) / denom;
        out.slopes(e - 1, i) = -forward_1(f(e, i), f(e - 1, i), f(e - 2, i), f(e - 3, i), f(e - 4, i)) / denom;
    }
    for (double v : out.slopes.data())
        if (!std::isfinite(v))
            throw DomainError("five_point_derivatives: non-finite slope");
    return out;
}

std::vector<DerivativeTable> five_point_derivatives(const std::vector<TimeSeriesDataset>& datasets)
{
    std::vector<DerivativeTable> out;
    out.reserve(datasets.size());
    for (const auto& ds : datasets)
        out.push_back(five_point_derivatives(ds));
    return out;
}

} // namespace sgrid
