#include "sgrid/ssystem.hpp"

#include "sgrid/errors.hpp"

#include <cmath>
#include <sstream>

namespace sgrid {

namespace {

// Right-hand side without argument checks. Returns false if the state is not
// strictly positive and finite.
bool rhs_into(const SSystemModel& model, std::span<const double> x, std::span<double> out)
{
    const std::size_t n = model.genes();
    for (std::size_t j = 0; j < n; ++j)
        if (!(x[j] > 0.0) || !std::isfinite(x[j]))
            return false;
    for (std::size_t i = 0; i < n; ++i) {
        double prod_g = 1.0;
        double prod_h = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (model.g(i, j) != 0.0)
                prod_g *= std::pow(x[j], model.g(i, j));
            if (model.h(i, j) != 0.0)
                prod_h *= std::pow(x[j], model.h(i, j));
        }
        out[i] = model.alpha[i] * prod_g - model.beta[i] * prod_h;
    }
    return true;
}

[[noreturn]] void throw_integration(double t, std::span<const double> x)
{
    std::ostringstream os;
    os << "simulate: state left the positive domain at t=" << t << " (x=";
    for (std::size_t j = 0; j < x.size(); ++j)
        os << (j ? "," : "") << x[j];
    os << ")";
    throw IntegrationError(os.str(), t);
}

} // namespace

void SSystemModel::validate() const
{
    const std::size_t n = genes();
    if (n == 0)
        throw DomainError("SSystemModel: no genes");
    if (beta.size() != n || g.rows() != n || g.cols() != n || h.rows() != n || h.cols() != n)
        throw DomainError("SSystemModel: inconsistent dimensions");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(alpha[i] > 0.0) || !(beta[i] > 0.0) || !std::isfinite(alpha[i]) || !std::isfinite(beta[i]))
            throw DomainError("SSystemModel: rate constants must be finite and > 0 (equation "
                              + std::to_string(i + 1) + ")");
    }
    for (double v : g.data())
        if (!std::isfinite(v))
            throw DomainError("SSystemModel: non-finite kinetic order in g");
    for (double v : h.data())
        if (!std::isfinite(v))
            throw DomainError("SSystemModel: non-finite kinetic order in h");
}

double TimeSeriesDataset::step() const
{
    if (times.size() < 2)
        return 0.0;
    return (times.back() - times.front()) / static_cast<double>(times.size() - 1);
}

void TimeSeriesDataset::validate() const
{
    if (values.rows() != times.size())
        throw GridError("dataset '" + label + "': row count does not match time count");
    if (times.size() < 5)
        throw InsufficientSamplesError("dataset '" + label + "': at least 5 samples required, got "
                                       + std::to_string(times.size()));
    const double h = step();
    if (!(h > 0.0))
        throw GridError("dataset '" + label + "': times must be strictly increasing");
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double dt = times[k] - times[k - 1];
        if (!(dt > 0.0) || std::abs(dt - h) > kGridTolerance * h)
            throw GridError("dataset '" + label + "': non-uniform time grid at row " + std::to_string(k));
    }
    for (double v : values.data())
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError("dataset '" + label + "': expression levels must be finite and > 0");
}

SampleGrid make_grid(double t_start, double t_end, double step)
{
    if (!(step > 0.0) || !(t_end > t_start))
        throw DomainError("make_grid: need step > 0 and t_end > t_start");
    const auto intervals = static_cast<std::size_t>(std::floor((t_end - t_start) / step + 1e-9));
    return {t_start, step, intervals + 1};
}

std::vector<double> evaluate_rhs(const SSystemModel& model, std::span<const double> state)
{
    if (state.size() != model.genes())
        throw DomainError("evaluate_rhs: state size does not match model");
    std::vector<double> out(model.genes());
    if (!rhs_into(model, state, out))
        throw DomainError("evaluate_rhs: state entries must be finite and > 0");
    return out;
}

TimeSeriesDataset simulate(const SSystemModel& model, std::span<const double> x0,
                           const SampleGrid& grid, int substeps)
{
    model.validate();
    const std::size_t n = model.genes();
    if (x0.size() != n)
        throw DomainError("simulate: initial condition size does not match model");
    for (double v : x0)
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError("simulate: initial condition must be finite and > 0");
    if (!(grid.step > 0.0) || grid.samples == 0 || substeps < 1)
        throw DomainError("simulate: invalid sampling grid");

    TimeSeriesDataset out;
    out.times.resize(grid.samples);
    out.values = Matrix(grid.samples, n);

    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    const double dt = grid.step / substeps;

    for (std::size_t k = 0; k < grid.samples; ++k) {
        out.times[k] = grid.time(k);
        std::copy(x.begin(), x.end(), out.values.row(k).begin());
        if (k + 1 == grid.samples)
            break;
        for (int s = 0; s < substeps; ++s) {
            const double t = grid.time(k) + s * dt;
            if (!rhs_into(model, x, k1))
                throw_integration(t, x);
            for (std::size_t j = 0; j < n; ++j)
                tmp[j] = x[j] + 0.5 * dt * k1[j];
            if (!rhs_into(model, tmp, k2))
                throw_integration(t + 0.5 * dt, tmp);
            for (std::size_t j = 0; j < n; ++j)
                tmp[j] = x[j] + 0.5 * dt * k2[j];
            if (!rhs_into(model, tmp, k3))
                throw_integration(t + 0.5 * dt, tmp);
            for (std::size_t j = 0; j < n; ++j)
                tmp[j] = x[j] + dt * k3[j];
            if (!rhs_into(model, tmp, k4))
                throw_integration(t + dt, tmp);
            for (std::size_t j = 0; j < n; ++j)
                x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            for (double v : x)
                if (!(v > 0.0) || !std::isfinite(v))
                    throw_integration(t + dt, x);
        }
    }
    return out;
}

TimeSeriesDataset simulate(const SSystemModel& model, std::span<const double> x0,
                           double t_start, double t_end, double step)
{
    return simulate(model, x0, make_grid(t_start, t_end, step));
}

double concentration_error(const SSystemModel& model, const TimeSeriesDataset& dataset)
{
    if (dataset.genes() != model.genes())
        throw DomainError("concentration_error: dataset and model gene counts differ");
    if (dataset.samples() == 0)
        return 0.0;
    const SampleGrid grid{dataset.times.front(), dataset.samples() > 1 ? dataset.step() : 1.0,
                          dataset.samples()};
    const auto calc = simulate(model, dataset.values.row(0), grid);
    double err = 0.0;
    for (std::size_t k = 0; k < dataset.samples(); ++k)
        for (std::size_t i = 0; i < dataset.genes(); ++i) {
            const double rel = (calc.values(k, i) - dataset.values(k, i)) / dataset.values(k, i);
            err += rel * rel;
        }
    return err;
}

} // namespace sgrid
