#include "sgrid/modelselect.hpp"

#include "sgrid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sgrid {

double aic(const Objectives& objectives, std::size_t samples)
{
    if (samples == 0)
        throw DomainError("aic: sample count must be positive");
    const double m = static_cast<double>(samples);
    return std::log(std::max(objectives.J, kAicResidualFloor) / m) + 2.0 * objectives.k / m;
}

const EquationCandidate& select_by_aic(std::span<const EquationCandidate> front, std::size_t samples)
{
    if (front.empty())
        throw SelectionError("select_by_aic: empty front");
    std::size_t best = 0;
    double best_aic = aic(front[0].objectives, samples);
    for (std::size_t i = 1; i < front.size(); ++i) {
        const double a = aic(front[i].objectives, samples);
        const auto& b = front[best].objectives;
        const auto& c = front[i].objectives;
        if (a < best_aic || (a == best_aic && (c.k < b.k || (c.k == b.k && c.J < b.J)))) {
            best = i;
            best_aic = a;
        }
    }
    return front[best];
}

MeanConfusion average(std::span<const ConfusionCounts> counts)
{
    MeanConfusion m;
    if (counts.empty())
        return m;
    for (const auto& c : counts) {
        m.tp += static_cast<double>(c.tp);
        m.fn += static_cast<double>(c.fn);
        m.tn += static_cast<double>(c.tn);
        m.fp += static_cast<double>(c.fp);
    }
    const double n = static_cast<double>(counts.size());
    m.tp /= n;
    m.fn /= n;
    m.tn /= n;
    m.fp /= n;
    return m;
}

ConfusionCounts confusion_counts(std::span<const std::uint8_t> inferred, std::span<const std::uint8_t> truth)
{
    if (inferred.size() != truth.size())
        throw DomainError("confusion_counts: mask lengths differ");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = truth[i] != 0;
        const bool p = inferred[i] != 0;
        if (t && p)
            ++c.tp;
        else if (t)
            ++c.fn;
        else if (p)
            ++c.fp;
        else
            ++c.tn;
    }
    return c;
}

DetectionRates sensitivity_specificity(const MeanConfusion& counts)
{
    DetectionRates r;
    if (counts.tp + counts.fn > 0.0)
        r.sensitivity = counts.tp / (counts.tp + counts.fn);
    if (counts.tn + counts.fp > 0.0)
        r.specificity = counts.tn / (counts.tn + counts.fp);
    return r;
}

DetectionRates sensitivity_specificity(const ConfusionCounts& counts)
{
    return sensitivity_specificity(MeanConfusion{static_cast<double>(counts.tp), static_cast<double>(counts.fn),
                                                 static_cast<double>(counts.tn), static_cast<double>(counts.fp)});
}

Bits true_mask(const SSystemModel& model, std::size_t equation)
{
    const std::size_t n = model.genes();
    if (equation >= n)
        throw DomainError("true_mask: equation index out of range");
    Bits mask(2 * n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        mask[j] = model.g(equation, j) != 0.0 ? 1 : 0;
        mask[n + j] = model.h(equation, j) != 0.0 ? 1 : 0;
    }
    return mask;
}

bool same_topology(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b)
{
    return a.size() == b.size()
        && std::equal(a.begin(), a.end(), b.begin(), [](auto x, auto y) { return (x != 0) == (y != 0); });
}

bool front_contains(std::span<const EquationCandidate> front, std::span<const std::uint8_t> mask)
{
    return std::any_of(front.begin(), front.end(),
                       [&](const EquationCandidate& c) { return same_topology(c.bits, mask); });
}

SSystemModel assemble_model(std::span<const EquationCandidate> selected)
{
    const std::size_t n = selected.size();
    if (n == 0)
        throw AssemblyError("assemble_model: no equations", 0);
    SSystemModel m{std::vector<double>(n), std::vector<double>(n), Matrix(n, n), Matrix(n, n)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = selected[i];
        if (c.bits.size() != 2 * n || c.reals.size() != 2 * n)
            throw AssemblyError("assemble_model: equation " + std::to_string(i + 1) + " has the wrong size", i);
        if (!(c.gamma.alpha > 0.0) || !(c.gamma.beta > 0.0) || !std::isfinite(c.gamma.alpha)
            || !std::isfinite(c.gamma.beta))
            throw AssemblyError("assemble_model: non-positive rate constant in equation " + std::to_string(i + 1), i);
        m.alpha[i] = c.gamma.alpha;
        m.beta[i] = c.gamma.beta;
        for (std::size_t j = 0; j < n; ++j) {
            m.g(i, j) = c.bits[j] ? c.reals[j] : 0.0;
            m.h(i, j) = c.bits[n + j] ? c.reals[n + j] : 0.0;
        }
    }
    m.validate();
    return m;
}

InferenceResult select_and_score(std::span<const ParetoSet> fronts, std::size_t samples, const SSystemModel& truth)
{
    if (fronts.size() != truth.genes())
        throw DomainError("select_and_score: need one front per equation");
    InferenceResult r;
    for (std::size_t i = 0; i < fronts.size(); ++i) {
        const auto& sel = select_by_aic(fronts[i], samples);
        const auto mask = true_mask(truth, i);
        r.selected.push_back(sel);
        r.aic.push_back(aic(sel.objectives, samples));
        r.confusion.push_back(confusion_counts(sel.bits, mask));
        r.success.push_back(same_topology(sel.bits, mask));
    }
    r.model = assemble_model(r.selected);
    return r;
}

} // namespace sgrid
