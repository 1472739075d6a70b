#include "sgrid/moea.hpp"

#include "sgrid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sgrid {

namespace {

std::size_t uniform_index(std::size_t n, Rng& rng)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

double uniform01(Rng& rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Two distinct indices in [0, n).
std::pair<std::size_t, std::size_t> distinct_pair(std::size_t n, Rng& rng)
{
    const std::size_t a = uniform_index(n, rng);
    std::size_t b = uniform_index(n - 1, rng);
    if (b >= a)
        ++b;
    return {a, b};
}

EquationCandidate random_candidate(const EquationProblem& problem, const SearchBounds& bounds, Rng& rng)
{
    const std::size_t len = 2 * problem.genes();
    EquationCandidate c;
    c.bits.resize(len);
    c.reals.resize(len);
    std::bernoulli_distribution coin(0.5);
    std::uniform_real_distribution<double> real(bounds.lower, bounds.upper);
    for (std::size_t i = 0; i < len; ++i)
        c.bits[i] = coin(rng) ? 1 : 0;
    for (std::size_t i = 0; i < len; ++i)
        c.reals[i] = real(rng);
    evaluate_into(problem, c);
    return c;
}

} // namespace

bool dominates(const Objectives& a, const Objectives& b) noexcept
{
    return a.J <= b.J && a.k <= b.k && (a.J < b.J || a.k < b.k);
}

void evaluate_into(const EquationProblem& problem, EquationCandidate& candidate)
{
    const auto ev = problem.evaluate(candidate.bits, candidate.reals);
    candidate.objectives = {ev.J, ev.k};
    candidate.gamma = ev.gamma;
}

double Schedule::draw_f(Rng& rng) const
{
    return f_scale() * std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
}

Schedule schedule(std::size_t gen, std::size_t max_gen)
{
    if (max_gen == 0)
        throw ConfigError("schedule: max_gen must be positive");
    const std::size_t decile = std::min<std::size_t>(9, (10 * gen) / max_gen);
    Schedule s;
    s.indicator = static_cast<double>(9 - decile) / 10.0;
    s.p1 = 4.0 * (s.indicator - 0.5) * (s.indicator - 0.5);
    s.p2 = 0.2;
    s.p3 = std::exp(-s.indicator);
    return s;
}

std::vector<std::size_t> nondomination_ranks(std::span<const EquationCandidate> candidates)
{
    const std::size_t n = candidates.size();

    // copies[i]: number of earlier candidates with identical objectives.
    std::vector<std::size_t> copies(n, 0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < a; ++b)
            if (candidates[a].objectives == candidates[b].objectives)
                ++copies[a];

    std::vector<std::size_t> dominators(n, 0);
    std::vector<std::vector<std::size_t>> dominated(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (copies[a] == 0 && copies[b] == 0 && dominates(candidates[a].objectives, candidates[b].objectives)) {
                dominated[a].push_back(b);
                ++dominators[b];
            }

    std::vector<std::size_t> rank(n, 0);
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < n; ++i)
        if (copies[i] == 0 && dominators[i] == 0)
            front.push_back(i);
    std::size_t level = 0;
    while (!front.empty()) {
        std::vector<std::size_t> next;
        for (auto i : front) {
            rank[i] = level;
            for (auto j : dominated[i])
                if (--dominators[j] == 0)
                    next.push_back(j);
        }
        front = std::move(next);
        ++level;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (copies[i] > 0)
            rank[i] = level + copies[i] - 1;
    return rank;
}

Population rank_and_truncate(Population combined, std::size_t keep)
{
    const auto rank = nondomination_ranks(combined);
    std::vector<std::size_t> order(combined.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rank[a] != rank[b])
            return rank[a] < rank[b];
        if (combined[a].objectives.k != combined[b].objectives.k)
            return combined[a].objectives.k < combined[b].objectives.k;
        return combined[a].objectives.J < combined[b].objectives.J;
    });
    Population out;
    out.reserve(std::min(keep, combined.size()));
    for (std::size_t i = 0; i < order.size() && out.size() < keep; ++i)
        out.push_back(std::move(combined[order[i]]));
    return out;
}

ParentTriple select_parents(const SearchState& state, double p1, Rng& rng)
{
    ParentTriple t;
    if (uniform01(rng) < p1) {
        const auto [a, b] = distinct_pair(state.pop.size(), rng);
        t.x1 = &state.pop[a];
        t.x2 = &state.pop[b];
        t.x3 = &state.old_pop[uniform_index(state.old_pop.size(), rng)];
        t.from_population = true;
    } else {
        const std::size_t n = state.archive.size();
        const auto [a, b] = distinct_pair(n, rng);
        std::size_t c = uniform_index(n - 2, rng);
        // Skip over a and b in increasing order.
        const std::size_t lo = std::min(a, b);
        const std::size_t hi = std::max(a, b);
        if (c >= lo)
            ++c;
        if (c >= hi)
            ++c;
        t.x1 = &state.archive[a];
        t.x2 = &state.archive[b];
        t.x3 = &state.archive[c];
    }
    return t;
}

const EquationCandidate& binary_tournament(const EquationCandidate& x1, const EquationCandidate& x2)
{
    if (dominates(x1.objectives, x2.objectives))
        return x1;
    if (dominates(x2.objectives, x1.objectives))
        return x2;
    return x2.objectives.J < x1.objectives.J ? x2 : x1;
}

Bits make_binary_offspring(std::span<const std::uint8_t> winner, std::span<const std::uint8_t> x1,
                           std::span<const std::uint8_t> x2, std::span<const std::uint8_t> x3,
                           std::span<const std::uint8_t> gbest, double p2, Rng& rng)
{
    Bits off(winner.begin(), winner.end());
    for (std::size_t i = 0; i < off.size(); ++i) {
        const double u = uniform01(rng);
        if (x2[i] == x3[i] && x1[i] != gbest[i]) {
            if (u < 1.0 - p2)
                off[i] = gbest[i];
        } else if (u < p2) {
            off[i] = uniform01(rng) < 0.5 ? 1 : 0;
        }
    }
    return off;
}

std::vector<double> make_real_offspring(std::span<const double> winner, std::span<const double> x1,
                                        std::span<const double> x2, std::span<const double> x3,
                                        const RealPool& pool, double p3, double f, const SearchBounds& bounds,
                                        Rng& rng)
{
    if (pool.size() < 2)
        throw ConfigError("make_real_offspring: pool needs at least two entries");
    const auto [a, b] = distinct_pair(pool.size(), rng);
    const auto& pa = pool[a].reals;
    const auto& pb = pool[b].reals;

    std::vector<double> off(winner.size());
    for (std::size_t i = 0; i < off.size(); ++i) {
        const double v = uniform01(rng) < p3 ? x1[i] + f * (x2[i] - x3[i]) : winner[i] + f * (pa[i] - pb[i]);
        off[i] = std::clamp(v, bounds.lower, bounds.upper);
    }
    return off;
}

bool update_archive(Population& archive, const EquationCandidate& offspring)
{
    if (archive.empty())
        return false;
    std::size_t worst = 0;
    for (std::size_t i = 1; i < archive.size(); ++i) {
        const auto& w = archive[worst].objectives;
        const auto& c = archive[i].objectives;
        if (c.k > w.k || (c.k == w.k && c.J > w.J))
            worst = i;
    }
    if (!dominates(offspring.objectives, archive[worst].objectives))
        return false;
    archive[worst] = offspring;
    return true;
}

bool update_pool(RealPool& pool, std::span<const double> reals, const Objectives& objectives, Rng& rng)
{
    if (pool.empty())
        return false;
    auto& entry = pool[uniform_index(pool.size(), rng)];
    if (!dominates(objectives, entry.objectives))
        return false;
    entry.reals.assign(reals.begin(), reals.end());
    entry.objectives = objectives;
    return true;
}

Population extract_front(std::span<const EquationCandidate> candidates)
{
    Population front;
    for (const auto& c : candidates) {
        const bool dominated = std::any_of(candidates.begin(), candidates.end(), [&](const EquationCandidate& o) {
            return dominates(o.objectives, c.objectives);
        });
        if (dominated)
            continue;
        auto same_k = std::find_if(front.begin(), front.end(),
                                   [&](const EquationCandidate& f) { return f.objectives.k == c.objectives.k; });
        if (same_k == front.end())
            front.push_back(c);
        else if (c.objectives.J < same_k->objectives.J
                 || (c.objectives.J == same_k->objectives.J && c.bits < same_k->bits))
            *same_k = c;
    }
    std::sort(front.begin(), front.end(), [](const EquationCandidate& a, const EquationCandidate& b) {
        return a.objectives.k < b.objectives.k;
    });
    return front;
}

void validate_config(const MoeaConfig& config, std::size_t genes)
{
    if (config.pop_size < 2 * genes + 2)
        throw ConfigError("population size " + std::to_string(config.pop_size) + " is below 2N+2 = "
                          + std::to_string(2 * genes + 2));
    if (config.max_gen == 0)
        throw ConfigError("max_gen must be at least 1");
    if (!std::isfinite(config.bounds.lower) || !std::isfinite(config.bounds.upper)
        || !(config.bounds.lower < config.bounds.upper))
        throw ConfigError("exponent bounds must be finite with lower < upper");
}

ParetoSet run_equation_inference(const EquationProblem& problem, const MoeaConfig& config, const MoeaHooks& hooks)
{
    validate_config(config, problem.genes());

    SearchState state;
    state.rng.seed(config.seed);
    auto& rng = state.rng;

    auto evaluated = [&](const EquationCandidate& c) {
        if (hooks.on_evaluation)
            hooks.on_evaluation(c);
    };

    // Step 1
    state.pop.reserve(config.pop_size);
    state.old_pop.reserve(config.pop_size);
    for (std::size_t i = 0; i < config.pop_size; ++i) {
        state.pop.push_back(random_candidate(problem, config.bounds, rng));
        evaluated(state.pop.back());
    }
    for (std::size_t i = 0; i < config.pop_size; ++i) {
        state.old_pop.push_back(random_candidate(problem, config.bounds, rng));
        evaluated(state.old_pop.back());
    }
    state.archive = state.old_pop;
    state.pool.reserve(config.pop_size);
    for (const auto& c : state.pop)
        state.pool.push_back({c.reals, c.objectives});
    state.gbest = state.pop[uniform_index(state.pop.size(), rng)];

    Population offspring;
    offspring.reserve(config.pop_size);
    for (state.gen = 0; state.gen < config.max_gen; ++state.gen) {
        const auto sched = schedule(state.gen, config.max_gen);

        // Step 2
        offspring.clear();
        for (std::size_t n = 0; n < config.pop_size; ++n) {
            const auto parents = select_parents(state, sched.p1, rng);
            const auto& winner = binary_tournament(*parents.x1, *parents.x2);
            const double f = sched.draw_f(rng);

            EquationCandidate child;
            child.bits = make_binary_offspring(winner.bits, parents.x1->bits, parents.x2->bits, parents.x3->bits,
                                               state.gbest.bits, sched.p2, rng);
            child.reals = make_real_offspring(winner.reals, parents.x1->reals, parents.x2->reals,
                                              parents.x3->reals, state.pool, sched.p3, f, config.bounds, rng);
            evaluate_into(problem, child);
            evaluated(child);

            update_archive(state.archive, child);
            update_pool(state.pool, child.reals, child.objectives, rng);
            offspring.push_back(std::move(child));
        }

        // Steps 3-4
        state.old_pop = state.pop;
        Population combined = std::move(state.pop);
        combined.insert(combined.end(), std::make_move_iterator(offspring.begin()),
                        std::make_move_iterator(offspring.end()));
        state.pop = rank_and_truncate(std::move(combined), config.pop_size);

        const auto rank = nondomination_ranks(state.pop);
        std::vector<std::size_t> leaders;
        for (std::size_t i = 0; i < rank.size(); ++i)
            if (rank[i] == 0)
                leaders.push_back(i);
        state.gbest = state.pop[leaders[uniform_index(leaders.size(), rng)]];

        if (hooks.on_generation)
            hooks.on_generation(state, sched);
    }

    // Step 5
    return extract_front(state.pop);
}

} // namespace sgrid
