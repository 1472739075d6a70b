#pragma once

#include "sgrid/spem.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace sgrid {

using Rng = std::mt19937_64;

/// (derivative-fit residual, connection count); both minimised.
struct Objectives {
    double J = 0.0;
    int k = 0;

    bool operator==(const Objectives&) const = default;
};

bool dominates(const Objectives& a, const Objectives& b) noexcept;

/// One individual: activation bits (bg_1..bg_N, bh_1..bh_N), kinetic orders
/// (g_1..g_N, h_1..h_N), and what evaluation derived from them.
struct EquationCandidate {
    Bits bits;
    std::vector<double> reals;
    Objectives objectives;
    RateConstants gamma;

    std::size_t genes() const noexcept { return bits.size() / 2; }
};

/// Evaluates bits/reals against the problem and stores objectives and gamma.
void evaluate_into(const EquationProblem& problem, EquationCandidate& candidate);

struct SearchBounds {
    double lower = -3.0;
    double upper = 3.0;
};

/// Per-generation control parameters driven by the process indicator I.
struct Schedule {
    double indicator = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double p3 = 0.0;

    /// Half-width of the scale-factor envelope, F in (-(I+0.1), I+0.1).
    double f_scale() const noexcept { return indicator + 0.1; }
    double draw_f(Rng& rng) const;
};

/// I = 0.9 - 0.1 * floor(gen / (max_gen / 10)), p1 = 4 (I - 0.5)^2,
/// p2 = 0.2, p3 = exp(-I).
Schedule schedule(std::size_t gen, std::size_t max_gen);

using Population = std::vector<EquationCandidate>;

/// Non-domination rank (0 = first front) of each candidate. Exact objective
/// duplicates sit behind every distinct candidate: the c-th repeat of a vector
/// gets rank L + c - 1, L being the number of fronts among distinct vectors.
std::vector<std::size_t> nondomination_ranks(std::span<const EquationCandidate> candidates);

/// Stable sort by (rank, k, J); keeps the first `keep`.
Population rank_and_truncate(Population combined, std::size_t keep);

struct PoolEntry {
    std::vector<double> reals;
    Objectives objectives;
};
using RealPool = std::vector<PoolEntry>;

struct SearchState {
    Population pop;
    Population old_pop;
    Population archive;
    RealPool pool;
    EquationCandidate gbest;
    Rng rng;
    std::size_t gen = 0;
};

struct ParentTriple {
    const EquationCandidate* x1 = nullptr;
    const EquationCandidate* x2 = nullptr;
    const EquationCandidate* x3 = nullptr;
    bool from_population = false;
};

/// With probability p1: x1 != x2 from pop, x3 from old_pop. Otherwise three
/// distinct archive members.
ParentTriple select_parents(const SearchState& state, double p1, Rng& rng);

/// Dominance winner of x1 vs x2; smaller J breaks incomparability, x1 wins ties.
const EquationCandidate& binary_tournament(const EquationCandidate& x1, const EquationCandidate& x2);

Bits make_binary_offspring(std::span<const std::uint8_t> winner, std::span<const std::uint8_t> x1,
                           std::span<const std::uint8_t> x2, std::span<const std::uint8_t> x3,
                           std::span<const std::uint8_t> gbest, double p2, Rng& rng);

std::vector<double> make_real_offspring(std::span<const double> winner, std::span<const double> x1,
                                        std::span<const double> x2, std::span<const double> x3,
                                        const RealPool& pool, double p3, double f, const SearchBounds& bounds,
                                        Rng& rng);

/// Replaces the archive member with greatest k (ties: greatest J) when the
/// offspring dominates it. Returns true on replacement.
bool update_archive(Population& archive, const EquationCandidate& offspring);

/// Replaces one uniformly drawn pool entry when the offspring dominates it.
bool update_pool(RealPool& pool, std::span<const double> reals, const Objectives& objectives, Rng& rng);

/// Non-dominated members, one per k (lowest J, then lexicographically smallest
/// bits), ordered by increasing k.
Population extract_front(std::span<const EquationCandidate> candidates);

using ParetoSet = Population;

struct MoeaConfig {
    std::size_t pop_size = 20;
    std::size_t max_gen = 4000;
    SearchBounds bounds;
    std::uint64_t seed = 0;
};

/// Throws ConfigError for pop_size < 2N+2, max_gen == 0 or bad bounds.
void validate_config(const MoeaConfig& config, std::size_t genes);

struct MoeaHooks {
    // Called once per generation after the population update.
    std::function<void(const SearchState&, const Schedule&)> on_generation;
    // Called for every evaluated candidate (initial populations and offspring).
    std::function<void(const EquationCandidate&)> on_evaluation;
};

ParetoSet run_equation_inference(const EquationProblem& problem, const MoeaConfig& config,
                                 const MoeaHooks& hooks = {});

} // namespace sgrid
