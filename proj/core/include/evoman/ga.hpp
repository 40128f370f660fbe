#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "evoman/errors.hpp"
#include "evoman/neurocontroller.hpp"
#include "evoman/rng.hpp"

namespace evoman::ga {

using nn::FixedGenome;

inline constexpr double weight_limit = 30.0;

struct GaConfig {
    std::size_t population_size = 50;
    std::size_t tournament_size = 3;
    double crossover_rate = 0.9;
    double mutation_rate = 0.05;
    double mutation_sigma = 0.5;
    std::size_t elitism = 1;
    /// Standard deviation of the initial random weights.
    double init_sigma = 1.0;

    /// Throws ConfigError when a field is out of range.
    void validate() const;

    friend bool operator==(const GaConfig&, const GaConfig&) = default;
};

/// Index of the fittest of `k` uniform draws (with replacement); ties go to the lowest index.
/// `draw(n)` must return an index in [0, n).
template <typename Draw>
    requires std::invocable<Draw&, std::size_t>
std::size_t tournament_select(std::span<const double> fitnesses, std::size_t k, Draw&& draw) {
    if (fitnesses.empty()) throw ContractViolation("tournament over an empty population");
    if (k < 2) throw ContractViolation("tournament size must be at least 2");
    std::size_t best = draw(fitnesses.size());
    for (std::size_t i = 1; i < k; ++i) {
        const std::size_t c = draw(fitnesses.size());
        if (fitnesses[c] > fitnesses[best] || (fitnesses[c] == fitnesses[best] && c < best)) best = c;
    }
    return best;
}

std::size_t tournament_select(std::span<const double> fitnesses, std::size_t k, Rng& rng);

/// Uniform crossover. Throws ContractViolation on length mismatch.
FixedGenome crossover_fixed(const FixedGenome& a, const FixedGenome& b, Rng& rng);

/// Each gene is perturbed by Normal(0, sigma) with probability `rate`, then clamped to ±30.
FixedGenome mutate_fixed(FixedGenome g, double rate, double sigma, Rng& rng);

FixedGenome random_fixed_genome(std::size_t length, double sigma, Rng& rng);

/// One generational step: `config.elitism` best genomes are copied unchanged, the rest come
/// from tournament selection, crossover and mutation.
std::vector<FixedGenome> evolve_generation_ga(std::span<const FixedGenome> population, std::span<const double> fitnesses,
                                              const GaConfig& config, Rng& rng);

/// Indices sorted by descending fitness, stable on ties.
std::vector<std::size_t> rank_by_fitness(std::span<const double> fitnesses);

}  // namespace evoman::ga
