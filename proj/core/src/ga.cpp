#include "evoman/ga.hpp"

#include <algorithm>
#include <numeric>

namespace evoman::ga {

void GaConfig::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (population_size < 1) throw ConfigError("ga.population_size must be positive");
    if (tournament_size < 2) throw ConfigError("ga.tournament_size must be at least 2");
    if (!prob(crossover_rate)) throw ConfigError("ga.crossover_rate must be in [0, 1]");
    if (!prob(mutation_rate)) throw ConfigError("ga.mutation_rate must be in [0, 1]");
    if (mutation_sigma < 0.0) throw ConfigError("ga.mutation_sigma must be non-negative");
    if (elitism >= population_size) throw ConfigError("ga.elitism must be smaller than ga.population_size");
    if (init_sigma < 0.0) throw ConfigError("ga.init_sigma must be non-negative");
}

std::size_t tournament_select(std::span<const double> fitnesses, std::size_t k, Rng& rng) {
    return tournament_select(fitnesses, k, [&rng](std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    });
}

FixedGenome crossover_fixed(const FixedGenome& a, const FixedGenome& b, Rng& rng) {
    if (a.weights.size() != b.weights.size()) throw ContractViolation("crossover of genomes with different lengths");
    std::bernoulli_distribution coin(0.5);
    FixedGenome child;
    child.weights.resize(a.weights.size());
    for (std::size_t i = 0; i < a.weights.size(); ++i) child.weights[i] = coin(rng) ? a.weights[i] : b.weights[i];
    return child;
}

FixedGenome mutate_fixed(FixedGenome g, double rate, double sigma, Rng& rng) {
    if (rate <= 0.0 || sigma <= 0.0) return g;
    std::bernoulli_distribution hit(rate);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& w : g.weights) {
        if (hit(rng)) w = std::clamp(w + noise(rng), -weight_limit, weight_limit);
    }
    return g;
}

FixedGenome random_fixed_genome(std::size_t length, double sigma, Rng& rng) {
    std::normal_distribution<double> dist(0.0, sigma > 0.0 ? sigma : 1.0);
    FixedGenome g;
    g.weights.resize(length);
    for (double& w : g.weights) w = sigma > 0.0 ? std::clamp(dist(rng), -weight_limit, weight_limit) : 0.0;
    return g;
}

std::vector<std::size_t> rank_by_fitness(std::span<const double> fitnesses) {
    std::vector<std::size_t> order(fitnesses.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitnesses[a] > fitnesses[b]; });
    return order;
}

std::vector<FixedGenome> evolve_generation_ga(std::span<const FixedGenome> population, std::span<const double> fitnesses,
                                              const GaConfig& config, Rng& rng) {
    config.validate();
    if (population.size() != config.population_size) throw ContractViolation("population size does not match config");
    if (fitnesses.size() != population.size()) throw ContractViolation("one fitness per genome required");

    std::vector<FixedGenome> next;
    next.reserve(population.size());
    const auto order = rank_by_fitness(fitnesses);
    for (std::size_t e = 0; e < config.elitism; ++e) next.push_back(population[order[e]]);

    std::bernoulli_distribution do_crossover(config.crossover_rate);
    while (next.size() < population.size()) {
        const auto& a = population[tournament_select(fitnesses, config.tournament_size, rng)];
        const auto& b = population[tournament_select(fitnesses, config.tournament_size, rng)];
        FixedGenome child = do_crossover(rng) ? crossover_fixed(a, b, rng) : a;
        next.push_back(mutate_fixed(std::move(child), config.mutation_rate, config.mutation_sigma, rng));
    }
    return next;
}

}  // namespace evoman::ga
