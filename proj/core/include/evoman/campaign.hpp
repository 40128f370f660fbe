#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evoman/evaluation.hpp"
#include "evoman/ga.hpp"
#include "evoman/neat.hpp"

namespace evoman::campaign {

enum class Algorithm { ga, neat };
const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct AlgorithmConfig {
    Algorithm algorithm = Algorithm::neat;
    ga::GaConfig ga;
    neat::NeatConfig neat;

    std::size_t population_size() const;

    friend bool operator==(const AlgorithmConfig&, const AlgorithmConfig&) = default;
};

/// A population of controller genomes evolved by either algorithm.
class Population {
public:
    static Population random(const AlgorithmConfig& cfg, Rng& rng);
    static Population from_json(const nlohmann::json& j, const AlgorithmConfig& cfg);

    std::size_t size() const;
    nn::Genome genome(std::size_t i) const;
    std::unique_ptr<eval::Controller> controller(std::size_t i) const;

    /// Replaces the population with the next generation bred from `fitness`.
    void advance(std::span<const double> fitness, Rng& rng);

    /// Species sizes of the current population (NEAT only; empty for GA).
    std::vector<std::size_t> species_sizes() const;

    /// Canonical text of all genomes; equal iff the populations are identical.
    std::string fingerprint() const;
    nlohmann::json to_json() const;

private:
    explicit Population(AlgorithmConfig cfg) : cfg_(std::move(cfg)) {}

    AlgorithmConfig cfg_;
    std::vector<nn::FixedGenome> fixed_;
    std::vector<nn::NeatGenome> neat_;
    neat::NeatState neat_state_;
};

/// Index of the best fitness, lowest index on ties.
std::size_t best_index(std::span<const double> fitness);

struct BaselineSetup {
    AlgorithmConfig algorithm;
    int enemy_id = 1;
    std::uint64_t seed = 1;
    int generations = 50;
    int tick_limit = engine::default_tick_limit;
    eval::FitnessWeights weights = eval::FitnessWeights::player_default();
    std::size_t threads = 0;
};

struct BaselineRow {
    Algorithm algorithm = Algorithm::neat;
    int enemy_id = 0;
    std::uint64_t seed = 0;
    int generation = 0;
    double best_fitness = 0.0;
    double best_player_energy = 0.0;
    double enemy_energy = 0.0;
    int duration = 0;
    double mean_fitness = 0.0;
    std::vector<std::size_t> species_sizes;
};

/// Evolves a player against one scripted archetype, one generation per step().
/// Every match of the run uses the same match seed, so fitness is deterministic.
class BaselineRun {
public:
    explicit BaselineRun(BaselineSetup setup);

    bool done() const { return generation_ >= setup_.generations; }
    int generation() const { return generation_; }
    /// Breeds (after the first generation), evaluates and logs one generation.
    const BaselineRow& step();

    const std::vector<BaselineRow>& rows() const { return rows_; }
    const Population& population() const { return population_; }
    std::span<const double> fitness() const { return fitness_; }
    nn::Genome best_genome() const;
    /// The best genome of the last evaluated generation replayed against the archetype.
    eval::MatchReport best_match(bool record) const;
    std::uint64_t match_seed() const;

    nlohmann::json checkpoint() const;
    static BaselineRun resume(BaselineSetup setup, const nlohmann::json& checkpoint);

private:
    BaselineSetup setup_;
    Rng rng_;
    Population population_;
    int generation_ = 0;
    std::vector<double> fitness_;
    std::vector<BaselineRow> rows_;
};

struct CoevolutionSchedule {
    int turn_length = 3;
    /// Generations per side.
    int total_generations = 100;
    Side starting_side = Side::player;

    void validate() const;
    /// Evolving side of every generation, both sides' budgets interleaved.
    std::vector<Side> unroll() const;

    friend bool operator==(const CoevolutionSchedule&, const CoevolutionSchedule&) = default;
};

struct CoevolutionSetup {
    AlgorithmConfig player;
    AlgorithmConfig enemy;
    CoevolutionSchedule schedule;
    int enemy_id = 1;
    std::uint64_t seed = 1;
    int tick_limit = engine::default_tick_limit;
    eval::FitnessWeights player_weights = eval::FitnessWeights::player_default();
    eval::FitnessWeights enemy_weights = eval::FitnessWeights::enemy_default();
    std::size_t sample_size = 5;
    std::size_t threads = 0;
};

struct CoevolutionRow {
    int generation = 0;
    Side evolving_side = Side::player;
    /// Generation count of the evolving side, 1-based.
    int side_generation = 0;
    double best_player_energy = 0.0;
    double best_enemy_energy = 0.0;
    double best_fitness = 0.0;
    int duration = 0;
};

/// Competitive coevolution of a player and an enemy population, one generation per step().
/// The evolving side is scored against the frozen side's best plus random members; the
/// frozen side stays bit-for-bit unchanged.
class CoevolutionRun {
public:
    explicit CoevolutionRun(CoevolutionSetup setup);

    bool done() const { return generation_ >= static_cast<int>(sides_.size()); }
    int generation() const { return generation_; }
    const CoevolutionRow& step();

    const std::vector<CoevolutionRow>& rows() const { return rows_; }
    const Population& population(Side side) const { return side == Side::player ? player_ : enemy_; }
    std::span<const double> fitness(Side side) const { return side == Side::player ? player_fitness_ : enemy_fitness_; }
    nn::Genome best_genome(Side side) const;
    eval::MatchReport best_match(bool record) const;

    nlohmann::json checkpoint() const;
    static CoevolutionRun resume(CoevolutionSetup setup, const nlohmann::json& checkpoint);

private:
    std::uint64_t match_seed(int generation) const;
    eval::MatchReport play(std::size_t player, std::size_t enemy, std::uint64_t seed, bool record) const;
    std::vector<double> evaluate(Side side, std::uint64_t seed, std::span<const std::size_t> sample) const;

    CoevolutionSetup setup_;
    std::vector<Side> sides_;
    Rng player_rng_;
    Rng enemy_rng_;
    Rng sample_rng_;
    Population player_;
    Population enemy_;
    int generation_ = 0;
    std::vector<double> player_fitness_;
    std::vector<double> enemy_fitness_;
    /// Whether each side has been scored during one of its own turns.
    bool player_evaluated_ = false;
    bool enemy_evaluated_ = false;
    std::vector<CoevolutionRow> rows_;
};

}  // namespace evoman::campaign
