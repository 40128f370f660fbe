#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "evoman/neurocontroller.hpp"
#include "evoman/rng.hpp"

namespace evoman::neat {

using nn::ConnectionGene;
using nn::NeatGenome;
using nn::NodeGene;
using nn::NodeKind;

struct NeatConfig {
    std::size_t population_size = 150;
    double compat_threshold = 3.0;
    double c_excess = 1.0;
    double c_disjoint = 1.0;
    double c_weight = 0.4;
    double weight_mutate_rate = 0.8;
    double add_node_rate = 0.03;
    double add_connection_rate = 0.05;
    double survival_fraction = 0.2;
    int stale_species_limit = 15;
    std::size_t elitism_per_species = 1;
    /// Fraction of non-elite offspring produced by crossover (the rest are mutated clones).
    double crossover_rate = 0.75;
    double interspecies_rate = 0.001;
    /// Per-connection chance of a Normal(0, perturb_sigma) nudge; otherwise the weight is
    /// redrawn from Uniform(-replace_range, replace_range).
    double perturb_probability = 0.9;
    double perturb_sigma = 0.5;
    double replace_range = 2.0;
    double weight_limit = 30.0;
    double init_sigma = 1.0;
    double disabled_inherit_probability = 0.75;
    int add_connection_tries = 20;

    void validate() const;

    friend bool operator==(const NeatConfig&, const NeatConfig&) = default;
};

/// Global structural-innovation bookkeeping for one run.
class InnovationRegistry {
public:
    InnovationRegistry() = default;
    /// Pre-registers the initial fully connected input->output links.
    InnovationRegistry(int inputs, int outputs);

    /// Innovation of the (from, to) link; stable for the whole run.
    int connection(int from, int to);
    /// Hidden node id created by splitting the connection with `innovation`. Repeated splits
    /// of the same connection within one generation share the id.
    int split(int innovation);
    int fresh_node() { return next_node_id_++; }
    void begin_generation() { splits_.clear(); }

    int next_innovation() const { return next_innovation_; }
    int next_node_id() const { return next_node_id_; }
    const std::map<std::pair<int, int>, int>& seen() const { return seen_; }

    nlohmann::json to_json() const;
    static InnovationRegistry from_json(const nlohmann::json& j);

private:
    int next_innovation_ = 0;
    int next_node_id_ = 0;
    std::map<std::pair<int, int>, int> seen_;
    std::map<int, int> splits_;
};

struct Species {
    int id = 0;
    NeatGenome representative;
    std::vector<std::size_t> members;  ///< indices into the current population
    double best_fitness_ever = 0.0;
    int staleness = 0;
};

/// δ = c_e·E/N + c_d·D/N + c_w·W̄ over connection genes aligned by innovation number.
double compatibility_distance(const NeatGenome& a, const NeatGenome& b, const NeatConfig& cfg);

/// Assigns every genome to the first species (previous ones first, in order) whose
/// representative lies within the threshold, founding new species as needed. Previous
/// species that attract no member are dropped.
std::vector<Species> speciate(std::span<const NeatGenome> population, std::span<const Species> previous,
                              const NeatConfig& cfg, int& next_species_id);

/// adjusted_fitness = fitness / species size for every member.
void fitness_sharing(std::span<const Species> species, std::span<NeatGenome> population);

struct SpeciesShare {
    double adjusted_sum = 0.0;
    bool stale = false;
    bool holds_global_best = false;
};

/// Offspring count per species, proportional to adjusted fitness sums (Hamilton / largest
/// remainder, so the counts always sum to `population_size`). Stale species get zero unless
/// they hold the global best, which always receives at least one slot. Negative sums are
/// shifted by the minimum; an all-zero total allocates uniformly.
std::vector<std::size_t> allocate_offspring(std::span<const SpeciesShare> shares, std::size_t population_size);

/// Matching genes come from either parent at random; disjoint and excess genes from the
/// fitter parent (`a` on ties). A gene disabled in either parent stays disabled with
/// probability `disabled_inherit_probability`.
NeatGenome crossover_neat(const NeatGenome& a, const NeatGenome& b, Rng& rng, double disabled_inherit_probability = 0.75);

/// Splits a random enabled connection. Returns false (genome untouched) when none exists.
bool mutate_add_node(NeatGenome& g, InnovationRegistry& registry, Rng& rng);

/// Adds one new feed-forward link after at most `tries` candidate draws. Returns false when
/// no legal pair was found.
bool mutate_add_connection(NeatGenome& g, InnovationRegistry& registry, Rng& rng, int tries = 20);

/// With probability cfg.weight_mutate_rate, perturbs or replaces every connection weight
/// and non-input bias.
void mutate_weights_neat(NeatGenome& g, const NeatConfig& cfg, Rng& rng);

struct GenerationReport {
    std::size_t species_count = 0;
    std::vector<std::size_t> species_sizes;
    double best_fitness = 0.0;
};

struct NeatState {
    InnovationRegistry registry;
    std::vector<Species> species;
    int next_species_id = 1;
    int generation = 0;
    GenerationReport last_report;

    nlohmann::json to_json() const;
    static NeatState from_json(const nlohmann::json& j);
};

/// Fully connected input->output genomes with Normal(0, init_sigma) weights and biases.
std::vector<NeatGenome> initial_population(int inputs, int outputs, const NeatConfig& cfg, NeatState& state, Rng& rng);

/// speciate -> share -> allocate -> reproduce. Returns a population of the same size.
std::vector<NeatGenome> evolve_generation_neat(std::span<const NeatGenome> population, std::span<const double> fitnesses,
                                               NeatState& state, const NeatConfig& cfg, Rng& rng);

}  // namespace evoman::neat
