#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "evoman/actions.hpp"
#include "evoman/sensors.hpp"

namespace evoman::nn {

/// Network output order. Index j of every output layer drives this action.
enum class Output : std::size_t { left = 0, right = 1, jump = 2, shoot = 3, release = 4 };
inline constexpr std::size_t output_count = 5;
inline constexpr std::size_t input_count = sensors::sensor_count;
/// 68 x 5 weights followed by 5 biases.
inline constexpr std::size_t fixed_genome_length = input_count * output_count + output_count;
inline constexpr int genome_format_version = 1;
/// Firing threshold; an output fires only when strictly above it.
inline constexpr double fire_threshold = 0.5;

class NonFiniteOutput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double logistic(double x);

/// Maps five output activations to an ActionSet. Throws NonFiniteOutput on NaN/inf.
ActionSet to_actions(std::span<const double> outputs);

/// Single-layer weight vector: row j holds the input weights of output j, biases at the end.
struct FixedGenome {
    std::vector<double> weights;

    friend bool operator==(const FixedGenome&, const FixedGenome&) = default;
};

/// Evaluates a single logistic layer with `outputs.size()` units over `inputs`. `weights`
/// has outputs*(inputs+1) entries laid out like FixedGenome.
void evaluate_layer(std::span<const double> weights, std::span<const double> inputs, std::span<double> outputs);

/// Throws InvalidGenome unless the genome has exactly fixed_genome_length finite weights.
void validate_controller(const FixedGenome& genome);

ActionSet activate_fixed(const FixedGenome& genome, const sensors::SensorVector& sensors);

enum class NodeKind { input, output, hidden };

struct NodeGene {
    int id = 0;
    NodeKind kind = NodeKind::hidden;
    double bias = 0.0;  ///< ignored for inputs
    bool active = true;

    friend bool operator==(const NodeGene&, const NodeGene&) = default;
};

struct ConnectionGene {
    int from = 0;
    int to = 0;
    double weight = 0.0;
    bool enabled = true;
    int innovation = 0;

    friend bool operator==(const ConnectionGene&, const ConnectionGene&) = default;
};

/// Node ids 0..inputs-1 are inputs and inputs..inputs+outputs-1 are outputs. Nodes are kept
/// sorted by id and connections by innovation.
struct NeatGenome {
    int inputs = 0;
    int outputs = 0;
    std::vector<NodeGene> nodes;
    std::vector<ConnectionGene> connections;
    double fitness = 0.0;
    double adjusted_fitness = 0.0;

    const NodeGene* find_node(int id) const;
    const ConnectionGene* find_connection(int from, int to) const;
    bool has_node(int id) const { return find_node(id) != nullptr; }
    int hidden_count() const;
    int enabled_count() const;
};

/// Innovation number of the initial input->output link; shared by every run so that
/// initial genomes align gene-by-gene.
constexpr int initial_innovation(int input, int output, int inputs) { return output * inputs + input; }

/// Fully connected input->output genome whose weights and biases are copied from a layer
/// weight vector (same layout as FixedGenome).
NeatGenome neat_from_layer(std::span<const double> layer_weights, int inputs, int outputs);

/// Checks structural invariants (unique ids, endpoints exist, sorted genes, no cycles).
void validate(const NeatGenome& genome);

/// True when the connection graph (enabled and disabled genes) has a directed cycle.
bool has_cycle(const NeatGenome& genome);

/// Topologically ordered evaluation plan over enabled connections.
class Phenotype {
public:
    static Phenotype decode(const NeatGenome& genome);

    std::size_t input_count() const { return inputs_; }
    std::size_t output_count() const { return output_slots_.size(); }

    /// Writes output activations; `outputs.size()` must equal output_count().
    void evaluate(std::span<const double> inputs, std::span<double> outputs) const;
    std::vector<double> evaluate(std::span<const double> inputs) const;

private:
    struct Step {
        std::size_t target;
        std::size_t begin;
        std::size_t end;
        double bias;
    };

    std::size_t inputs_ = 0;
    std::size_t node_count_ = 0;
    std::vector<Step> steps_;
    std::vector<std::size_t> sources_;
    std::vector<double> weights_;
    std::vector<std::size_t> output_slots_;
    mutable std::vector<double> scratch_;
};

inline Phenotype decode_neat(const NeatGenome& genome) { return Phenotype::decode(genome); }

ActionSet activate_neat(const Phenotype& phenotype, const sensors::SensorVector& sensors);

using Genome = std::variant<FixedGenome, NeatGenome>;

nlohmann::json to_json(const FixedGenome& g);
nlohmann::json to_json(const NeatGenome& g);
nlohmann::json to_json(const Genome& g);
/// Parses a genome document; throws ParseError on malformed or unsupported documents.
Genome genome_from_json(const nlohmann::json& doc);

void save_genome(const std::filesystem::path& file, const Genome& genome, const nlohmann::json& provenance = {});
Genome load_genome(const std::filesystem::path& file);

}  // namespace evoman::nn
