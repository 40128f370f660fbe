#include "evoman/neurocontroller.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "evoman/errors.hpp"

namespace evoman::nn {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

ActionSet to_actions(std::span<const double> out) {
    if (out.size() != output_count) throw ContractViolation("controller must produce 5 outputs");
    for (double v : out) {
        if (!std::isfinite(v)) throw NonFiniteOutput("controller produced a non-finite output");
    }
    auto fires = [&](Output o) { return out[static_cast<std::size_t>(o)] > fire_threshold; };
    ActionSet a;
    a.left = fires(Output::left);
    a.right = fires(Output::right);
    a.jump = fires(Output::jump);
    a.shoot = fires(Output::shoot);
    a.release = fires(Output::release);
    return a;
}

void evaluate_layer(std::span<const double> weights, std::span<const double> inputs, std::span<double> outputs) {
    const std::size_t n_in = inputs.size();
    const std::size_t n_out = outputs.size();
    if (weights.size() != n_out * (n_in + 1)) throw ContractViolation("layer weight count does not match shape");
    const double* biases = weights.data() + n_out * n_in;
    for (std::size_t j = 0; j < n_out; ++j) {
        const double* row = weights.data() + j * n_in;
        double acc = biases[j];
        for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * inputs[i];
        outputs[j] = logistic(acc);
    }
}

void validate_controller(const FixedGenome& genome) {
    if (genome.weights.size() != fixed_genome_length) {
        throw InvalidGenome("fixed genome must have " + std::to_string(fixed_genome_length) + " weights, got " +
                            std::to_string(genome.weights.size()));
    }
    for (double w : genome.weights) {
        if (!std::isfinite(w)) throw InvalidGenome("fixed genome contains a non-finite weight");
    }
}

ActionSet activate_fixed(const FixedGenome& genome, const sensors::SensorVector& sensors) {
    std::array<double, output_count> out{};
    evaluate_layer(genome.weights, sensors, out);
    return to_actions(out);
}

const NodeGene* NeatGenome::find_node(int id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id, [](const NodeGene& n, int v) { return n.id < v; });
    return it != nodes.end() && it->id == id ? &*it : nullptr;
}

const ConnectionGene* NeatGenome::find_connection(int from, int to) const {
    for (const auto& c : connections) {
        if (c.from == from && c.to == to) return &c;
    }
    return nullptr;
}

int NeatGenome::hidden_count() const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [](const NodeGene& n) { return n.kind == NodeKind::hidden; }));
}

int NeatGenome::enabled_count() const {
    return static_cast<int>(std::count_if(connections.begin(), connections.end(), [](const ConnectionGene& c) { return c.enabled; }));
}

NeatGenome neat_from_layer(std::span<const double> layer_weights, int inputs, int outputs) {
    const auto n_in = static_cast<std::size_t>(inputs);
    const auto n_out = static_cast<std::size_t>(outputs);
    if (layer_weights.size() != n_out * (n_in + 1)) throw ContractViolation("layer weight count does not match shape");
    NeatGenome g;
    g.inputs = inputs;
    g.outputs = outputs;
    for (int i = 0; i < inputs; ++i) g.nodes.push_back({i, NodeKind::input, 0.0, true});
    for (int o = 0; o < outputs; ++o) {
        g.nodes.push_back({inputs + o, NodeKind::output, layer_weights[n_out * n_in + static_cast<std::size_t>(o)], true});
    }
    for (int o = 0; o < outputs; ++o) {
        for (int i = 0; i < inputs; ++i) {
            g.connections.push_back({i, inputs + o, layer_weights[static_cast<std::size_t>(o) * n_in + static_cast<std::size_t>(i)],
                                     true, initial_innovation(i, o, inputs)});
        }
    }
    return g;
}

bool has_cycle(const NeatGenome& genome) {
    std::map<int, std::vector<int>> adj;
    std::map<int, int> indegree;
    for (const auto& n : genome.nodes) indegree[n.id] = 0;
    for (const auto& c : genome.connections) {
        adj[c.from].push_back(c.to);
        ++indegree[c.to];
    }
    std::vector<int> ready;
    for (const auto& [id, d] : indegree) {
        if (d == 0) ready.push_back(id);
    }
    std::size_t seen = 0;
    while (!ready.empty()) {
        const int n = ready.back();
        ready.pop_back();
        ++seen;
        for (int m : adj[n]) {
            if (--indegree[m] == 0) ready.push_back(m);
        }
    }
    return seen != indegree.size();
}

void validate(const NeatGenome& g) {
    if (g.inputs < 1 || g.outputs < 1) throw InvalidGenome("genome needs at least one input and one output");
    std::set<int> ids;
    int inputs = 0;
    int outputs = 0;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const auto& n = g.nodes[k];
        if (!ids.insert(n.id).second) throw InvalidGenome("duplicate node id " + std::to_string(n.id));
        if (k > 0 && g.nodes[k - 1].id > n.id) throw InvalidGenome("node genes must be sorted by id");
        if (n.kind == NodeKind::input) {
            ++inputs;
            if (n.id >= g.inputs) throw InvalidGenome("input node with out-of-range id");
        } else if (n.kind == NodeKind::output) {
            ++outputs;
            if (n.id < g.inputs || n.id >= g.inputs + g.outputs) throw InvalidGenome("output node with out-of-range id");
        } else if (n.id < g.inputs + g.outputs) {
            throw InvalidGenome("hidden node uses a reserved id");
        }
        if (!std::isfinite(n.bias)) throw InvalidGenome("non-finite bias");
    }
    if (inputs != g.inputs || outputs != g.outputs) throw InvalidGenome("genome must contain every input and output node");
    std::set<int> innovations;
    std::set<std::pair<int, int>> links;
    for (std::size_t k = 0; k < g.connections.size(); ++k) {
        const auto& c = g.connections[k];
        if (!ids.contains(c.from) || !ids.contains(c.to)) throw InvalidGenome("connection endpoint does not exist");
        if (!innovations.insert(c.innovation).second) throw InvalidGenome("duplicate innovation number");
        if (!links.insert({c.from, c.to}).second) throw InvalidGenome("duplicate connection");
        if (k > 0 && g.connections[k - 1].innovation > c.innovation) throw InvalidGenome("connections must be sorted by innovation");
        if (g.find_node(c.to)->kind == NodeKind::input) throw InvalidGenome("connection into an input node");
        if (g.find_node(c.from)->kind == NodeKind::output) throw InvalidGenome("connection out of an output node");
        if (!std::isfinite(c.weight)) throw InvalidGenome("non-finite weight");
    }
    if (has_cycle(g)) throw InvalidGenome("genome contains a cycle");
}

Phenotype Phenotype::decode(const NeatGenome& g) {
    Phenotype p;
    p.inputs_ = static_cast<std::size_t>(g.inputs);
    p.node_count_ = g.nodes.size();

    std::map<int, std::size_t> slot;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) slot[g.nodes[k].id] = k;

    std::vector<std::vector<const ConnectionGene*>> incoming(g.nodes.size());
    std::vector<std::vector<std::size_t>> outgoing(g.nodes.size());
    std::vector<int> indegree(g.nodes.size(), 0);
    for (const auto& c : g.connections) {
        if (!c.enabled) continue;
        auto from = slot.find(c.from);
        auto to = slot.find(c.to);
        if (from == slot.end() || to == slot.end()) throw InvalidGenome("connection endpoint does not exist");
        incoming[to->second].push_back(&c);
        outgoing[from->second].push_back(to->second);
        ++indegree[to->second];
    }

    // Kahn's algorithm; the lowest ready slot goes first so the plan is deterministic.
    std::set<std::size_t> ready;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        if (indegree[k] == 0) ready.insert(k);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        const std::size_t k = *ready.begin();
        ready.erase(ready.begin());
        ++visited;
        const NodeGene& node = g.nodes[k];
        if (node.kind != NodeKind::input) {
            Step s{k, p.sources_.size(), 0, node.bias};
            for (const ConnectionGene* c : incoming[k]) {
                p.sources_.push_back(slot[c->from]);
                p.weights_.push_back(c->weight);
            }
            s.end = p.sources_.size();
            p.steps_.push_back(s);
        }
        for (std::size_t m : outgoing[k]) {
            if (--indegree[m] == 0) ready.insert(m);
        }
    }
    if (visited != g.nodes.size()) throw InvalidGenome("cycle detected while decoding genome");

    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        if (g.nodes[k].kind == NodeKind::input && g.nodes[k].id != static_cast<int>(k)) {
            throw InvalidGenome("input nodes must occupy the first ids");
        }
    }
    for (int o = 0; o < g.outputs; ++o) {
        auto it = slot.find(g.inputs + o);
        if (it == slot.end()) throw InvalidGenome("missing output node");
        p.output_slots_.push_back(it->second);
    }
    p.scratch_.assign(p.node_count_, 0.0);
    return p;
}

void Phenotype::evaluate(std::span<const double> inputs, std::span<double> outputs) const {
    if (inputs.size() != inputs_) throw ContractViolation("phenotype input size mismatch");
    if (outputs.size() != output_slots_.size()) throw ContractViolation("phenotype output size mismatch");
    std::vector<double>& v = scratch_;
    std::copy(inputs.begin(), inputs.end(), v.begin());
    for (const Step& s : steps_) {
        double acc = s.bias;
        for (std::size_t k = s.begin; k < s.end; ++k) acc += weights_[k] * v[sources_[k]];
        v[s.target] = logistic(acc);
    }
    for (std::size_t o = 0; o < output_slots_.size(); ++o) outputs[o] = v[output_slots_[o]];
}

std::vector<double> Phenotype::evaluate(std::span<const double> inputs) const {
    std::vector<double> out(output_slots_.size());
    evaluate(inputs, out);
    return out;
}

ActionSet activate_neat(const Phenotype& phenotype, const sensors::SensorVector& sensors) {
    std::array<double, output_count> out{};
    phenotype.evaluate(sensors, out);
    return to_actions(out);
}

namespace {

const char* kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::input: return "input";
        case NodeKind::output: return "output";
        case NodeKind::hidden: return "hidden";
    }
    return "hidden";
}

NodeKind parse_kind(const std::string& s) {
    if (s == "input") return NodeKind::input;
    if (s == "output") return NodeKind::output;
    if (s == "hidden") return NodeKind::hidden;
    throw ParseError("unknown node kind '" + s + "'");
}

}  // namespace

nlohmann::json to_json(const FixedGenome& g) {
    return {{"format_version", genome_format_version},
            {"kind", "fixed"},
            {"inputs", input_count},
            {"outputs", output_count},
            {"weights", g.weights}};
}

nlohmann::json to_json(const NeatGenome& g) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : g.nodes) {
        nodes.push_back({{"id", n.id}, {"kind", kind_name(n.kind)}, {"bias", n.bias}, {"active", n.active}});
    }
    nlohmann::json conns = nlohmann::json::array();
    for (const auto& c : g.connections) {
        conns.push_back({{"innovation", c.innovation}, {"from", c.from}, {"to", c.to}, {"weight", c.weight}, {"enabled", c.enabled}});
    }
    return {{"format_version", genome_format_version},
            {"kind", "neat"},
            {"inputs", g.inputs},
            {"outputs", g.outputs},
            {"fitness", g.fitness},
            {"nodes", std::move(nodes)},
            {"connections", std::move(conns)}};
}

nlohmann::json to_json(const Genome& g) {
    return std::visit([](const auto& x) { return to_json(x); }, g);
}

Genome genome_from_json(const nlohmann::json& doc) {
    try {
        const int version = doc.at("format_version").get<int>();
        if (version != genome_format_version) {
            throw ParseError("unsupported genome format_version " + std::to_string(version));
        }
        const auto kind = doc.at("kind").get<std::string>();
        if (kind == "fixed") {
            FixedGenome g{doc.at("weights").get<std::vector<double>>()};
            return g;
        }
        if (kind == "neat") {
            NeatGenome g;
            g.inputs = doc.at("inputs").get<int>();
            g.outputs = doc.at("outputs").get<int>();
            g.fitness = doc.value("fitness", 0.0);
            for (const auto& n : doc.at("nodes")) {
                g.nodes.push_back({n.at("id").get<int>(), parse_kind(n.at("kind").get<std::string>()),
                                   n.value("bias", 0.0), n.value("active", true)});
            }
            for (const auto& c : doc.at("connections")) {
                g.connections.push_back({c.at("from").get<int>(), c.at("to").get<int>(), c.at("weight").get<double>(),
                                         c.value("enabled", true), c.at("innovation").get<int>()});
            }
            try {
                validate(g);
            } catch (const InvalidGenome& e) {
                throw ParseError(std::string("invalid NEAT genome: ") + e.what());
            }
            return g;
        }
        throw ParseError("unknown genome kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed genome document: ") + e.what());
    }
}

void save_genome(const std::filesystem::path& file, const Genome& genome, const nlohmann::json& provenance) {
    nlohmann::json doc = to_json(genome);
    if (!provenance.is_null()) doc["provenance"] = provenance;
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write genome file " + file.string());
    out << doc.dump(1) << '\n';
}

Genome load_genome(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open genome file " + file.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("genome file " + file.string() + ": " + e.what());
    }
    return genome_from_json(doc);
}

}  // namespace evoman::nn
