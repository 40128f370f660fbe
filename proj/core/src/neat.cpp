#include "evoman/neat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "evoman/errors.hpp"
#include "evoman/ga.hpp"

namespace evoman::neat {
namespace {

void sort_genes(NeatGenome& g) {
    std::sort(g.nodes.begin(), g.nodes.end(), [](const NodeGene& a, const NodeGene& b) { return a.id < b.id; });
    std::sort(g.connections.begin(), g.connections.end(),
              [](const ConnectionGene& a, const ConnectionGene& b) { return a.innovation < b.innovation; });
}

/// True when `target` is reachable from `start` over any connection gene.
bool reachable(const NeatGenome& g, int start, int target) {
    std::vector<int> stack{start};
    std::set<int> seen{start};
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        if (n == target) return true;
        for (const auto& c : g.connections) {
            if (c.from == n && seen.insert(c.to).second) stack.push_back(c.to);
        }
    }
    return false;
}

std::size_t uniform_index(std::size_t n, Rng& rng) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

bool chance(double p, Rng& rng) { return p > 0.0 && std::bernoulli_distribution(std::min(p, 1.0))(rng); }

}  // namespace

void NeatConfig::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (population_size < 1) throw ConfigError("neat.population_size must be positive");
    if (compat_threshold <= 0.0) throw ConfigError("neat.compat_threshold must be positive");
    if (c_excess < 0 || c_disjoint < 0 || c_weight < 0) throw ConfigError("neat distance coefficients must be non-negative");
    for (auto [name, p] : {std::pair{"weight_mutate_rate", weight_mutate_rate}, std::pair{"add_node_rate", add_node_rate},
                           std::pair{"add_connection_rate", add_connection_rate}, std::pair{"crossover_rate", crossover_rate},
                           std::pair{"interspecies_rate", interspecies_rate},
                           std::pair{"perturb_probability", perturb_probability},
                           std::pair{"disabled_inherit_probability", disabled_inherit_probability}}) {
        if (!prob(p)) throw ConfigError(std::string("neat.") + name + " must be in [0, 1]");
    }
    if (!(survival_fraction > 0.0 && survival_fraction <= 1.0)) throw ConfigError("neat.survival_fraction must be in (0, 1]");
    if (stale_species_limit < 1) throw ConfigError("neat.stale_species_limit must be positive");
    if (weight_limit <= 0.0) throw ConfigError("neat.weight_limit must be positive");
    if (add_connection_tries < 1) throw ConfigError("neat.add_connection_tries must be positive");
}

InnovationRegistry::InnovationRegistry(int inputs, int outputs) {
    for (int o = 0; o < outputs; ++o) {
        for (int i = 0; i < inputs; ++i) seen_[{i, inputs + o}] = nn::initial_innovation(i, o, inputs);
    }
    next_innovation_ = inputs * outputs;
    next_node_id_ = inputs + outputs;
}

int InnovationRegistry::connection(int from, int to) {
    auto [it, inserted] = seen_.try_emplace({from, to}, next_innovation_);
    if (inserted) ++next_innovation_;
    return it->second;
}

int InnovationRegistry::split(int innovation) {
    auto [it, inserted] = splits_.try_emplace(innovation, next_node_id_);
    if (inserted) ++next_node_id_;
    return it->second;
}

nlohmann::json InnovationRegistry::to_json() const {
    nlohmann::json links = nlohmann::json::array();
    for (const auto& [k, v] : seen_) links.push_back({k.first, k.second, v});
    nlohmann::json splits = nlohmann::json::array();
    for (const auto& [k, v] : splits_) splits.push_back({k, v});
    return {{"next_innovation", next_innovation_}, {"next_node_id", next_node_id_}, {"links", links}, {"splits", splits}};
}

InnovationRegistry InnovationRegistry::from_json(const nlohmann::json& j) {
    InnovationRegistry r;
    r.next_innovation_ = j.at("next_innovation").get<int>();
    r.next_node_id_ = j.at("next_node_id").get<int>();
    for (const auto& l : j.at("links")) r.seen_[{l[0].get<int>(), l[1].get<int>()}] = l[2].get<int>();
    for (const auto& s : j.at("splits")) r.splits_[s[0].get<int>()] = s[1].get<int>();
    return r;
}

double compatibility_distance(const NeatGenome& a, const NeatGenome& b, const NeatConfig& cfg) {
    const auto& ca = a.connections;
    const auto& cb = b.connections;
    const int max_a = ca.empty() ? -1 : ca.back().innovation;
    const int max_b = cb.empty() ? -1 : cb.back().innovation;

    std::size_t i = 0;
    std::size_t j = 0;
    double excess = 0;
    double disjoint = 0;
    double weight_diff = 0;
    double matching = 0;
    while (i < ca.size() || j < cb.size()) {
        if (i < ca.size() && j < cb.size() && ca[i].innovation == cb[j].innovation) {
            weight_diff += std::abs(ca[i].weight - cb[j].weight);
            ++matching;
            ++i;
            ++j;
        } else if (j == cb.size() || (i < ca.size() && ca[i].innovation < cb[j].innovation)) {
            (ca[i].innovation > max_b ? excess : disjoint) += 1;
            ++i;
        } else {
            (cb[j].innovation > max_a ? excess : disjoint) += 1;
            ++j;
        }
    }
    const std::size_t larger = std::max(ca.size(), cb.size());
    const double n = larger < 20 ? 1.0 : static_cast<double>(larger);
    const double mean_weight = matching > 0 ? weight_diff / matching : 0.0;
    return cfg.c_excess * excess / n + cfg.c_disjoint * disjoint / n + cfg.c_weight * mean_weight;
}

std::vector<Species> speciate(std::span<const NeatGenome> population, std::span<const Species> previous,
                              const NeatConfig& cfg, int& next_species_id) {
    std::vector<Species> out;
    out.reserve(previous.size());
    for (const auto& s : previous) {
        Species carried = s;
        carried.members.clear();
        out.push_back(std::move(carried));
    }
    for (std::size_t g = 0; g < population.size(); ++g) {
        bool placed = false;
        for (auto& s : out) {
            if (compatibility_distance(population[g], s.representative, cfg) < cfg.compat_threshold) {
                s.members.push_back(g);
                placed = true;
                break;
            }
        }
        if (!placed) {
            Species founded;
            founded.id = next_species_id++;
            founded.representative = population[g];
            founded.members.push_back(g);
            founded.best_fitness_ever = -std::numeric_limits<double>::infinity();
            out.push_back(std::move(founded));
        }
    }
    std::erase_if(out, [](const Species& s) { return s.members.empty(); });
    return out;
}

void fitness_sharing(std::span<const Species> species, std::span<NeatGenome> population) {
    for (const auto& s : species) {
        const auto size = static_cast<double>(s.members.size());
        for (std::size_t m : s.members) population[m].adjusted_fitness = population[m].fitness / size;
    }
}

std::vector<std::size_t> allocate_offspring(std::span<const SpeciesShare> shares, std::size_t population_size) {
    const std::size_t n = shares.size();
    std::vector<std::size_t> counts(n, 0);
    if (n == 0) return counts;

    std::vector<double> mass(n);
    std::vector<bool> eligible(n);
    double min_sum = 0.0;
    for (const auto& s : shares) min_sum = std::min(min_sum, s.adjusted_sum);
    for (std::size_t k = 0; k < n; ++k) {
        eligible[k] = !shares[k].stale || shares[k].holds_global_best;
        mass[k] = eligible[k] ? shares[k].adjusted_sum - min_sum : 0.0;
    }
    if (std::none_of(eligible.begin(), eligible.end(), [](bool e) { return e; })) eligible.assign(n, true);

    double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (total <= 0.0) {
        for (std::size_t k = 0; k < n; ++k) mass[k] = eligible[k] ? 1.0 : 0.0;
        total = std::accumulate(mass.begin(), mass.end(), 0.0);
    }

    std::vector<double> remainder(n);
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double quota = static_cast<double>(population_size) * mass[k] / total;
        counts[k] = static_cast<std::size_t>(std::floor(quota));
        remainder[k] = quota - std::floor(quota);
        assigned += counts[k];
    }
    // Floating rounding can push the floor sum past the target by one in degenerate cases.
    while (assigned > population_size) {
        const auto k = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        --counts[k];
        --assigned;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t r = 0; assigned < population_size; r = (r + 1) % n) {
        if (mass[order[r]] <= 0.0) {
            if (std::all_of(order.begin(), order.end(), [&](std::size_t k) { return mass[k] <= 0.0; })) break;
            continue;
        }
        ++counts[order[r]];
        ++assigned;
    }

    for (std::size_t k = 0; k < n; ++k) {
        if (!shares[k].holds_global_best || counts[k] > 0 || population_size == 0) continue;
        const auto donor = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        --counts[donor];
        ++counts[k];
    }
    return counts;
}

NeatGenome crossover_neat(const NeatGenome& a, const NeatGenome& b, Rng& rng, double disabled_inherit_probability) {
    const bool a_fitter = a.fitness >= b.fitness;
    const NeatGenome& fit = a_fitter ? a : b;
    const NeatGenome& other = a_fitter ? b : a;

    std::bernoulli_distribution coin(0.5);
    NeatGenome child;
    child.inputs = fit.inputs;
    child.outputs = fit.outputs;
    child.nodes = fit.nodes;
    for (auto& n : child.nodes) {
        const NodeGene* o = other.find_node(n.id);
        if (o != nullptr && coin(rng)) n.bias = o->bias;
    }

    std::size_t j = 0;
    for (const auto& gene : fit.connections) {
        while (j < other.connections.size() && other.connections[j].innovation < gene.innovation) ++j;
        ConnectionGene c = gene;
        if (j < other.connections.size() && other.connections[j].innovation == gene.innovation) {
            const ConnectionGene& og = other.connections[j];
            if (coin(rng)) c.weight = og.weight;
            if (!gene.enabled || !og.enabled) {
                c.enabled = !chance(disabled_inherit_probability, rng);
            }
        }
        child.connections.push_back(c);
    }
    return child;
}

bool mutate_add_node(NeatGenome& g, InnovationRegistry& registry, Rng& rng) {
    std::vector<std::size_t> enabled;
    for (std::size_t k = 0; k < g.connections.size(); ++k) {
        if (g.connections[k].enabled) enabled.push_back(k);
    }
    if (enabled.empty()) return false;

    ConnectionGene& old = g.connections[enabled[uniform_index(enabled.size(), rng)]];
    old.enabled = false;
    const int from = old.from;
    const int to = old.to;
    const double weight = old.weight;

    int node = registry.split(old.innovation);
    if (g.has_node(node)) node = registry.fresh_node();

    g.nodes.push_back({node, NodeKind::hidden, 0.0, true});
    g.connections.push_back({from, node, 1.0, true, registry.connection(from, node)});
    g.connections.push_back({node, to, weight, true, registry.connection(node, to)});
    sort_genes(g);
    return true;
}

bool mutate_add_connection(NeatGenome& g, InnovationRegistry& registry, Rng& rng, int tries) {
    std::vector<int> sources;
    std::vector<int> targets;
    for (const auto& n : g.nodes) {
        if (n.kind != NodeKind::output) sources.push_back(n.id);
        if (n.kind != NodeKind::input) targets.push_back(n.id);
    }
    if (sources.empty() || targets.empty()) return false;

    for (int t = 0; t < tries; ++t) {
        const int from = sources[uniform_index(sources.size(), rng)];
        const int to = targets[uniform_index(targets.size(), rng)];
        if (from == to || g.find_connection(from, to) != nullptr) continue;
        if (reachable(g, to, from)) continue;
        std::normal_distribution<double> weight(0.0, 1.0);
        g.connections.push_back({from, to, weight(rng), true, registry.connection(from, to)});
        sort_genes(g);
        return true;
    }
    return false;
}

void mutate_weights_neat(NeatGenome& g, const NeatConfig& cfg, Rng& rng) {
    if (!chance(cfg.weight_mutate_rate, rng)) return;
    std::normal_distribution<double> nudge(0.0, cfg.perturb_sigma);
    std::uniform_real_distribution<double> redraw(-cfg.replace_range, cfg.replace_range);
    auto mutate = [&](double& w) {
        w = chance(cfg.perturb_probability, rng) ? w + nudge(rng) : redraw(rng);
        w = std::clamp(w, -cfg.weight_limit, cfg.weight_limit);
    };
    for (auto& c : g.connections) mutate(c.weight);
    for (auto& n : g.nodes) {
        if (n.kind != NodeKind::input) mutate(n.bias);
    }
}

nlohmann::json NeatState::to_json() const {
    nlohmann::json sp = nlohmann::json::array();
    for (const auto& s : species) {
        sp.push_back({{"id", s.id},
                      {"representative", nn::to_json(s.representative)},
                      {"best_fitness_ever", s.best_fitness_ever},
                      {"staleness", s.staleness}});
    }
    return {{"registry", registry.to_json()}, {"species", sp}, {"next_species_id", next_species_id}, {"generation", generation}};
}

NeatState NeatState::from_json(const nlohmann::json& j) {
    NeatState st;
    st.registry = InnovationRegistry::from_json(j.at("registry"));
    st.next_species_id = j.at("next_species_id").get<int>();
    st.generation = j.at("generation").get<int>();
    for (const auto& s : j.at("species")) {
        Species sp;
        sp.id = s.at("id").get<int>();
        sp.representative = std::get<NeatGenome>(nn::genome_from_json(s.at("representative")));
        sp.best_fitness_ever = s.at("best_fitness_ever").get<double>();
        sp.staleness = s.at("staleness").get<int>();
        st.species.push_back(std::move(sp));
    }
    return st;
}

std::vector<NeatGenome> initial_population(int inputs, int outputs, const NeatConfig& cfg, NeatState& state, Rng& rng) {
    cfg.validate();
    state = NeatState{};
    state.registry = InnovationRegistry(inputs, outputs);
    std::vector<NeatGenome> pop;
    pop.reserve(cfg.population_size);
    const auto length = static_cast<std::size_t>(outputs) * (static_cast<std::size_t>(inputs) + 1);
    for (std::size_t k = 0; k < cfg.population_size; ++k) {
        const auto layer = ga::random_fixed_genome(length, cfg.init_sigma, rng);
        pop.push_back(nn::neat_from_layer(layer.weights, inputs, outputs));
    }
    return pop;
}

std::vector<NeatGenome> evolve_generation_neat(std::span<const NeatGenome> population, std::span<const double> fitnesses,
                                               NeatState& state, const NeatConfig& cfg, Rng& rng) {
    cfg.validate();
    if (population.size() != cfg.population_size) throw ContractViolation("population size does not match config");
    if (fitnesses.size() != population.size()) throw ContractViolation("one fitness per genome required");

    // Fitness is shifted so the minimum is zero; proportional allocation needs non-negative mass.
    const double min_fitness = *std::min_element(fitnesses.begin(), fitnesses.end());
    std::vector<NeatGenome> pop(population.begin(), population.end());
    for (std::size_t k = 0; k < pop.size(); ++k) pop[k].fitness = fitnesses[k] - min_fitness;
    const auto global_best = static_cast<std::size_t>(std::max_element(fitnesses.begin(), fitnesses.end()) - fitnesses.begin());

    auto species = speciate(pop, state.species, cfg, state.next_species_id);
    for (auto& s : species) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t m : s.members) best = std::max(best, fitnesses[m]);
        if (best > s.best_fitness_ever) {
            s.best_fitness_ever = best;
            s.staleness = 0;
        } else {
            ++s.staleness;
        }
    }
    fitness_sharing(species, pop);

    std::vector<SpeciesShare> shares;
    for (const auto& s : species) {
        SpeciesShare share;
        for (std::size_t m : s.members) share.adjusted_sum += pop[m].adjusted_fitness;
        share.stale = s.staleness > cfg.stale_species_limit;
        share.holds_global_best = std::find(s.members.begin(), s.members.end(), global_best) != s.members.end();
        shares.push_back(share);
    }
    const auto counts = allocate_offspring(shares, cfg.population_size);

    state.registry.begin_generation();
    std::vector<std::vector<std::size_t>> pools(species.size());
    std::vector<std::vector<std::size_t>> ranked(species.size());
    for (std::size_t s = 0; s < species.size(); ++s) {
        ranked[s] = species[s].members;
        std::stable_sort(ranked[s].begin(), ranked[s].end(), [&](std::size_t a, std::size_t b) { return fitnesses[a] > fitnesses[b]; });
        const auto keep = static_cast<std::size_t>(std::ceil(cfg.survival_fraction * static_cast<double>(ranked[s].size())));
        pools[s].assign(ranked[s].begin(), ranked[s].begin() + static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(keep, 1, ranked[s].size())));
    }

    std::vector<NeatGenome> next;
    next.reserve(cfg.population_size);
    for (std::size_t s = 0; s < species.size(); ++s) {
        const std::size_t count = counts[s];
        const std::size_t elites = std::min(cfg.elitism_per_species, count);
        for (std::size_t e = 0; e < elites && e < ranked[s].size(); ++e) next.push_back(pop[ranked[s][e]]);
        const std::size_t produced_elites = std::min(elites, ranked[s].size());
        const auto& pool = pools[s];
        for (std::size_t c = produced_elites; c < count; ++c) {
            NeatGenome child;
            const NeatGenome& p1 = pop[pool[uniform_index(pool.size(), rng)]];
            if (chance(cfg.crossover_rate, rng)) {
                const NeatGenome* p2 = &pop[pool[uniform_index(pool.size(), rng)]];
                if (species.size() > 1 && chance(cfg.interspecies_rate, rng)) {
                    std::size_t o = uniform_index(species.size() - 1, rng);
                    if (o >= s) ++o;
                    p2 = &pop[pools[o][uniform_index(pools[o].size(), rng)]];
                }
                child = crossover_neat(p1, *p2, rng, cfg.disabled_inherit_probability);
            } else {
                child = p1;
            }
            mutate_weights_neat(child, cfg, rng);
            if (chance(cfg.add_node_rate, rng)) mutate_add_node(child, state.registry, rng);
            if (chance(cfg.add_connection_rate, rng)) {
                mutate_add_connection(child, state.registry, rng, cfg.add_connection_tries);
            }
            child.fitness = 0.0;
            child.adjusted_fitness = 0.0;
            next.push_back(std::move(child));
        }
    }

    state.last_report = GenerationReport{species.size(), {}, fitnesses[global_best]};
    for (const auto& s : species) state.last_report.species_sizes.push_back(s.members.size());

    // Survivors keep their record; the representative is resampled from this generation.
    std::vector<Species> kept;
    for (std::size_t s = 0; s < species.size(); ++s) {
        if (counts[s] == 0) continue;
        Species sp = std::move(species[s]);
        sp.representative = pop[sp.members[uniform_index(sp.members.size(), rng)]];
        sp.representative.fitness = 0.0;
        sp.representative.adjusted_fitness = 0.0;
        sp.members.clear();
        kept.push_back(std::move(sp));
    }
    state.species = std::move(kept);
    ++state.generation;
    return next;
}

}  // namespace evoman::neat
