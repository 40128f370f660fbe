#include "evoman/campaign.hpp"

#include <algorithm>
#include <numeric>

#include "evoman/enemies.hpp"
#include "evoman/errors.hpp"

namespace evoman::campaign {
namespace {

using nlohmann::json;

double mean(std::span<const double> v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

json rows_to_json(const std::vector<BaselineRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"generation", r.generation},
                       {"best_fitness", r.best_fitness},
                       {"best_player_energy", r.best_player_energy},
                       {"enemy_energy", r.enemy_energy},
                       {"duration", r.duration},
                       {"mean_fitness", r.mean_fitness},
                       {"species_sizes", r.species_sizes}});
    }
    return out;
}

json rows_to_json(const std::vector<CoevolutionRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"generation", r.generation},
                       {"evolving_side", to_string(r.evolving_side)},
                       {"side_generation", r.side_generation},
                       {"best_player_energy", r.best_player_energy},
                       {"best_enemy_energy", r.best_enemy_energy},
                       {"best_fitness", r.best_fitness},
                       {"duration", r.duration}});
    }
    return out;
}

Side side_from_string(const std::string& s) {
    if (s == "player") return Side::player;
    if (s == "enemy") return Side::enemy;
    throw ParseError("unknown side '" + s + "'");
}

}  // namespace

const char* to_string(Algorithm a) { return a == Algorithm::ga ? "ga" : "neat"; }

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "ga") return Algorithm::ga;
    if (s == "neat") return Algorithm::neat;
    throw ConfigError("unknown algorithm '" + s + "' (expected ga or neat)");
}

std::size_t AlgorithmConfig::population_size() const {
    return algorithm == Algorithm::ga ? ga.population_size : neat.population_size;
}

Population Population::random(const AlgorithmConfig& cfg, Rng& rng) {
    Population p(cfg);
    if (cfg.algorithm == Algorithm::ga) {
        cfg.ga.validate();
        for (std::size_t i = 0; i < cfg.ga.population_size; ++i) {
            p.fixed_.push_back(ga::random_fixed_genome(nn::fixed_genome_length, cfg.ga.init_sigma, rng));
        }
    } else {
        cfg.neat.validate();
        p.neat_ = neat::initial_population(static_cast<int>(nn::input_count), static_cast<int>(nn::output_count), cfg.neat,
                                           p.neat_state_, rng);
    }
    return p;
}

std::size_t Population::size() const { return cfg_.algorithm == Algorithm::ga ? fixed_.size() : neat_.size(); }

nn::Genome Population::genome(std::size_t i) const {
    if (cfg_.algorithm == Algorithm::ga) return fixed_.at(i);
    return neat_.at(i);
}

std::unique_ptr<eval::Controller> Population::controller(std::size_t i) const {
    if (cfg_.algorithm == Algorithm::ga) return std::make_unique<eval::FixedNetworkController>(fixed_.at(i));
    return std::make_unique<eval::NeatNetworkController>(neat_.at(i));
}

void Population::advance(std::span<const double> fitness, Rng& rng) {
    if (fitness.size() != size()) throw ContractViolation("one fitness value per genome is required");
    if (cfg_.algorithm == Algorithm::ga) {
        fixed_ = ga::evolve_generation_ga(fixed_, fitness, cfg_.ga, rng);
    } else {
        neat_ = neat::evolve_generation_neat(neat_, fitness, neat_state_, cfg_.neat, rng);
    }
}

std::vector<std::size_t> Population::species_sizes() const {
    if (cfg_.algorithm == Algorithm::ga) return {};
    int next_id = neat_state_.next_species_id;
    std::vector<std::size_t> sizes;
    for (const auto& s : neat::speciate(neat_, neat_state_.species, cfg_.neat, next_id)) sizes.push_back(s.members.size());
    return sizes;
}

std::string Population::fingerprint() const {
    json genomes = json::array();
    for (std::size_t i = 0; i < size(); ++i) genomes.push_back(nn::to_json(genome(i)));
    return genomes.dump();
}

json Population::to_json() const {
    json genomes = json::array();
    for (std::size_t i = 0; i < size(); ++i) genomes.push_back(nn::to_json(genome(i)));
    json j{{"algorithm", campaign::to_string(cfg_.algorithm)}, {"genomes", std::move(genomes)}};
    if (cfg_.algorithm == Algorithm::neat) j["neat_state"] = neat_state_.to_json();
    return j;
}

Population Population::from_json(const json& j, const AlgorithmConfig& cfg) {
    if (algorithm_from_string(j.at("algorithm").get<std::string>()) != cfg.algorithm) {
        throw ParseError("checkpoint population was bred by a different algorithm");
    }
    Population p(cfg);
    for (const auto& g : j.at("genomes")) {
        auto genome = nn::genome_from_json(g);
        if (cfg.algorithm == Algorithm::ga) {
            p.fixed_.push_back(std::get<nn::FixedGenome>(std::move(genome)));
        } else {
            p.neat_.push_back(std::get<nn::NeatGenome>(std::move(genome)));
        }
    }
    if (cfg.algorithm == Algorithm::neat) p.neat_state_ = neat::NeatState::from_json(j.at("neat_state"));
    return p;
}

std::size_t best_index(std::span<const double> fitness) {
    if (fitness.empty()) throw ContractViolation("best of an empty population");
    return static_cast<std::size_t>(std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
}

// ---------------------------------------------------------------------------------------------

BaselineRun::BaselineRun(BaselineSetup setup)
    : setup_(std::move(setup)),
      rng_(make_rng(setup_.seed, Stream::mutation, static_cast<std::uint64_t>(setup_.enemy_id))),
      population_(Population::random(setup_.algorithm, rng_)) {
    if (setup_.generations < 1) throw ConfigError("generations must be at least 1");
    enemies::builtin_archetype(setup_.enemy_id);
}

std::uint64_t BaselineRun::match_seed() const {
    return derive_seed(setup_.seed, Stream::match, static_cast<std::uint64_t>(setup_.enemy_id));
}

const BaselineRow& BaselineRun::step() {
    if (done()) throw ContractViolation("baseline run already finished");
    if (generation_ > 0) population_.advance(fitness_, rng_);

    const auto archetype = enemies::builtin_archetype(setup_.enemy_id);
    const eval::MatchSetup match{setup_.enemy_id, archetype, match_seed(), setup_.tick_limit, false};
    std::vector<eval::MatchReport> reports(population_.size());
    eval::parallel_for(population_.size(), setup_.threads, [&](std::size_t i) {
        auto player = population_.controller(i);
        eval::ScriptedController enemy;
        reports[i] = eval::run_match(*player, enemy, match);
    });

    fitness_.assign(reports.size(), 0.0);
    for (std::size_t i = 0; i < reports.size(); ++i) fitness_[i] = eval::match_fitness(reports[i].player, setup_.weights);
    const std::size_t best = best_index(fitness_);

    BaselineRow row;
    row.algorithm = setup_.algorithm.algorithm;
    row.enemy_id = setup_.enemy_id;
    row.seed = setup_.seed;
    row.generation = generation_ + 1;
    row.best_fitness = fitness_[best];
    row.best_player_energy = reports[best].player.self_energy;
    row.enemy_energy = reports[best].player.opponent_energy;
    row.duration = reports[best].player.duration;
    row.mean_fitness = mean(fitness_);
    row.species_sizes = population_.species_sizes();
    rows_.push_back(std::move(row));
    ++generation_;
    return rows_.back();
}

nn::Genome BaselineRun::best_genome() const {
    if (fitness_.empty()) throw ContractViolation("no generation evaluated yet");
    return population_.genome(best_index(fitness_));
}

eval::MatchReport BaselineRun::best_match(bool record) const {
    auto player = eval::make_controller(best_genome());
    eval::ScriptedController enemy;
    return eval::run_match(*player, enemy,
                           {setup_.enemy_id, enemies::builtin_archetype(setup_.enemy_id), match_seed(), setup_.tick_limit, record});
}

json BaselineRun::checkpoint() const {
    return {{"kind", "baseline"},
            {"enemy_id", setup_.enemy_id},
            {"seed", setup_.seed},
            {"generation", generation_},
            {"rng", save_rng(rng_)},
            {"fitness", fitness_},
            {"population", population_.to_json()},
            {"rows", rows_to_json(rows_)}};
}

BaselineRun BaselineRun::resume(BaselineSetup setup, const json& cp) {
    if (cp.at("kind") != "baseline" || cp.at("enemy_id").get<int>() != setup.enemy_id ||
        cp.at("seed").get<std::uint64_t>() != setup.seed) {
        throw ParseError("checkpoint belongs to a different run");
    }
    BaselineRun run(std::move(setup));
    run.generation_ = cp.at("generation").get<int>();
    run.rng_ = load_rng(cp.at("rng").get<std::string>());
    run.fitness_ = cp.at("fitness").get<std::vector<double>>();
    run.population_ = Population::from_json(cp.at("population"), run.setup_.algorithm);
    for (const auto& r : cp.at("rows")) {
        BaselineRow row;
        row.algorithm = run.setup_.algorithm.algorithm;
        row.enemy_id = run.setup_.enemy_id;
        row.seed = run.setup_.seed;
        row.generation = r.at("generation").get<int>();
        row.best_fitness = r.at("best_fitness").get<double>();
        row.best_player_energy = r.at("best_player_energy").get<double>();
        row.enemy_energy = r.at("enemy_energy").get<double>();
        row.duration = r.at("duration").get<int>();
        row.mean_fitness = r.at("mean_fitness").get<double>();
        row.species_sizes = r.at("species_sizes").get<std::vector<std::size_t>>();
        run.rows_.push_back(std::move(row));
    }
    return run;
}

// ---------------------------------------------------------------------------------------------

void CoevolutionSchedule::validate() const {
    if (turn_length < 1) throw ConfigError("turn_length must be at least 1");
    if (total_generations < 1) throw ConfigError("total_generations must be at least 1");
}

std::vector<Side> CoevolutionSchedule::unroll() const {
    validate();
    std::vector<Side> out;
    int remaining[2] = {total_generations, total_generations};
    Side side = starting_side;
    while (remaining[0] + remaining[1] > 0) {
        auto& left = remaining[static_cast<int>(side)];
        for (int i = 0; i < turn_length && left > 0; ++i, --left) out.push_back(side);
        side = opponent_of(side);
    }
    return out;
}

CoevolutionRun::CoevolutionRun(CoevolutionSetup setup)
    : setup_(std::move(setup)),
      sides_(setup_.schedule.unroll()),
      player_rng_(make_rng(setup_.seed, Stream::mutation, 0)),
      enemy_rng_(make_rng(setup_.seed, Stream::mutation, 1)),
      sample_rng_(make_rng(setup_.seed, Stream::opponent_sampling)),
      player_(Population::random(setup_.player, player_rng_)),
      enemy_(Population::random(setup_.enemy, enemy_rng_)) {
    if (setup_.sample_size < 1) throw ConfigError("sample_size must be at least 1");
    enemies::builtin_archetype(setup_.enemy_id);

    // The side that starts frozen needs a ranking before its opponent's first turn; score it
    // against an unranked sample of the starting side.
    const Side frozen = opponent_of(setup_.schedule.starting_side);
    const Population& starter = population(setup_.schedule.starting_side);
    const std::vector<double> unranked(starter.size(), 0.0);
    const auto sample = eval::draw_opponent_sample(unranked, setup_.sample_size, sample_rng_);
    (frozen == Side::player ? player_fitness_ : enemy_fitness_) = evaluate(frozen, match_seed(0), sample);
}

std::uint64_t CoevolutionRun::match_seed(int generation) const {
    return derive_seed(setup_.seed, Stream::match, static_cast<std::uint64_t>(generation));
}

eval::MatchReport CoevolutionRun::play(std::size_t p, std::size_t e, std::uint64_t seed, bool record) const {
    auto pc = player_.controller(p);
    auto ec = enemy_.controller(e);
    return eval::run_match(*pc, *ec, {setup_.enemy_id, enemies::builtin_archetype(setup_.enemy_id), seed, setup_.tick_limit, record});
}

std::vector<double> CoevolutionRun::evaluate(Side side, std::uint64_t seed, std::span<const std::size_t> sample) const {
    const Population& pop = population(side);
    const auto& weights = side == Side::player ? setup_.player_weights : setup_.enemy_weights;
    std::vector<double> fitness(pop.size(), 0.0);
    eval::parallel_for(pop.size(), setup_.threads, [&](std::size_t i) {
        fitness[i] = eval::generalization_fitness(sample, [&](std::size_t o) {
            const auto report = side == Side::player ? play(i, o, seed, false) : play(o, i, seed, false);
            return eval::match_fitness(side == Side::player ? report.player : report.enemy, weights);
        });
    });
    return fitness;
}

const CoevolutionRow& CoevolutionRun::step() {
    if (done()) throw ContractViolation("coevolution run already finished");
    const Side side = sides_[static_cast<std::size_t>(generation_)];
    const Side frozen = opponent_of(side);
    Population& pop = side == Side::player ? player_ : enemy_;
    std::vector<double>& fitness = side == Side::player ? player_fitness_ : enemy_fitness_;
    bool& evaluated = side == Side::player ? player_evaluated_ : enemy_evaluated_;
    Rng& rng = side == Side::player ? player_rng_ : enemy_rng_;

    if (evaluated) pop.advance(fitness, rng);
    const std::uint64_t seed = match_seed(generation_ + 1);
    const auto sample = eval::draw_opponent_sample(this->fitness(frozen), setup_.sample_size, sample_rng_);
    fitness = evaluate(side, seed, sample);
    evaluated = true;

    const auto report = play(best_index(player_fitness_), best_index(enemy_fitness_), seed, false);
    CoevolutionRow row;
    row.generation = generation_ + 1;
    row.evolving_side = side;
    row.side_generation = static_cast<int>(std::count(sides_.begin(), sides_.begin() + generation_ + 1, side));
    row.best_player_energy = report.player.self_energy;
    row.best_enemy_energy = report.enemy.self_energy;
    row.best_fitness = fitness[best_index(fitness)];
    row.duration = report.player.duration;
    rows_.push_back(row);
    ++generation_;
    return rows_.back();
}

nn::Genome CoevolutionRun::best_genome(Side side) const {
    return population(side).genome(best_index(fitness(side)));
}

eval::MatchReport CoevolutionRun::best_match(bool record) const {
    return play(best_index(player_fitness_), best_index(enemy_fitness_), match_seed(generation_), record);
}

json CoevolutionRun::checkpoint() const {
    return {{"kind", "coevolution"},
            {"enemy_id", setup_.enemy_id},
            {"seed", setup_.seed},
            {"generation", generation_},
            {"player_rng", save_rng(player_rng_)},
            {"enemy_rng", save_rng(enemy_rng_)},
            {"sample_rng", save_rng(sample_rng_)},
            {"player_fitness", player_fitness_},
            {"enemy_fitness", enemy_fitness_},
            {"player_evaluated", player_evaluated_},
            {"enemy_evaluated", enemy_evaluated_},
            {"player", player_.to_json()},
            {"enemy", enemy_.to_json()},
            {"rows", rows_to_json(rows_)}};
}

CoevolutionRun CoevolutionRun::resume(CoevolutionSetup setup, const json& cp) {
    if (cp.at("kind") != "coevolution" || cp.at("enemy_id").get<int>() != setup.enemy_id ||
        cp.at("seed").get<std::uint64_t>() != setup.seed) {
        throw ParseError("checkpoint belongs to a different run");
    }
    // The constructor's bootstrap evaluation is wasted work here but keeps construction simple.
    CoevolutionRun run(std::move(setup));
    run.generation_ = cp.at("generation").get<int>();
    run.player_rng_ = load_rng(cp.at("player_rng").get<std::string>());
    run.enemy_rng_ = load_rng(cp.at("enemy_rng").get<std::string>());
    run.sample_rng_ = load_rng(cp.at("sample_rng").get<std::string>());
    run.player_fitness_ = cp.at("player_fitness").get<std::vector<double>>();
    run.enemy_fitness_ = cp.at("enemy_fitness").get<std::vector<double>>();
    run.player_evaluated_ = cp.at("player_evaluated").get<bool>();
    run.enemy_evaluated_ = cp.at("enemy_evaluated").get<bool>();
    run.player_ = Population::from_json(cp.at("player"), run.setup_.player);
    run.enemy_ = Population::from_json(cp.at("enemy"), run.setup_.enemy);
    for (const auto& r : cp.at("rows")) {
        CoevolutionRow row;
        row.generation = r.at("generation").get<int>();
        row.evolving_side = side_from_string(r.at("evolving_side").get<std::string>());
        row.side_generation = r.at("side_generation").get<int>();
        row.best_player_energy = r.at("best_player_energy").get<double>();
        row.best_enemy_energy = r.at("best_enemy_energy").get<double>();
        row.best_fitness = r.at("best_fitness").get<double>();
        row.duration = r.at("duration").get<int>();
        run.rows_.push_back(row);
    }
    return run;
}

}  // namespace evoman::campaign
