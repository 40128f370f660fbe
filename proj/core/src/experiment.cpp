#include "evoman/experiment.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ranges.h>

#include "evoman/enemies.hpp"
#include "evoman/errors.hpp"
#include "evoman/replay.hpp"

namespace evoman::experiment {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& what) const {
        throw ConfigError(fmt::format("{}:{}: {}", source_, node.Mark().line + 1, what));
    }

    /// Rejects keys outside `allowed`, so typos do not silently fall back to defaults.
    void only_keys(const YAML::Node& map, std::initializer_list<const char*> allowed, const std::string& block) const {
        if (!map.IsMap()) fail(map, "'" + block + "' must be a mapping");
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            bool ok = false;
            for (const char* a : allowed) ok = ok || key == a;
            if (!ok) fail(kv.first, "unknown field '" + key + "' in " + block);
        }
    }

    template <typename T>
    void get(const YAML::Node& parent, const char* key, T& out) const {
        const YAML::Node n = parent[key];
        if (!n) return;
        try {
            out = n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, std::string("field '") + key + "' has the wrong type");
        }
    }

    template <typename T>
    T require(const YAML::Node& parent, const char* key) const {
        if (!parent[key]) fail(parent, std::string("missing field '") + key + "'");
        T out{};
        get(parent, key, out);
        return out;
    }

    /// Runs a semantic check and reports its failure at `node`.
    template <typename F>
    void check(const YAML::Node& node, F&& f) const {
        try {
            f();
        } catch (const ConfigError& e) {
            fail(node, e.what());
        }
    }

private:
    std::string source_;
};

eval::FitnessWeights parse_weights(const Reader& r, const YAML::Node& n, eval::FitnessWeights w, const std::string& block) {
    r.only_keys(n, {"gamma", "beta", "alpha"}, block);
    r.get(n, "gamma", w.gamma);
    r.get(n, "beta", w.beta);
    r.get(n, "alpha", w.alpha);
    if (w.gamma < 0 || w.beta < 0 || w.alpha < 0) r.fail(n, block + " weights must be non-negative");
    return w;
}

MatchSide parse_side(const Reader& r, const YAML::Node& n, const std::string& block) {
    r.only_keys(n, {"kind", "genome"}, block);
    MatchSide side;
    const auto kind = r.require<std::string>(n, "kind");
    if (kind == "genome") {
        side.kind = MatchSide::Kind::genome;
    } else if (kind == "scripted") {
        side.kind = MatchSide::Kind::scripted;
    } else if (kind == "random") {
        side.kind = MatchSide::Kind::random;
    } else if (kind == "idle") {
        side.kind = MatchSide::Kind::idle;
    } else {
        r.fail(n["kind"], "unknown controller kind '" + kind + "'");
    }
    std::string path;
    r.get(n, "genome", path);
    side.genome = path;
    if (side.kind == MatchSide::Kind::genome && side.genome.empty()) r.fail(n, block + " needs a genome file");
    return side;
}

const char* kind_name(MatchSide::Kind k) {
    switch (k) {
        case MatchSide::Kind::genome: return "genome";
        case MatchSide::Kind::scripted: return "scripted";
        case MatchSide::Kind::random: return "random";
        case MatchSide::Kind::idle: return "idle";
    }
    return "?";
}

std::string num(double v) { return fmt::format("{}", v); }

void write_file(const fs::path& file, const std::string& text) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + file.string());
        out << text;
        if (!out) throw std::runtime_error("write failed for " + file.string());
    }
    fs::rename(tmp, file);
}

std::string csv(const std::string& provenance, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
    std::string out = provenance + "\n" + fmt::format("{}\n", fmt::join(header, ","));
    for (const auto& r : rows) out += fmt::format("{}\n", fmt::join(r, ","));
    return out;
}

std::string sizes_field(const std::vector<std::size_t>& sizes) { return fmt::format("{}", fmt::join(sizes, ";")); }

std::optional<json> read_checkpoint(const fs::path& file, std::uint64_t hash) {
    if (!fs::exists(file)) return std::nullopt;
    std::ifstream in(file);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.contains("config_hash") || doc["config_hash"] != replay::hex64(hash)) return std::nullopt;
    return doc.at("state");
}

void write_checkpoint(const fs::path& file, std::uint64_t hash, json state) {
    write_file(file, json{{"config_hash", replay::hex64(hash)}, {"state", std::move(state)}}.dump() + "\n");
}

replay::ReplayLog stamp(replay::ReplayLog log, std::uint64_t hash, std::uint64_t seed) {
    log.config_hash = hash;
    log.master_seed = seed;
    return log;
}

struct Context {
    const ExperimentConfig& cfg;
    const RunOptions& options;
    fs::path out;
    std::uint64_t hash = 0;
    int budget_used = 0;
    RunSummary summary;

    void log(const std::string& msg) const {
        if (options.log) options.log(msg);
    }
    bool out_of_budget() const {
        return options.stop_after_generations && budget_used >= *options.stop_after_generations;
    }
};

std::unique_ptr<eval::Controller> side_controller(const MatchSide& side, std::uint64_t seed) {
    switch (side.kind) {
        case MatchSide::Kind::genome: return eval::make_controller(nn::load_genome(side.genome));
        case MatchSide::Kind::scripted: return std::make_unique<eval::ScriptedController>();
        case MatchSide::Kind::random: return std::make_unique<eval::RandomController>(derive_seed(seed, Stream::controller));
        case MatchSide::Kind::idle: return std::make_unique<eval::IdleController>();
    }
    throw ContractViolation("unknown controller kind");
}

/// Returns the final (player energy, enemy energy, duration) or nullopt when interrupted.
std::optional<std::vector<std::string>> run_baseline_job(Context& ctx, int enemy, std::uint64_t seed) {
    const auto stem = job_stem(ctx.cfg, enemy, seed);
    const fs::path checkpoint = ctx.out / "checkpoints" / (stem + ".json");
    const fs::path csv_file = ctx.out / (stem + ".csv");
    const auto provenance = provenance_line(ctx.hash, std::to_string(seed));

    campaign::BaselineSetup setup;
    setup.algorithm = ctx.cfg.algorithm_config();
    setup.enemy_id = enemy;
    setup.seed = seed;
    setup.generations = ctx.cfg.generations;
    setup.tick_limit = ctx.cfg.tick_limit;
    setup.weights = ctx.cfg.player_weights;
    setup.threads = ctx.cfg.threads;

    auto state = read_checkpoint(checkpoint, ctx.hash);
    campaign::BaselineRun run = state ? campaign::BaselineRun::resume(setup, *state) : campaign::BaselineRun(setup);
    if (state) ctx.log(fmt::format("{}: resuming after generation {}", stem, run.generation()));

    const auto write_csv = [&] {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : run.rows()) {
            rows.push_back({campaign::to_string(r.algorithm), std::to_string(r.enemy_id), std::to_string(r.seed),
                            std::to_string(r.generation), num(r.best_fitness), num(r.best_player_energy),
                            num(r.enemy_energy), std::to_string(r.duration), num(r.mean_fitness),
                            std::to_string(r.species_sizes.size()), sizes_field(r.species_sizes)});
        }
        write_file(csv_file, csv(provenance,
                                 {"algorithm", "enemy_id", "seed", "generation", "best_fitness", "best_player_energy",
                                  "enemy_energy", "duration", "mean_fitness", "species_count", "species_sizes"},
                                 rows));
    };

    while (!run.done()) {
        if (ctx.out_of_budget()) return std::nullopt;
        const auto& row = run.step();
        ++ctx.budget_used;
        write_checkpoint(checkpoint, ctx.hash, run.checkpoint());
        write_csv();
        ctx.log(fmt::format("{} gen {}: best fitness {:.2f}, player {} enemy {}", stem, row.generation, row.best_fitness,
                            row.best_player_energy, row.enemy_energy));
    }
    write_csv();

    const fs::path genome_file = ctx.out / "genomes" / (stem + ".json");
    fs::create_directories(genome_file.parent_path());
    nn::save_genome(genome_file, run.best_genome(),
                    {{"config_hash", replay::hex64(ctx.hash)},
                     {"master_seed", seed},
                     {"campaign", "baseline"},
                     {"enemy_id", enemy},
                     {"generation", run.generation()},
                     {"fitness", run.rows().back().best_fitness}});

    const auto report = run.best_match(true);
    const auto& last = run.rows().back();
    if (report.player.self_energy != last.best_player_energy || report.player.opponent_energy != last.enemy_energy) {
        throw std::runtime_error(stem + ": final best match does not reproduce the logged energies");
    }
    const fs::path replay_file = ctx.out / "replays" / (stem + ".replay");
    fs::create_directories(replay_file.parent_path());
    replay::save(replay_file, stamp(*report.replay, ctx.hash, seed));

    ctx.summary.csv_files.push_back(csv_file);
    ctx.summary.genome_files.push_back(genome_file);
    ctx.summary.replay_files.push_back(replay_file);
    return std::vector<std::string>{num(last.best_player_energy), num(last.enemy_energy), std::to_string(last.duration)};
}

std::optional<std::vector<std::string>> run_coevolution_job(Context& ctx, int enemy, std::uint64_t seed) {
    const auto stem = job_stem(ctx.cfg, enemy, seed);
    const fs::path checkpoint = ctx.out / "checkpoints" / (stem + ".json");
    const fs::path csv_file = ctx.out / (stem + ".csv");
    const auto provenance = provenance_line(ctx.hash, std::to_string(seed));

    campaign::CoevolutionSetup setup;
    setup.player = ctx.cfg.algorithm_config();
    setup.enemy = ctx.cfg.algorithm_config();
    setup.schedule = ctx.cfg.schedule;
    setup.enemy_id = enemy;
    setup.seed = seed;
    setup.tick_limit = ctx.cfg.tick_limit;
    setup.player_weights = ctx.cfg.player_weights;
    setup.enemy_weights = ctx.cfg.enemy_weights;
    setup.sample_size = ctx.cfg.sample_size;
    setup.threads = ctx.cfg.threads;

    auto state = read_checkpoint(checkpoint, ctx.hash);
    campaign::CoevolutionRun run = state ? campaign::CoevolutionRun::resume(setup, *state) : campaign::CoevolutionRun(setup);
    if (state) ctx.log(fmt::format("{}: resuming after generation {}", stem, run.generation()));

    const auto write_csv = [&] {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : run.rows()) {
            rows.push_back({std::to_string(r.generation), to_string(r.evolving_side), num(r.best_player_energy),
                            num(r.best_enemy_energy), std::to_string(r.side_generation), num(r.best_fitness),
                            std::to_string(r.duration)});
        }
        write_file(csv_file, csv(provenance,
                                 {"generation", "evolving_side", "best_player_energy", "best_enemy_energy", "side_generation",
                                  "best_fitness", "duration"},
                                 rows));
    };

    while (!run.done()) {
        if (ctx.out_of_budget()) return std::nullopt;
        const auto& row = run.step();
        ++ctx.budget_used;
        write_checkpoint(checkpoint, ctx.hash, run.checkpoint());
        write_csv();
        ctx.log(fmt::format("{} gen {} ({}): player {} enemy {}", stem, row.generation, to_string(row.evolving_side),
                            row.best_player_energy, row.best_enemy_energy));
    }
    write_csv();

    for (Side side : {Side::player, Side::enemy}) {
        const fs::path genome_file = ctx.out / "genomes" / fmt::format("{}_{}.json", stem, to_string(side));
        fs::create_directories(genome_file.parent_path());
        nn::save_genome(genome_file, run.best_genome(side),
                        {{"config_hash", replay::hex64(ctx.hash)},
                         {"master_seed", seed},
                         {"campaign", "coevolution"},
                         {"side", to_string(side)},
                         {"enemy_id", enemy},
                         {"generation", run.generation()}});
        ctx.summary.genome_files.push_back(genome_file);
    }

    const auto report = run.best_match(true);
    const auto& last = run.rows().back();
    if (report.player.self_energy != last.best_player_energy || report.enemy.self_energy != last.best_enemy_energy) {
        throw std::runtime_error(stem + ": final best-vs-best match does not reproduce the logged energies");
    }
    const fs::path replay_file = ctx.out / "replays" / (stem + ".replay");
    fs::create_directories(replay_file.parent_path());
    replay::save(replay_file, stamp(*report.replay, ctx.hash, seed));
    ctx.summary.csv_files.push_back(csv_file);
    ctx.summary.replay_files.push_back(replay_file);
    return std::vector<std::string>{num(last.best_player_energy), num(last.best_enemy_energy), std::to_string(last.duration)};
}

std::vector<std::string> run_single_match(Context& ctx, int enemy, std::uint64_t seed) {
    const auto stem = job_stem(ctx.cfg, enemy, seed);
    auto player = side_controller(ctx.cfg.match_player, seed);
    auto opponent = side_controller(ctx.cfg.match_enemy, derive_seed(seed, Stream::controller, 1));
    const auto report =
        eval::run_match(*player, *opponent, {enemy, enemies::builtin_archetype(enemy), seed, ctx.cfg.tick_limit, true});
    const fs::path replay_file = ctx.out / "replays" / (stem + ".replay");
    fs::create_directories(replay_file.parent_path());
    replay::save(replay_file, stamp(*report.replay, ctx.hash, seed));
    ctx.summary.replay_files.push_back(replay_file);
    if (!report.abort_reason.empty()) ctx.log(stem + ": aborted, " + report.abort_reason);
    return {num(report.player.self_energy), num(report.enemy.self_energy), std::to_string(report.player.duration),
            engine::to_string(report.winner), num(eval::match_fitness(report.player, ctx.cfg.player_weights)),
            num(eval::match_fitness(report.enemy, ctx.cfg.enemy_weights)), report.player.aborted ? "1" : "0"};
}

}  // namespace

const char* to_string(CampaignKind k) {
    switch (k) {
        case CampaignKind::baseline: return "baseline";
        case CampaignKind::coevolution: return "coevolution";
        case CampaignKind::single_match: return "single_match";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
    if (enemies.empty()) throw ConfigError("enemies must not be empty");
    for (int e : enemies) {
        if (e < 1 || e > 8) throw ConfigError(fmt::format("enemy id {} out of range 1-8", e));
    }
    if (generations < 1) throw ConfigError("generations must be at least 1");
    if (tick_limit < 1) throw ConfigError("tick_limit must be at least 1");
    if (campaign != CampaignKind::single_match) {
        if (algorithm == campaign::Algorithm::ga && !ga) throw ConfigError("algorithm ga requires a 'ga' block");
        if (algorithm == campaign::Algorithm::neat && !neat) throw ConfigError("algorithm neat requires a 'neat' block");
    }
    if (ga) ga->validate();
    if (neat) neat->validate();
    schedule.validate();
    if (sample_size < 1) throw ConfigError("sample_size must be at least 1");
    if (match_player.kind == MatchSide::Kind::scripted) throw ConfigError("the player side cannot be scripted");
    if (match_enemy.kind == MatchSide::Kind::random || match_enemy.kind == MatchSide::Kind::idle) {
        throw ConfigError("the enemy side must be scripted or a genome");
    }
}

campaign::AlgorithmConfig ExperimentConfig::algorithm_config() const {
    campaign::AlgorithmConfig a;
    a.algorithm = algorithm;
    if (ga) a.ga = *ga;
    if (neat) a.neat = *neat;
    return a;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    const Reader r(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(fmt::format("{}:{}: {}", source, e.mark.line + 1, e.msg));
    }
    if (!root || !root.IsMap()) throw ConfigError(source + ":1: experiment file must be a mapping");
    r.only_keys(root,
                {"format_version", "campaign", "algorithm", "enemies", "seeds", "generations", "tick_limit", "threads",
                 "output_dir", "ga", "neat", "fitness", "coevolution", "match"},
                "experiment");

    ExperimentConfig c;
    const int version = r.require<int>(root, "format_version");
    if (version != config_format_version) {
        r.fail(root["format_version"], fmt::format("unsupported format_version {} (expected {})", version, config_format_version));
    }
    const auto campaign_text = r.require<std::string>(root, "campaign");
    if (campaign_text == "baseline") {
        c.campaign = CampaignKind::baseline;
    } else if (campaign_text == "coevolution") {
        c.campaign = CampaignKind::coevolution;
    } else if (campaign_text == "single_match") {
        c.campaign = CampaignKind::single_match;
    } else {
        r.fail(root["campaign"], "unknown campaign '" + campaign_text + "' (expected baseline, coevolution or single_match)");
    }
    std::string algorithm = "neat";
    r.get(root, "algorithm", algorithm);
    r.check(root["algorithm"] ? root["algorithm"] : root, [&] { c.algorithm = campaign::algorithm_from_string(algorithm); });

    c.enemies = r.require<std::vector<int>>(root, "enemies");
    c.seeds = r.require<std::vector<std::uint64_t>>(root, "seeds");
    r.get(root, "generations", c.generations);
    r.get(root, "tick_limit", c.tick_limit);
    r.get(root, "threads", c.threads);
    std::string out;
    r.get(root, "output_dir", out);
    c.output_dir = out;

    if (const auto n = root["ga"]) {
        r.only_keys(n, {"population_size", "tournament_size", "crossover_rate", "mutation_rate", "mutation_sigma", "elitism",
                        "init_sigma"},
                    "ga");
        ga::GaConfig g;
        r.get(n, "population_size", g.population_size);
        r.get(n, "tournament_size", g.tournament_size);
        r.get(n, "crossover_rate", g.crossover_rate);
        r.get(n, "mutation_rate", g.mutation_rate);
        r.get(n, "mutation_sigma", g.mutation_sigma);
        r.get(n, "elitism", g.elitism);
        r.get(n, "init_sigma", g.init_sigma);
        r.check(n, [&] { g.validate(); });
        c.ga = g;
    }
    if (const auto n = root["neat"]) {
        r.only_keys(n, {"population_size", "compat_threshold", "c_excess", "c_disjoint", "c_weight", "weight_mutate_rate",
                        "add_node_rate", "add_connection_rate", "survival_fraction", "stale_species_limit",
                        "elitism_per_species", "crossover_rate", "interspecies_rate", "perturb_probability", "perturb_sigma",
                        "replace_range", "weight_limit", "init_sigma", "disabled_inherit_probability", "add_connection_tries"},
                    "neat");
        neat::NeatConfig g;
        r.get(n, "population_size", g.population_size);
        r.get(n, "compat_threshold", g.compat_threshold);
        r.get(n, "c_excess", g.c_excess);
        r.get(n, "c_disjoint", g.c_disjoint);
        r.get(n, "c_weight", g.c_weight);
        r.get(n, "weight_mutate_rate", g.weight_mutate_rate);
        r.get(n, "add_node_rate", g.add_node_rate);
        r.get(n, "add_connection_rate", g.add_connection_rate);
        r.get(n, "survival_fraction", g.survival_fraction);
        r.get(n, "stale_species_limit", g.stale_species_limit);
        r.get(n, "elitism_per_species", g.elitism_per_species);
        r.get(n, "crossover_rate", g.crossover_rate);
        r.get(n, "interspecies_rate", g.interspecies_rate);
        r.get(n, "perturb_probability", g.perturb_probability);
        r.get(n, "perturb_sigma", g.perturb_sigma);
        r.get(n, "replace_range", g.replace_range);
        r.get(n, "weight_limit", g.weight_limit);
        r.get(n, "init_sigma", g.init_sigma);
        r.get(n, "disabled_inherit_probability", g.disabled_inherit_probability);
        r.get(n, "add_connection_tries", g.add_connection_tries);
        r.check(n, [&] { g.validate(); });
        c.neat = g;
    }
    if (const auto n = root["fitness"]) {
        r.only_keys(n, {"player", "enemy"}, "fitness");
        if (n["player"]) c.player_weights = parse_weights(r, n["player"], c.player_weights, "fitness.player");
        if (n["enemy"]) c.enemy_weights = parse_weights(r, n["enemy"], c.enemy_weights, "fitness.enemy");
    }
    if (const auto n = root["coevolution"]) {
        r.only_keys(n, {"turn_length", "total_generations", "starting_side", "sample_size"}, "coevolution");
        r.get(n, "turn_length", c.schedule.turn_length);
        r.get(n, "total_generations", c.schedule.total_generations);
        r.get(n, "sample_size", c.sample_size);
        std::string side = "player";
        r.get(n, "starting_side", side);
        if (side == "player") {
            c.schedule.starting_side = Side::player;
        } else if (side == "enemy") {
            c.schedule.starting_side = Side::enemy;
        } else {
            r.fail(n["starting_side"], "starting_side must be player or enemy");
        }
        r.check(n, [&] { c.schedule.validate(); });
    }
    if (const auto n = root["match"]) {
        r.only_keys(n, {"player", "enemy"}, "match");
        if (n["player"]) c.match_player = parse_side(r, n["player"], "match.player");
        if (n["enemy"]) c.match_enemy = parse_side(r, n["enemy"], "match.enemy");
    }

    r.check(root, [&] { c.validate(); });
    return c;
}

ExperimentConfig load_config(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config file " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), file.string());
}

std::string to_yaml(const ExperimentConfig& c) {
    std::string y;
    const auto line = [&](const std::string& s) { y += s + "\n"; };
    line(fmt::format("format_version: {}", config_format_version));
    line(fmt::format("campaign: {}", to_string(c.campaign)));
    line(fmt::format("algorithm: {}", campaign::to_string(c.algorithm)));
    line(fmt::format("enemies: [{}]", fmt::join(c.enemies, ", ")));
    line(fmt::format("seeds: [{}]", fmt::join(c.seeds, ", ")));
    line(fmt::format("generations: {}", c.generations));
    line(fmt::format("tick_limit: {}", c.tick_limit));
    line(fmt::format("threads: {}", c.threads));
    if (!c.output_dir.empty()) line(fmt::format("output_dir: \"{}\"", c.output_dir.string()));
    if (c.ga) {
        const auto& g = *c.ga;
        line("ga:");
        line(fmt::format("  population_size: {}", g.population_size));
        line(fmt::format("  tournament_size: {}", g.tournament_size));
        line(fmt::format("  crossover_rate: {}", g.crossover_rate));
        line(fmt::format("  mutation_rate: {}", g.mutation_rate));
        line(fmt::format("  mutation_sigma: {}", g.mutation_sigma));
        line(fmt::format("  elitism: {}", g.elitism));
        line(fmt::format("  init_sigma: {}", g.init_sigma));
    }
    if (c.neat) {
        const auto& g = *c.neat;
        line("neat:");
        line(fmt::format("  population_size: {}", g.population_size));
        line(fmt::format("  compat_threshold: {}", g.compat_threshold));
        line(fmt::format("  c_excess: {}", g.c_excess));
        line(fmt::format("  c_disjoint: {}", g.c_disjoint));
        line(fmt::format("  c_weight: {}", g.c_weight));
        line(fmt::format("  weight_mutate_rate: {}", g.weight_mutate_rate));
        line(fmt::format("  add_node_rate: {}", g.add_node_rate));
        line(fmt::format("  add_connection_rate: {}", g.add_connection_rate));
        line(fmt::format("  survival_fraction: {}", g.survival_fraction));
        line(fmt::format("  stale_species_limit: {}", g.stale_species_limit));
        line(fmt::format("  elitism_per_species: {}", g.elitism_per_species));
        line(fmt::format("  crossover_rate: {}", g.crossover_rate));
        line(fmt::format("  interspecies_rate: {}", g.interspecies_rate));
        line(fmt::format("  perturb_probability: {}", g.perturb_probability));
        line(fmt::format("  perturb_sigma: {}", g.perturb_sigma));
        line(fmt::format("  replace_range: {}", g.replace_range));
        line(fmt::format("  weight_limit: {}", g.weight_limit));
        line(fmt::format("  init_sigma: {}", g.init_sigma));
        line(fmt::format("  disabled_inherit_probability: {}", g.disabled_inherit_probability));
        line(fmt::format("  add_connection_tries: {}", g.add_connection_tries));
    }
    line("fitness:");
    line(fmt::format("  player: {{gamma: {}, beta: {}, alpha: {}}}", c.player_weights.gamma, c.player_weights.beta,
                     c.player_weights.alpha));
    line(fmt::format("  enemy: {{gamma: {}, beta: {}, alpha: {}}}", c.enemy_weights.gamma, c.enemy_weights.beta,
                     c.enemy_weights.alpha));
    line("coevolution:");
    line(fmt::format("  turn_length: {}", c.schedule.turn_length));
    line(fmt::format("  total_generations: {}", c.schedule.total_generations));
    line(fmt::format("  starting_side: {}", to_string(c.schedule.starting_side)));
    line(fmt::format("  sample_size: {}", c.sample_size));
    line("match:");
    for (const auto& [name, side] : {std::pair{"player", &c.match_player}, std::pair{"enemy", &c.match_enemy}}) {
        if (side->genome.empty()) {
            line(fmt::format("  {}: {{kind: {}}}", name, kind_name(side->kind)));
        } else {
            line(fmt::format("  {}: {{kind: {}, genome: \"{}\"}}", name, kind_name(side->kind), side->genome.string()));
        }
    }
    return y;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    ExperimentConfig c = config;
    c.output_dir.clear();
    c.threads = 0;
    return fnv1a(to_yaml(c));
}

fs::path resolve_output_dir(const ExperimentConfig& config) {
    if (!config.output_dir.empty()) return config.output_dir;
    if (const char* env = std::getenv(output_dir_env); env != nullptr && *env != '\0') return env;
    return "evoman-output";
}

std::string job_stem(const ExperimentConfig& c, int enemy_id, std::uint64_t seed) {
    if (c.campaign == CampaignKind::single_match) return fmt::format("match_e{}_s{}", enemy_id, seed);
    return fmt::format("{}_{}_e{}_s{}", to_string(c.campaign), campaign::to_string(c.algorithm), enemy_id, seed);
}

std::string provenance_line(std::uint64_t hash, const std::string& master_seed) {
    return fmt::format("# config_hash={} master_seed={}", replay::hex64(hash), master_seed);
}

RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    Context ctx{config, options, resolve_output_dir(config), config_hash(config), 0, {}};
    fs::create_directories(ctx.out);
    ctx.summary.output_dir = ctx.out;
    write_file(ctx.out / "config.yaml", to_yaml(config));

    std::vector<std::string> header{"campaign", "algorithm", "enemy_id", "seed"};
    if (config.campaign == CampaignKind::single_match) {
        header.insert(header.end(), {"player_energy", "enemy_energy", "duration", "winner", "player_fitness", "enemy_fitness",
                                     "aborted"});
    } else {
        header.insert(header.end(), {"final_player_energy", "final_enemy_energy", "duration", "player_won"});
    }

    std::vector<std::vector<std::string>> rows;
    for (int enemy : config.enemies) {
        std::vector<double> player_energy;
        for (std::uint64_t seed : config.seeds) {
            std::vector<std::string> row{to_string(config.campaign), campaign::to_string(config.algorithm),
                                         std::to_string(enemy), std::to_string(seed)};
            if (config.campaign == CampaignKind::single_match) {
                const auto values = run_single_match(ctx, enemy, seed);
                row.insert(row.end(), values.begin(), values.end());
            } else {
                const auto values = config.campaign == CampaignKind::baseline ? run_baseline_job(ctx, enemy, seed)
                                                                                : run_coevolution_job(ctx, enemy, seed);
                if (!values) {
                    ctx.summary.complete = false;
                    ctx.log("stopped early; rerun the same config to resume");
                    return ctx.summary;
                }
                row.insert(row.end(), values->begin(), values->end());
                const bool won = std::stod((*values)[0]) > 0 && std::stod((*values)[1]) == 0;
                row.push_back(won ? "1" : "0");
                player_energy.push_back(std::stod((*values)[0]));
            }
            rows.push_back(std::move(row));
        }
        if (!player_energy.empty()) {
            double sum = 0;
            for (double e : player_energy) sum += e;
            rows.push_back({to_string(config.campaign), campaign::to_string(config.algorithm), std::to_string(enemy), "mean",
                            num(sum / static_cast<double>(player_energy.size())), "", "", ""});
        }
    }
    const fs::path summary = ctx.out / "summary.csv";
    write_file(summary, csv(provenance_line(ctx.hash, fmt::format("{}", fmt::join(config.seeds, ";"))), header, rows));
    ctx.summary.csv_files.push_back(summary);
    return ctx.summary;
}

const std::string& CsvTable::at(std::size_t row, const std::string& column) const {
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == column) return rows.at(row).at(c);
    }
    throw std::out_of_range("no CSV column " + column);
}

CsvTable read_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with("#")) {
            t.comments.push_back(line);
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (t.header.empty()) {
            t.header = std::move(cells);
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

}  // namespace evoman::experiment
