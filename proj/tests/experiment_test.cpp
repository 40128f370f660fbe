#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "evoman/errors.hpp"
#include "evoman/evaluation.hpp"
#include "evoman/experiment.hpp"
#include "evoman/replay.hpp"
#include "support.hpp"

namespace evoman::experiment {
namespace {

namespace fs = std::filesystem;
using evoman::testing::TempDir;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

ExperimentConfig tiny_baseline(const fs::path& out) {
    ExperimentConfig c;
    c.campaign = CampaignKind::baseline;
    c.algorithm = campaign::Algorithm::neat;
    c.enemies = {5};
    c.seeds = {7};
    c.generations = 2;
    c.neat = neat::NeatConfig{};
    c.neat->population_size = 4;
    c.output_dir = out;
    return c;
}

std::string message_of(const std::string& yaml) {
    try {
        parse_config(yaml, "exp.yaml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

TEST(Config, RoundTripThroughYaml) {
    ExperimentConfig c;
    c.campaign = CampaignKind::coevolution;
    c.algorithm = campaign::Algorithm::ga;
    c.enemies = {1, 4, 8};
    c.seeds = {3, 18446744073709551615ull};
    c.generations = 17;
    c.tick_limit = 1234;
    c.threads = 2;
    c.output_dir = "out dir/x";
    c.ga = ga::GaConfig{};
    c.ga->mutation_rate = 0.07;
    c.ga->mutation_sigma = 0.1 + 0.2;
    c.neat = neat::NeatConfig{};
    c.neat->compat_threshold = 2.75;
    c.player_weights = {1, 2.5, 2};
    c.enemy_weights = {0.5, 2, 3};
    c.schedule = {4, 9, Side::enemy};
    c.sample_size = 3;
    c.match_player = {MatchSide::Kind::genome, "g/p.json"};
    EXPECT_EQ(parse_config(to_yaml(c)), c);
    EXPECT_EQ(to_yaml(parse_config(to_yaml(c))), to_yaml(c));
}

TEST(Config, DefaultConstants) {
    const auto c = parse_config("format_version: 1\ncampaign: baseline\nalgorithm: neat\nenemies: [2]\nseeds: [1]\nneat: {}\n");
    EXPECT_EQ(c.player_weights, eval::FitnessWeights::player_default());
    EXPECT_EQ(c.enemy_weights, eval::FitnessWeights::enemy_default());
    EXPECT_EQ(c.schedule.turn_length, 3);
    EXPECT_EQ(c.schedule.total_generations, 100);
    EXPECT_EQ(c.sample_size, 5u);
}

TEST(Config, DiagnosticsNameTheLine) {
    const std::string head = "format_version: 1\ncampaign: baseline\nalgorithm: neat\nenemies: [2]\nseeds: [1]\n";
    EXPECT_EQ(message_of(head + "neat: {}\nbogus: 3\n"), "exp.yaml:7: unknown field 'bogus' in experiment");
    EXPECT_NE(message_of(head).find("'neat' block"), std::string::npos) << message_of(head);
    EXPECT_NE(message_of(head + "neat:\n  population_size: 10\n  add_node_rate: 2\n").find("exp.yaml:7:"), std::string::npos);
    EXPECT_NE(message_of("format_version: 1\ncampaign: tournament\n").find("exp.yaml:2:"), std::string::npos);
    EXPECT_NE(message_of(head + "neat: {}\ngenerations: many\n").find("exp.yaml:7:"), std::string::npos);
    EXPECT_NE(message_of("format_version: 1\ncampaign: baseline\nenemies: [2]\nseeds: []\nneat: {}\n").find("seed"),
              std::string::npos);
    EXPECT_NE(message_of("format_version: 1\ncampaign: baseline\nenemies: [9]\nseeds: [1]\nneat: {}\n").find("out of range"),
              std::string::npos);
    EXPECT_NE(message_of("a: [1\n").find("exp.yaml:"), std::string::npos);
}

TEST(Config, OutputDirFallsBackToTheEnvironment) {
    ExperimentConfig c;
    ::setenv("EVOMAN_OUTPUT_DIR", "/tmp/from-env", 1);
    EXPECT_EQ(resolve_output_dir(c), fs::path("/tmp/from-env"));
    c.output_dir = "explicit";
    EXPECT_EQ(resolve_output_dir(c), fs::path("explicit"));
    ::unsetenv("EVOMAN_OUTPUT_DIR");
    c.output_dir.clear();
    EXPECT_EQ(resolve_output_dir(c), fs::path("evoman-output"));
}

TEST(Config, HashIgnoresOutputDirAndThreads) {
    auto a = tiny_baseline("x");
    auto b = tiny_baseline("y");
    b.threads = 8;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.generations = 3;
    EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Run, BaselineArtifactInventory) {
    TempDir dir("inventory");
    const auto cfg = tiny_baseline(dir.path());
    const auto s = run_experiment(cfg);
    EXPECT_TRUE(s.complete);
    ASSERT_EQ(s.csv_files.size(), 2u);  // the job log, then summary.csv
    EXPECT_EQ(s.csv_files[1], dir.path() / "summary.csv");
    ASSERT_EQ(s.genome_files.size(), 1u);
    ASSERT_EQ(s.replay_files.size(), 1u);
    const auto csv = read_csv(s.csv_files[0]);
    EXPECT_EQ(csv.rows.size(), 2u);
    ASSERT_FALSE(csv.comments.empty());
    EXPECT_EQ(csv.comments[0], provenance_line(config_hash(cfg), "7"));
    const std::vector<std::string> first8(csv.header.begin(), csv.header.begin() + 8);
    EXPECT_EQ(first8, (std::vector<std::string>{"algorithm", "enemy_id", "seed", "generation", "best_fitness",
                                                "best_player_energy", "enemy_energy", "duration"}));
    EXPECT_TRUE(fs::exists(dir.path() / "summary.csv"));
    EXPECT_TRUE(fs::exists(dir.path() / "config.yaml"));
    EXPECT_EQ(load_config(dir.path() / "config.yaml"), cfg);

    const auto log = replay::load(s.replay_files[0]);
    EXPECT_EQ(log.config_hash, config_hash(cfg));
    EXPECT_EQ(log.master_seed, 7u);
    const auto sim = eval::resimulate(log);
    EXPECT_EQ(sim.player.self_energy, std::stod(csv.at(1, "best_player_energy")));
    EXPECT_EQ(sim.enemy.self_energy, std::stod(csv.at(1, "enemy_energy")));
    EXPECT_EQ(sim.player.duration, std::stoi(csv.at(1, "duration")));
}

TEST(Run, IdenticalConfigGivesByteIdenticalFiles) {
    TempDir a("rerun-a");
    TempDir b("rerun-b");
    auto ca = tiny_baseline(a.path());
    ca.enemies = {2, 3};
    auto cb = ca;
    cb.output_dir = b.path();
    cb.threads = 3;
    const auto sa = run_experiment(ca);
    const auto sb = run_experiment(cb);
    for (std::size_t i = 0; i < sa.csv_files.size(); ++i) EXPECT_EQ(slurp(sa.csv_files[i]), slurp(sb.csv_files[i]));
    for (std::size_t i = 0; i < sa.replay_files.size(); ++i) EXPECT_EQ(slurp(sa.replay_files[i]), slurp(sb.replay_files[i]));
    for (std::size_t i = 0; i < sa.genome_files.size(); ++i) EXPECT_EQ(slurp(sa.genome_files[i]), slurp(sb.genome_files[i]));
    EXPECT_EQ(slurp(a.path() / "summary.csv"), slurp(b.path() / "summary.csv"));
}

TEST(Run, InterruptedRunResumesToTheSameResult) {
    TempDir whole("whole");
    TempDir parts("parts");
    auto cfg = tiny_baseline(whole.path());
    cfg.generations = 4;
    cfg.seeds = {1, 2};
    const auto full = run_experiment(cfg);

    cfg.output_dir = parts.path();
    RunOptions stop;
    stop.stop_after_generations = 3;
    EXPECT_FALSE(run_experiment(cfg, stop).complete);
    EXPECT_FALSE(run_experiment(cfg, stop).complete);
    const auto resumed = run_experiment(cfg);
    EXPECT_TRUE(resumed.complete);
    ASSERT_EQ(resumed.csv_files.size(), full.csv_files.size());
    for (std::size_t i = 0; i < full.csv_files.size(); ++i) EXPECT_EQ(slurp(resumed.csv_files[i]), slurp(full.csv_files[i]));
    EXPECT_EQ(slurp(parts.path() / "summary.csv"), slurp(whole.path() / "summary.csv"));
}

TEST(Run, ChangedConfigDoesNotResumeAStaleCheckpoint) {
    TempDir dir("stale");
    auto cfg = tiny_baseline(dir.path());
    cfg.generations = 3;
    RunOptions stop;
    stop.stop_after_generations = 1;
    run_experiment(cfg, stop);
    cfg.neat->add_node_rate = 0.5;
    const auto s = run_experiment(cfg);
    TempDir fresh("fresh");
    cfg.output_dir = fresh.path();
    const auto f = run_experiment(cfg);
    EXPECT_EQ(slurp(s.csv_files[0]), slurp(f.csv_files[0]));
}

TEST(Run, CoevolutionWritesBothGenomesAndTwiceTheRows) {
    TempDir dir("coevo");
    auto cfg = tiny_baseline(dir.path());
    cfg.campaign = CampaignKind::coevolution;
    cfg.schedule = {3, 4, Side::player};
    const auto s = run_experiment(cfg);
    EXPECT_EQ(s.genome_files.size(), 2u);
    const auto csv = read_csv(s.csv_files[0]);
    EXPECT_EQ(csv.rows.size(), 8u);
    EXPECT_EQ(csv.at(0, "evolving_side"), "player");
    EXPECT_EQ(csv.at(3, "evolving_side"), "enemy");
    const auto sim = eval::resimulate(replay::load(s.replay_files[0]));
    EXPECT_EQ(sim.player.self_energy, std::stod(csv.at(7, "best_player_energy")));
    EXPECT_EQ(sim.enemy.self_energy, std::stod(csv.at(7, "best_enemy_energy")));
}

TEST(Run, SingleMatchUsesStoredGenomes) {
    TempDir dir("single");
    const auto trained = run_experiment(tiny_baseline(dir.path() / "train"));
    ExperimentConfig m;
    m.campaign = CampaignKind::single_match;
    m.enemies = {5, 6};
    m.seeds = {1};
    m.output_dir = dir.path() / "match";
    m.match_player = {MatchSide::Kind::genome, trained.genome_files[0]};
    const auto s = run_experiment(m);
    EXPECT_EQ(s.replay_files.size(), 2u);
    const auto summary = read_csv(dir.path() / "match" / "summary.csv");
    ASSERT_GE(summary.rows.size(), 2u);
    const auto sim = eval::resimulate(replay::load(s.replay_files[0]));
    EXPECT_EQ(sim.player.self_energy, std::stod(summary.at(0, "player_energy")));
}

TEST(Replay, FileRoundTripAndCorruption) {
    TempDir dir("replay");
    eval::RandomController p(1);
    eval::ScriptedController e;
    auto r = eval::run_match(p, e, {2, enemies::builtin_archetype(4), 5, 3000, true});
    r.replay->config_hash = 0xabcdef;
    r.replay->master_seed = 9;
    const auto file = dir.path() / "m.replay";
    replay::save(file, *r.replay);
    EXPECT_EQ(replay::load(file), *r.replay);

    const auto text = slurp(file);
    std::ofstream(dir.path() / "cut.replay") << text.substr(0, text.size() / 2);
    EXPECT_THROW(replay::load(dir.path() / "cut.replay"), ParseError);
    std::string bumped = text;
    bumped.replace(bumped.find("format_version 1"), 16, "format_version 7");
    std::ofstream(dir.path() / "v7.replay") << bumped;
    try {
        replay::load(dir.path() / "v7.replay");
        FAIL();
    } catch (const ParseError& err) {
        EXPECT_NE(std::string(err.what()).find("version"), std::string::npos);
    }
    EXPECT_THROW(replay::load(dir.path() / "missing.replay"), ParseError);
}

// ---- the evoman executable

int run_cli(const std::string& args, const fs::path& out) {
    const std::string cmd = std::string(EVOMAN_CLI) + " " + args + " > " + out.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodesAndVerbs) {
    TempDir dir("cli");
    const auto out = dir.path() / "out.txt";
    EXPECT_EQ(run_cli("describe-sensors", out), 0);
    EXPECT_NE(slurp(out).find("| 67 | time-step counter | tick |"), std::string::npos);

    std::ofstream(dir.path() / "bad.yaml") << "format_version: 1\ncampaign: baseline\nalgorithm: neat\nenemies: [2]\nseeds: [1]\n";
    EXPECT_EQ(run_cli("run " + (dir.path() / "bad.yaml").string(), out), 1);
    EXPECT_NE(slurp(out).find("'neat' block"), std::string::npos) << slurp(out);

    std::ofstream(dir.path() / "ok.yaml") << "format_version: 1\ncampaign: baseline\nalgorithm: ga\nenemies: [5]\nseeds: [3]\n"
                                             "generations: 2\nga: {population_size: 4}\noutput_dir: "
                                          << (dir.path() / "run").string() << "\n";
    EXPECT_EQ(run_cli("run -q " + (dir.path() / "ok.yaml").string(), out), 0) << slurp(out);
    const auto replay_file = dir.path() / "run" / "replays" / "baseline_ga_e5_s3.replay";
    ASSERT_TRUE(fs::exists(replay_file));
    EXPECT_EQ(run_cli("replay " + replay_file.string(), out), 0);
    const auto csv = read_csv(dir.path() / "run" / "baseline_ga_e5_s3.csv");
    const auto summary = slurp(out);
    EXPECT_NE(summary.find("player_energy=" + csv.at(1, "best_player_energy")), std::string::npos) << summary;
    EXPECT_NE(summary.find("enemy_energy=" + csv.at(1, "enemy_energy")), std::string::npos) << summary;

    std::ofstream(dir.path() / "junk.replay") << "not a replay\n";
    EXPECT_EQ(run_cli("replay " + (dir.path() / "junk.replay").string(), out), 1);
    EXPECT_NE(run_cli("frobnicate", out), 0);
}

}  // namespace
}  // namespace evoman::experiment
