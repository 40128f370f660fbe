#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <set>

#include "evoman/campaign.hpp"
#include "evoman/errors.hpp"
#include "evoman/evaluation.hpp"
#include "support.hpp"

namespace evoman::eval {
namespace {

MatchResult constant_damage(double e, double p, int t, double mean_loss) {
    // trace whose mean (100 - p_i) equals mean_loss and ends at p
    MatchResult r;
    r.opponent_energy = e;
    r.self_energy = p;
    r.duration = t;
    r.self_energy_trace.assign(static_cast<std::size_t>(t), 100.0 - mean_loss);
    r.self_energy_trace.back() = p;
    r.self_energy_trace.front() += (100.0 - p) - mean_loss;
    return r;
}

TEST(Fitness, WorkedExamples) {
    MatchResult perfect;
    perfect.opponent_energy = 0;
    perfect.self_energy = 100;
    perfect.duration = 50;
    perfect.self_energy_trace.assign(50, 100.0);
    EXPECT_DOUBLE_EQ(match_fitness(perfect, FitnessWeights::player_default()), 100);

    const auto r = constant_damage(40, 70, 200, 10);
    EXPECT_NEAR(match_fitness(r, FitnessWeights::player_default()), -940, 1e-9);
    EXPECT_NEAR(match_fitness(r, FitnessWeights::enemy_default()), -1840, 1e-9);
}

TEST(Fitness, EmptyTraceIsAContractViolation) {
    MatchResult r;
    EXPECT_THROW(match_fitness(r, {}), ContractViolation);
}

TEST(Fitness, MonotoneInEachEnergy) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(1, 99);
    for (int t = 0; t < 500; ++t) {
        const auto r = constant_damage(u(rng), u(rng), 100, 5);
        for (const auto& w : {FitnessWeights::player_default(), FitnessWeights::enemy_default()}) {
            auto more_p = r;
            more_p.self_energy += 0.5;
            auto more_e = r;
            more_e.opponent_energy += 0.5;
            EXPECT_GT(match_fitness(more_p, w), match_fitness(r, w));
            EXPECT_LT(match_fitness(more_e, w), match_fitness(r, w));
        }
    }
}

TEST(Fitness, UntouchedWinScoresGammaPowerOnly) {
    for (double e : {0.0, 20.0, 55.0}) {
        MatchResult r;
        r.opponent_energy = e;
        r.self_energy = 100;
        r.duration = 10;
        r.self_energy_trace.assign(10, 100.0);
        EXPECT_DOUBLE_EQ(match_fitness(r, {1.5, 2, 2}), std::pow(100 - e, 1.5));
    }
}

TEST(Generalization, MeanOfTheSample) {
    const std::vector<double> f{100, -940, 0, 50, -10};
    const std::vector<std::size_t> all{0, 1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(generalization_fitness(all, [&](std::size_t i) { return f[i]; }), -160);
    EXPECT_DOUBLE_EQ(generalization_fitness(all, [](std::size_t) { return 7.5; }), 7.5);
}

TEST(Generalization, SampleHoldsTheBestAndDistinctOthers) {
    Rng rng(2);
    std::vector<double> f(30);
    std::iota(f.begin(), f.end(), 0.0);
    f[17] = 1000;
    for (int t = 0; t < 200; ++t) {
        const auto s = draw_opponent_sample(f, 5, rng);
        ASSERT_EQ(s.size(), 5u);
        EXPECT_EQ(s[0], 17u);
        EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 5u);
    }
    const std::vector<double> small{3, 1, 2};
    auto s = draw_opponent_sample(small, 5, rng);
    std::sort(s.begin(), s.end());
    EXPECT_EQ(s, (std::vector<std::size_t>{0, 1, 2}));
    const std::vector<double> five{3, 1, 2, 9, 0};
    s = draw_opponent_sample(five, 5, rng);
    std::sort(s.begin(), s.end());
    EXPECT_EQ(s, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(Match, IdlePlayerLosesToTheAirAnalog) {
    IdleController idle;
    ScriptedController air;
    const auto r = run_match(idle, air, {1, enemies::builtin_archetype(2), 9});
    EXPECT_EQ(r.winner, engine::Winner::enemy);
    EXPECT_EQ(r.player.winner, Outcome::opponent);
    EXPECT_EQ(r.enemy.winner, Outcome::self);
}

TEST(Match, MirroredBookkeeping) {
    for (int id = 1; id <= 8; ++id) {
        RandomController p(id);
        RandomController e(id + 100);
        const auto r = run_match(p, e, {id, enemies::builtin_archetype(id), std::uint64_t(id), 800});
        EXPECT_EQ(r.player.opponent_energy, r.enemy.self_energy);
        EXPECT_EQ(r.enemy.opponent_energy, r.player.self_energy);
        EXPECT_EQ(r.player.duration, r.enemy.duration);
        for (const auto* m : {&r.player, &r.enemy}) {
            ASSERT_EQ(m->self_energy_trace.size(), static_cast<std::size_t>(m->duration));
            EXPECT_EQ(m->self_energy_trace.back(), m->self_energy);
            EXPECT_TRUE(std::is_sorted(m->self_energy_trace.rbegin(), m->self_energy_trace.rend()));
        }
    }
}

TEST(Match, RecordedReplayResimulatesExactly) {
    RandomController p(4);
    ScriptedController e;
    const auto r = run_match(p, e, {3, enemies::builtin_archetype(6), 12, 3000, true});
    ASSERT_TRUE(r.replay.has_value());
    const auto again = resimulate(*r.replay);
    EXPECT_EQ(again.player, r.player);
    EXPECT_EQ(again.enemy, r.enemy);
    EXPECT_EQ(again.winner, r.winner);
}

TEST(Match, TamperedReplaysAreRejected) {
    RandomController p(4);
    ScriptedController e;
    const auto r = run_match(p, e, {3, enemies::builtin_archetype(6), 12, 3000, true});
    auto wrong_table = *r.replay;
    wrong_table.archetype_table_hash ^= 1;
    EXPECT_THROW(resimulate(wrong_table), ParseError);
    auto short_log = *r.replay;
    short_log.ticks.pop_back();
    EXPECT_THROW(resimulate(short_log), ParseError);
    auto long_log = *r.replay;
    long_log.ticks.push_back(long_log.ticks.back());
    EXPECT_THROW(resimulate(long_log), ParseError);
}

class Exploding final : public Controller {
public:
    ActionSet decide(const engine::GameState& s, Side) override {
        if (s.tick == 40) throw nn::NonFiniteOutput("boom");
        return {};
    }
};

TEST(Match, NonFiniteOutputForfeits) {
    Exploding p;
    ScriptedController e;
    const auto r = run_match(p, e, {1, enemies::builtin_archetype(5), 1});
    EXPECT_EQ(r.winner, engine::Winner::enemy);
    EXPECT_TRUE(r.player.aborted);
    EXPECT_TRUE(r.enemy.aborted);
    EXPECT_EQ(r.player.self_energy, 0);
    EXPECT_FALSE(r.abort_reason.empty());
}

TEST(Match, ScriptedControllerIsEnemyOnly) {
    ScriptedController s;
    IdleController idle;
    EXPECT_THROW(run_match(s, idle, {1, enemies::builtin_archetype(1), 1}), ContractViolation);
}

TEST(Parallel, VisitsEveryIndexOnceAndRethrows) {
    std::vector<std::atomic<int>> hits(500);
    parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(50, 3,
                              [](std::size_t i) {
                                  if (i == 31) throw std::runtime_error("x");
                              }),
                 std::runtime_error);
}

}  // namespace
}  // namespace evoman::eval

namespace evoman::campaign {
namespace {

TEST(Schedule, ThreeByThreeAlternation) {
    CoevolutionSchedule s{3, 6, Side::player};
    const auto u = s.unroll();
    ASSERT_EQ(u.size(), 12u);
    const std::vector<Side> head(u.begin(), u.begin() + 6);
    using enum Side;
    EXPECT_EQ(head, (std::vector<Side>{player, player, player, enemy, enemy, enemy}));
    EXPECT_EQ(std::count(u.begin(), u.end(), player), 6);
}

TEST(Schedule, UnevenTurnsAndEnemyStart) {
    CoevolutionSchedule s{4, 5, Side::enemy};
    using enum Side;
    EXPECT_EQ(s.unroll(), (std::vector<Side>{enemy, enemy, enemy, enemy, player, player, player, player, enemy, player}));
    s.turn_length = 0;
    EXPECT_THROW(s.validate(), ConfigError);
}

AlgorithmConfig small(Algorithm a, std::size_t n = 6) {
    AlgorithmConfig c;
    c.algorithm = a;
    c.ga.population_size = n;
    c.neat.population_size = n;
    return c;
}

TEST(Baseline, RowsEnergiesAndDeterminism) {
    for (auto alg : {Algorithm::ga, Algorithm::neat}) {
        BaselineSetup s{small(alg), 5, 3, 4};
        s.threads = 1;
        BaselineRun a(s);
        s.threads = 3;
        BaselineRun b(s);
        while (!a.done()) a.step();
        while (!b.done()) b.step();
        ASSERT_EQ(a.rows().size(), 4u);
        for (std::size_t i = 0; i < 4; ++i) {
            const auto& r = a.rows()[i];
            EXPECT_EQ(r.generation, static_cast<int>(i) + 1);
            EXPECT_GE(r.best_player_energy, 0);
            EXPECT_LE(r.best_player_energy, 100);
            EXPECT_EQ(r.best_fitness, b.rows()[i].best_fitness);
            if (i > 0) EXPECT_GE(r.best_fitness, a.rows()[i - 1].best_fitness);  // elitism, fixed match seed
        }
        EXPECT_EQ(a.population().fingerprint(), b.population().fingerprint());
        const auto m = a.best_match(true);
        EXPECT_EQ(m.player.self_energy, a.rows().back().best_player_energy);
        EXPECT_EQ(m.enemy.self_energy, a.rows().back().enemy_energy);
    }
}

TEST(Baseline, ResumeEqualsUninterrupted) {
    BaselineSetup s{small(Algorithm::neat), 2, 8, 5};
    BaselineRun whole(s);
    while (!whole.done()) whole.step();

    BaselineRun first(s);
    first.step();
    first.step();
    const auto saved = nlohmann::json::parse(first.checkpoint().dump());
    auto rest = BaselineRun::resume(s, saved);
    while (!rest.done()) rest.step();
    EXPECT_EQ(rest.population().fingerprint(), whole.population().fingerprint());
    ASSERT_EQ(rest.rows().size(), whole.rows().size());
    for (std::size_t i = 0; i < rest.rows().size(); ++i) EXPECT_EQ(rest.rows()[i].best_fitness, whole.rows()[i].best_fitness);
}

TEST(Coevolution, FreezeLawAndRowShape) {
    CoevolutionSetup s;
    s.player = small(Algorithm::neat, 7);
    s.enemy = small(Algorithm::ga, 7);
    s.schedule = {2, 3, Side::player};
    s.enemy_id = 1;
    s.seed = 5;
    CoevolutionRun run(s);
    const auto expected = s.schedule.unroll();
    while (!run.done()) {
        const auto p = run.population(Side::player).fingerprint();
        const auto e = run.population(Side::enemy).fingerprint();
        const auto& row = run.step();
        EXPECT_EQ(row.evolving_side, expected[static_cast<std::size_t>(row.generation - 1)]);
        if (row.evolving_side == Side::player)
            EXPECT_EQ(run.population(Side::enemy).fingerprint(), e);
        else
            EXPECT_EQ(run.population(Side::player).fingerprint(), p);
    }
    EXPECT_EQ(run.rows().size(), 6u);
    // every side got exactly its generation budget
    int last_p = 0, last_e = 0;
    for (const auto& r : run.rows()) (r.evolving_side == Side::player ? last_p : last_e) = r.side_generation;
    EXPECT_EQ(last_p, 3);
    EXPECT_EQ(last_e, 3);
}

TEST(Coevolution, ResumeEqualsUninterrupted) {
    CoevolutionSetup s;
    s.player = s.enemy = small(Algorithm::neat, 6);
    s.schedule = {3, 3, Side::player};
    s.seed = 21;
    CoevolutionRun whole(s);
    while (!whole.done()) whole.step();
    CoevolutionRun part(s);
    for (int i = 0; i < 4; ++i) part.step();
    auto rest = CoevolutionRun::resume(s, nlohmann::json::parse(part.checkpoint().dump()));
    while (!rest.done()) rest.step();
    EXPECT_EQ(rest.population(Side::player).fingerprint(), whole.population(Side::player).fingerprint());
    EXPECT_EQ(rest.population(Side::enemy).fingerprint(), whole.population(Side::enemy).fingerprint());
    EXPECT_EQ(rest.rows().back().best_player_energy, whole.rows().back().best_player_energy);
}

TEST(Campaign, BestIndexPrefersTheLowestTie) {
    const std::vector<double> f{1, 4, 4, 2};
    EXPECT_EQ(best_index(f), 1u);
    EXPECT_THROW(algorithm_from_string("pso"), ConfigError);
}

}  // namespace
}  // namespace evoman::campaign
