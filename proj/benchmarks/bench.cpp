#include <benchmark/benchmark.h>

#include <random>

#include "evoman/enemies.hpp"
#include "evoman/engine.hpp"
#include "evoman/evaluation.hpp"
#include "evoman/ga.hpp"
#include "evoman/neat.hpp"
#include "evoman/neurocontroller.hpp"
#include "evoman/sensors.hpp"

using namespace evoman;

namespace {

engine::GameState busy_state(int archetype) {
    auto s = engine::initial_state(builtin_stage(1), enemies::builtin_archetype(archetype), 1);
    ActionSet shoot;
    shoot.shoot = true;
    for (int t = 0; t < 40; ++t) engine::advance(s, shoot, enemies::enemy_policy(s, *s.archetype));
    return s;
}

sensors::SensorVector random_sensors(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    sensors::SensorVector v;
    for (auto& x : v) x = u(rng);
    return v;
}

void BM_EngineStep(benchmark::State& st) {
    const auto s = busy_state(static_cast<int>(st.range(0)));
    ActionSet a;
    a.right = a.shoot = true;
    const auto e = enemies::enemy_policy(s, *s.archetype);
    for (auto _ : st) benchmark::DoNotOptimize(engine::step(s, a, e));
}
BENCHMARK(BM_EngineStep)->DenseRange(1, 8);

void BM_Sense(benchmark::State& st) {
    const auto s = busy_state(2);
    for (auto _ : st) benchmark::DoNotOptimize(sensors::sense(s, Side::player));
}
BENCHMARK(BM_Sense);

void BM_ActivateFixed(benchmark::State& st) {
    Rng rng(1);
    const auto g = ga::random_fixed_genome(nn::fixed_genome_length, 1.0, rng);
    const auto x = random_sensors(2);
    for (auto _ : st) benchmark::DoNotOptimize(nn::activate_fixed(g, x));
}
BENCHMARK(BM_ActivateFixed);

void BM_ActivateNeat(benchmark::State& st) {
    Rng rng(1);
    neat::NeatConfig cfg;
    cfg.population_size = 1;
    neat::NeatState state;
    auto g = neat::initial_population(68, 5, cfg, state, rng)[0];
    for (int i = 0; i < st.range(0); ++i) neat::mutate_add_node(g, state.registry, rng);
    const auto net = nn::Phenotype::decode(g);
    const auto x = random_sensors(2);
    for (auto _ : st) benchmark::DoNotOptimize(nn::activate_neat(net, x));
}
BENCHMARK(BM_ActivateNeat)->Arg(0)->Arg(10)->Arg(50);

void BM_RandomVsScriptedMatch(benchmark::State& st) {
    std::uint64_t seed = 0;
    for (auto _ : st) {
        eval::RandomController p(seed);
        eval::ScriptedController e;
        benchmark::DoNotOptimize(eval::run_match(p, e, {1, enemies::builtin_archetype(3), seed++}));
    }
}
BENCHMARK(BM_RandomVsScriptedMatch);

void BM_NetworkMatchFullLength(benchmark::State& st) {
    // an idle-ish network against a passive enemy runs to the tick limit
    nn::FixedGenome g{std::vector<double>(nn::fixed_genome_length, 0.0)};
    for (auto _ : st) {
        eval::FixedNetworkController p(g);
        eval::IdleController e;
        benchmark::DoNotOptimize(eval::run_match(p, e, {1, enemies::builtin_archetype(5), 1}));
    }
}
BENCHMARK(BM_NetworkMatchFullLength)->Unit(benchmark::kMillisecond);

void BM_NeatGeneration(benchmark::State& st) {
    neat::NeatConfig cfg;
    cfg.population_size = static_cast<std::size_t>(st.range(0));
    Rng rng(3);
    neat::NeatState state;
    auto pop = neat::initial_population(68, 5, cfg, state, rng);
    std::mt19937_64 noise(4);
    std::normal_distribution<double> f(0, 10);
    for (auto _ : st) {
        std::vector<double> fitness(pop.size());
        for (auto& x : fitness) x = f(noise);
        pop = neat::evolve_generation_neat(pop, fitness, state, cfg, rng);
    }
}
BENCHMARK(BM_NeatGeneration)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_GaGeneration(benchmark::State& st) {
    ga::GaConfig cfg;
    Rng rng(3);
    std::vector<nn::FixedGenome> pop;
    for (std::size_t i = 0; i < cfg.population_size; ++i) pop.push_back(ga::random_fixed_genome(nn::fixed_genome_length, 1, rng));
    std::vector<double> fitness(pop.size(), 0.0);
    for (auto _ : st) pop = ga::evolve_generation_ga(pop, fitness, cfg, rng);
}
BENCHMARK(BM_GaGeneration);

}  // namespace
BENCHMARK_MAIN();
