// Archetype balancing report: random-player loss rates and desk-scale NEAT baselines.
#include <chrono>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "evoman/campaign.hpp"
#include "evoman/enemies.hpp"

using namespace evoman;

namespace {

/// Faces the enemy and shoots whenever possible.
class Turret final : public eval::Controller {
public:
    ActionSet decide(const engine::GameState& s, Side) override {
        ActionSet a;
        const bool enemy_right = s.enemy.body.center().x > s.player.body.center().x;
        const bool facing_right = s.player.facing == Facing::right;
        if (enemy_right != facing_right) (enemy_right ? a.right : a.left) = true;
        a.shoot = true;
        return a;
    }
};

void random_losses(int matches) {
    fmt::print("{:>3} {:>8} {:>8} {:>8} {:>8} {:>10} {:>16}\n", "id", "rnd_loss", "rnd_tout", "avg_dur", "avg_e", "idle",
               "turret p/e@t");
    for (const auto& arch : enemies::builtin_archetypes()) {
        int losses = 0, timeouts = 0;
        double dur = 0, enemy_left = 0;
        for (int m = 0; m < matches; ++m) {
            eval::RandomController player(derive_seed(static_cast<std::uint64_t>(m), Stream::controller));
            eval::ScriptedController enemy;
            const auto r = eval::run_match(player, enemy, {arch->id, arch, static_cast<std::uint64_t>(m), engine::default_tick_limit});
            losses += r.winner == engine::Winner::enemy;
            timeouts += r.winner == engine::Winner::timeout;
            dur += r.player.duration;
            enemy_left += r.enemy.self_energy;
        }
        eval::IdleController idle;
        Turret turret;
        eval::ScriptedController e1, e2;
        const auto ri = eval::run_match(idle, e1, {arch->id, arch, 7, engine::default_tick_limit});
        const auto rt = eval::run_match(turret, e2, {arch->id, arch, 7, engine::default_tick_limit});
        fmt::print("{:>3} {:>8} {:>8} {:>8.0f} {:>8.1f} {:>5}@{:<4} {:>6.0f}/{:.0f}@{}\n", arch->id, losses, timeouts, dur / matches,
                   enemy_left / matches, engine::to_string(ri.winner), ri.player.duration, rt.player.self_energy,
                   rt.enemy.self_energy, rt.player.duration);
    }
}

void neat_baseline(int enemy, int seeds, int generations, std::size_t pop, bool ga) {
    int wins = 0;
    for (int s = 1; s <= seeds; ++s) {
        const auto t0 = std::chrono::steady_clock::now();
        campaign::BaselineSetup setup;
        setup.algorithm.algorithm = ga ? campaign::Algorithm::ga : campaign::Algorithm::neat;
        setup.algorithm.neat.population_size = pop;
        setup.algorithm.ga.population_size = pop;
        setup.enemy_id = enemy;
        setup.seed = static_cast<std::uint64_t>(s);
        setup.generations = generations;
        campaign::BaselineRun run(setup);
        while (!run.done()) {
            const auto& r = run.step();
            if (r.generation % 10 == 0 || run.done()) {
                fmt::print("  seed {} gen {:>3} best {:>9.1f} mean {:>9.1f} p {:>5.1f} e {:>5.1f} dur {:>4} species {}\n", s,
                           r.generation, r.best_fitness, r.mean_fitness, r.best_player_energy, r.enemy_energy, r.duration,
                           r.species_sizes.size());
            }
        }
        const auto& last = run.rows().back();
        wins += last.best_player_energy > 0 && last.enemy_energy == 0;
        fmt::print("seed {} -> player {:.0f} enemy {:.0f} ({:.1f}s)\n", s, last.best_player_energy, last.enemy_energy,
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    fmt::print("enemy {}: {}/{} wins\n", enemy, wins, seeds);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Archetype calibration report"};
    int matches = 100;
    std::vector<int> evolve;
    int seeds = 5, generations = 50;
    std::size_t pop = 50;
    bool ga = false;
    app.add_option("--matches", matches);
    app.add_option("--evolve", evolve, "archetype ids to run NEAT baselines against");
    app.add_option("--seeds", seeds);
    app.add_option("--generations", generations);
    app.add_option("--population", pop);
    app.add_flag("--ga", ga);
    CLI11_PARSE(app, argc, argv);
    if (matches > 0) random_losses(matches);
    for (int e : evolve) neat_baseline(e, seeds, generations, pop, ga);
    return 0;
}
