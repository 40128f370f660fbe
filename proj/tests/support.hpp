#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "evoman/enemies.hpp"
#include "evoman/engine.hpp"

namespace evoman::testing {

inline engine::GameState fresh_state(int archetype = 5, std::uint64_t seed = 1, int tick_limit = engine::default_tick_limit) {
    return engine::initial_state(builtin_stage(1), enemies::builtin_archetype(archetype), seed, tick_limit);
}

/// Both characters standing on the floor at fixed x, nothing in flight.
inline engine::GameState quiet_state(int archetype = 5) {
    auto s = fresh_state(archetype);
    s.player.body = Rect::standing_at({200, 512}, engine::player_size);
    s.enemy.body = Rect::standing_at({500, 512}, s.archetype->body_size);
    return s;
}

inline ActionSet random_player_actions(std::mt19937_64& rng) {
    std::bernoulli_distribution coin(0.5);
    ActionSet a;
    a.left = coin(rng);
    a.right = coin(rng);
    a.jump = coin(rng);
    a.release = coin(rng);
    a.shoot = coin(rng);
    return a;
}

inline ActionSet random_enemy_actions(std::mt19937_64& rng) {
    ActionSet a = random_player_actions(rng);
    std::bernoulli_distribution rare(0.2);
    for (auto& b : a.shoot_n) b = rare(rng);
    return a;
}

/// Scratch directory removed at destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("evoman-" + tag + "-" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace evoman::testing
