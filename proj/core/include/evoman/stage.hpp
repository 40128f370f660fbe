#pragma once

#include <vector>

#include "evoman/geometry.hpp"

namespace evoman {

/// Arena geometry. Platforms are one-way: characters land on them from above and pass
/// through from below or the sides. Projectiles ignore platforms.
struct StageLayout {
    int id = 1;
    Rect arena{{0, 0}, {736, 512}};
    std::vector<Rect> platforms;
    Vec2 spawn_player{96, 512};  ///< bottom-center of the body
    Vec2 spawn_enemy{640, 512};

    friend bool operator==(const StageLayout&, const StageLayout&) = default;
};

inline constexpr int stage_count = 8;

/// Built-in stage `id` in [1, 8]. Throws ConfigError otherwise.
const StageLayout& builtin_stage(int id);

}  // namespace evoman
