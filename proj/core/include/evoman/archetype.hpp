#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evoman/actions.hpp"
#include "evoman/geometry.hpp"

namespace evoman {

/// How the engine moves an enemy body during a phase, given its horizontal intent.
enum class Movement {
    hold,      ///< turns toward the intent but does not move
    pursue,    ///< walks along the intent at the phase speed
    teleport,  ///< relocates once, on the phase's first tick, then holds
};

struct PhaseSpec {
    std::string name;
    int duration = 1;  ///< ticks
    Movement movement = Movement::hold;
    double speed = 0.0;  ///< px/tick for pursue phases
    bool jump = false;
    bool immune = false;
    std::array<bool, enemy_weapon_count> weapons{};  ///< shootN emitted on every tick of the phase

    bool attacks() const {
        for (bool w : weapons) {
            if (w) return true;
        }
        return false;
    }
};

/// One enemy weapon (fired by shootN).
struct ProjectileSpec {
    Vec2 offset;    ///< spawn center relative to the body center; x mirrored when facing left
    Vec2 velocity;  ///< px/tick; x mirrored when facing left
    Vec2 size;
    double damage = 20.0;
    double gravity = 0.0;   ///< px/tick^2 added to vertical velocity
    int lifetime = 240;     ///< ticks before the projectile fizzles
    int boomerang_after = -1;  ///< tick age at which vx reverses; -1 never
    bool aimed = false;     ///< velocity magnitude redirected at the opponent's center at spawn
    /// Spawn x is measured from the opponent's center instead of the enemy's (falling attacks).
    bool anchored_to_opponent = false;
};

/// Rule-based enemy definition. Also the "body" (size, weapons, gravity) of an evolved enemy.
struct EnemyArchetype {
    int id = 0;
    std::string name;
    std::string analog;
    Vec2 body_size{32, 44};
    double gravity_scale = 1.0;
    int cooldown = 30;  ///< ticks between volleys
    std::vector<PhaseSpec> phases;
    std::array<std::optional<ProjectileSpec>, enemy_weapon_count> weapons;
    /// Weapons fired when an evolved controller presses the generic `shoot` action.
    std::array<bool, enemy_weapon_count> primary_volley{};

    int cycle_length() const;
    std::size_t phase_index_at(int tick) const;
    const PhaseSpec& phase_at(int tick) const { return phases[phase_index_at(tick)]; }
    /// True on the first tick of a phase.
    bool phase_starts_at(int tick) const;
};

using ArchetypePtr = std::shared_ptr<const EnemyArchetype>;

}  // namespace evoman
