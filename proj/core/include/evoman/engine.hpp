#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "evoman/actions.hpp"
#include "evoman/archetype.hpp"
#include "evoman/geometry.hpp"
#include "evoman/stage.hpp"

namespace evoman::engine {

// Physics constants, px and ticks (one tick is 1/30 s).
inline constexpr double arena_width = 736.0;
inline constexpr double arena_height = 512.0;
inline constexpr double walk_speed = 5.0;
inline constexpr double jump_impulse = -15.0;
inline constexpr double gravity = 0.9;
inline constexpr double terminal_fall_speed = 10.0;
/// Upper bound of any horizontal body speed (enemy dashes included).
inline constexpr double max_horizontal_speed = 16.0;
/// Upper bound of |vertical speed| for any body.
inline constexpr double max_vertical_speed = 16.0;

inline constexpr Vec2 player_size{24, 36};
inline constexpr Vec2 player_projectile_size{12, 6};
inline constexpr double player_projectile_speed = 12.0;

inline constexpr double max_energy = 100.0;
inline constexpr double player_projectile_damage = 10.0;
inline constexpr double contact_damage = 20.0;

inline constexpr int player_shoot_cooldown = 13;
/// Ticks of contact-damage immunity after the player is touched.
inline constexpr int contact_recovery = 30;
inline constexpr int default_tick_limit = 3000;
/// Horizontal jitter applied to both spawn points, drawn from the engine generator.
inline constexpr double spawn_jitter = 16.0;
/// Minimum horizontal gap between a teleporting enemy and the player.
inline constexpr double teleport_clearance = 160.0;

inline constexpr std::size_t max_player_projectiles = 3;
inline constexpr std::size_t max_enemy_projectiles = 8;

using EngineRng = std::minstd_rand;

struct CharacterState {
    Rect body;
    double energy = max_energy;
    Facing facing = Facing::right;
    Vec2 velocity;
    bool on_surface = true;
    int shoot_cooldown = 0;
    /// Maximum value shoot_cooldown can take; used to normalize the timer sensor.
    int max_cooldown = player_shoot_cooldown;
    bool shooting = false;   ///< a projectile was spawned this tick
    bool attacking = false;  ///< an attack button was pressed this tick
    bool immune = false;     ///< enemy only
    int contact_cooldown = 0;

    friend bool operator==(const CharacterState&, const CharacterState&) = default;
};

struct Projectile {
    Rect body;
    Vec2 velocity;
    Side owner = Side::player;
    bool active = false;
    double damage = 0.0;
    double gravity = 0.0;
    int age = 0;
    int lifetime = 0;
    int boomerang_after = -1;

    friend bool operator==(const Projectile&, const Projectile&) = default;
};

enum class Winner { player, enemy, timeout };
const char* to_string(Winner w);

struct GameState {
    int tick = 0;
    int tick_limit = default_tick_limit;
    CharacterState player;
    CharacterState enemy;
    std::array<Projectile, max_player_projectiles> player_projectiles{};
    std::array<Projectile, max_enemy_projectiles> enemy_projectiles{};
    StageLayout stage;
    ArchetypePtr archetype;
    EngineRng rng;
};

struct TickOutcome {
    GameState state;
    std::optional<Winner> terminal;
};

/// Fresh match: both characters at their (jittered) spawn points, full energy, facing each other.
GameState initial_state(const StageLayout& stage, ArchetypePtr archetype, std::uint64_t seed,
                        int tick_limit = default_tick_limit);

/// Advances `state` by one tick in place. Throws ContractViolation on a terminal state.
std::optional<Winner> advance(GameState& state, const ActionSet& player_actions, const ActionSet& enemy_actions);

/// Pure form of advance().
TickOutcome step(GameState state, const ActionSet& player_actions, const ActionSet& enemy_actions);

/// Applies projectile and contact damage for the current positions.
GameState resolve_hits(GameState state);
void resolve_hits_in_place(GameState& state);

std::optional<Winner> is_terminal(const GameState& state, int tick_limit);
inline std::optional<Winner> is_terminal(const GameState& state) { return is_terminal(state, state.tick_limit); }

const CharacterState& character(const GameState& s, Side side);

/// Bit-exact byte serialization of every field (doubles by bit pattern). Two states are
/// identical iff their serializations are equal.
std::string serialize(const GameState& state);

int active_count(const GameState& s, Side owner);

}  // namespace evoman::engine
