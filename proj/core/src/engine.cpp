#include "evoman/engine.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "evoman/errors.hpp"
#include "evoman/rng.hpp"

namespace evoman::engine {
namespace {

/// Uniform integer in [-span, span] from raw generator output; independent of the standard
/// library's distribution implementations.
double jitter(EngineRng& rng, int span) {
    const auto range = static_cast<EngineRng::result_type>(2 * span + 1);
    return static_cast<double>(static_cast<int>(rng() % range) - span);
}

void apply_facing(CharacterState& c, int intent) {
    if (intent < 0) c.facing = Facing::left;
    if (intent > 0) c.facing = Facing::right;
}

void clamp_horizontal(CharacterState& c, const Rect& arena) {
    if (c.body.min.x < arena.min.x) c.body = c.body.translated({arena.min.x - c.body.min.x, 0});
    if (c.body.max.x > arena.max.x) c.body = c.body.translated({arena.max.x - c.body.max.x, 0});
}

void integrate_vertical(CharacterState& c, const ActionSet& a, double g) {
    if (a.jump && c.on_surface) c.velocity.y = jump_impulse;
    if (a.release && c.velocity.y < 0) c.velocity.y = 0;
    c.velocity.y = std::min(c.velocity.y + g, terminal_fall_speed);
}

/// Moves the body vertically and clamps it against arena bounds and one-way platforms.
void move_and_collide_vertical(CharacterState& c, const StageLayout& stage) {
    const double prev_bottom = c.body.max.y;
    c.body = c.body.translated({0, c.velocity.y});

    if (c.body.min.y < stage.arena.min.y) {
        c.body = c.body.translated({0, stage.arena.min.y - c.body.min.y});
        if (c.velocity.y < 0) c.velocity.y = 0;
    }

    c.on_surface = false;
    if (c.velocity.y >= 0) {
        for (const Rect& p : stage.platforms) {
            const bool over = c.body.min.x < p.max.x && p.min.x < c.body.max.x;
            if (over && prev_bottom <= p.min.y && c.body.max.y >= p.min.y) {
                c.body = c.body.translated({0, p.min.y - c.body.max.y});
                c.velocity.y = 0;
                c.on_surface = true;
                break;
            }
        }
    }
    if (c.body.max.y >= stage.arena.max.y) {
        c.body = c.body.translated({0, stage.arena.max.y - c.body.max.y});
        c.velocity.y = 0;
        c.on_surface = true;
    }
}

template <std::size_t N>
Projectile* free_slot(std::array<Projectile, N>& pool) {
    for (auto& p : pool) {
        if (!p.active) return &p;
    }
    return nullptr;
}

void spawn_player_projectile(GameState& s, const ActionSet& a) {
    CharacterState& c = s.player;
    c.attacking = a.shoot;
    c.shooting = false;
    if (!a.shoot || c.shoot_cooldown > 0) return;
    Projectile* slot = free_slot(s.player_projectiles);
    if (slot == nullptr) return;

    const Vec2 size = player_projectile_size;
    const double y = c.body.center().y - size.y / 2;
    const double x = c.facing == Facing::right ? c.body.max.x : c.body.min.x - size.x;
    *slot = Projectile{.body = Rect::from_size({x, y}, size),
                       .velocity = {player_projectile_speed * static_cast<double>(c.facing), 0},
                       .owner = Side::player,
                       .active = true,
                       .damage = player_projectile_damage,
                       .gravity = 0,
                       .age = 0,
                       .lifetime = 120,
                       .boomerang_after = -1};
    c.shoot_cooldown = player_shoot_cooldown;
    c.shooting = true;
}

void spawn_enemy_projectiles(GameState& s, const ActionSet& a) {
    const EnemyArchetype& arch = *s.archetype;
    CharacterState& c = s.enemy;
    auto requested = a.shoot_n;
    if (a.shoot && !a.any_weapon()) requested = arch.primary_volley;

    bool any = false;
    for (bool r : requested) any = any || r;
    c.attacking = any;
    c.shooting = false;
    if (!any || c.shoot_cooldown > 0) return;

    const double dir = static_cast<double>(c.facing);
    const Vec2 center = c.body.center();
    for (std::size_t n = 0; n < enemy_weapon_count; ++n) {
        if (!requested[n] || !arch.weapons[n]) continue;
        Projectile* slot = free_slot(s.enemy_projectiles);
        if (slot == nullptr) break;
        const ProjectileSpec& w = *arch.weapons[n];
        const double origin_x = w.anchored_to_opponent ? s.player.body.center().x : center.x;
        const Vec2 spawn{origin_x + dir * w.offset.x, center.y + w.offset.y};
        Vec2 velocity{dir * w.velocity.x, w.velocity.y};
        if (w.aimed) {
            const Vec2 to = s.player.body.center() - spawn;
            const double dist = std::hypot(to.x, to.y);
            const double speed = std::hypot(w.velocity.x, w.velocity.y);
            if (dist > 0) velocity = to * (speed / dist);
        }
        *slot = Projectile{.body = Rect::from_size({spawn.x - w.size.x / 2, spawn.y - w.size.y / 2}, w.size),
                           .velocity = velocity,
                           .owner = Side::enemy,
                           .active = true,
                           .damage = w.damage,
                           .gravity = w.gravity,
                           .age = 0,
                           .lifetime = w.lifetime,
                           .boomerang_after = w.boomerang_after};
        c.shooting = true;
    }
    if (c.shooting) c.shoot_cooldown = arch.cooldown;
}

template <std::size_t N>
void move_projectiles(std::array<Projectile, N>& pool, const Rect& arena) {
    for (auto& p : pool) {
        if (!p.active) continue;
        ++p.age;
        if (p.age == p.boomerang_after) p.velocity.x = -p.velocity.x;
        p.velocity.y += p.gravity;
        p.body = p.body.translated(p.velocity);
        if (p.age >= p.lifetime || !arena.overlaps(p.body)) p.active = false;
    }
}

void teleport_enemy(GameState& s) {
    CharacterState& e = s.enemy;
    const Rect& arena = s.stage.arena;
    const double w = e.body.width();
    const double player_x = s.player.body.center().x;
    // Land on the side of the arena with more room, away from the player.
    const bool go_right = player_x < arena.center().x;
    const double lo = go_right ? std::min(player_x + teleport_clearance, arena.max.x - w / 2) : arena.min.x + w / 2;
    const double hi = go_right ? arena.max.x - w / 2 : std::max(player_x - teleport_clearance, arena.min.x + w / 2);
    const auto span = static_cast<EngineRng::result_type>(std::max(1.0, hi - lo));
    const double x = lo + static_cast<double>(s.rng() % span);
    e.body = Rect::standing_at({x, arena.max.y}, {w, e.body.height()});
    e.velocity = {0, 0};
    e.on_surface = true;
}

void write_double(std::string& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

void write_int(std::string& out, std::int64_t v) { write_double(out, std::bit_cast<double>(v)); }

void write_rect(std::string& out, const Rect& r) {
    write_double(out, r.min.x);
    write_double(out, r.min.y);
    write_double(out, r.max.x);
    write_double(out, r.max.y);
}

void write_character(std::string& out, const CharacterState& c) {
    write_rect(out, c.body);
    write_double(out, c.energy);
    write_int(out, static_cast<int>(c.facing));
    write_double(out, c.velocity.x);
    write_double(out, c.velocity.y);
    out.push_back(static_cast<char>(c.on_surface));
    write_int(out, c.shoot_cooldown);
    write_int(out, c.max_cooldown);
    out.push_back(static_cast<char>(c.shooting));
    out.push_back(static_cast<char>(c.attacking));
    out.push_back(static_cast<char>(c.immune));
    write_int(out, c.contact_cooldown);
}

void write_projectile(std::string& out, const Projectile& p) {
    write_rect(out, p.body);
    write_double(out, p.velocity.x);
    write_double(out, p.velocity.y);
    out.push_back(static_cast<char>(p.owner));
    out.push_back(static_cast<char>(p.active));
    write_double(out, p.damage);
    write_double(out, p.gravity);
    write_int(out, p.age);
    write_int(out, p.lifetime);
    write_int(out, p.boomerang_after);
}

}  // namespace

const char* to_string(Winner w) {
    switch (w) {
        case Winner::player: return "player";
        case Winner::enemy: return "enemy";
        case Winner::timeout: return "timeout";
    }
    return "?";
}

const CharacterState& character(const GameState& s, Side side) {
    return side == Side::player ? s.player : s.enemy;
}

GameState initial_state(const StageLayout& stage, ArchetypePtr archetype, std::uint64_t seed, int tick_limit) {
    if (!archetype) throw ConfigError("match requires an enemy archetype");
    if (tick_limit < 1) throw ConfigError("tick_limit must be positive");

    GameState s;
    s.tick_limit = tick_limit;
    s.stage = stage;
    s.archetype = std::move(archetype);
    s.rng.seed(static_cast<EngineRng::result_type>(derive_seed(seed, Stream::engine) % EngineRng::modulus));

    const Vec2 player_foot{stage.spawn_player.x + jitter(s.rng, static_cast<int>(spawn_jitter)), stage.spawn_player.y};
    const Vec2 enemy_foot{stage.spawn_enemy.x + jitter(s.rng, static_cast<int>(spawn_jitter)), stage.spawn_enemy.y};

    s.player.body = Rect::standing_at(player_foot, player_size);
    s.player.facing = Facing::right;
    s.player.max_cooldown = player_shoot_cooldown;

    s.enemy.body = Rect::standing_at(enemy_foot, s.archetype->body_size);
    s.enemy.facing = Facing::left;
    s.enemy.max_cooldown = s.archetype->cooldown;
    s.enemy.immune = s.archetype->phase_at(0).immune;
    return s;
}

std::optional<Winner> is_terminal(const GameState& state, int tick_limit) {
    if (state.player.energy <= 0) return Winner::enemy;
    if (state.enemy.energy <= 0) return Winner::player;
    if (state.tick >= tick_limit) return Winner::timeout;
    return std::nullopt;
}

void resolve_hits_in_place(GameState& s) {
    for (auto& p : s.player_projectiles) {
        if (!p.active || !p.body.overlaps(s.enemy.body)) continue;
        p.active = false;
        if (!s.enemy.immune) s.enemy.energy = std::max(0.0, s.enemy.energy - p.damage);
    }
    for (auto& p : s.enemy_projectiles) {
        if (!p.active || !p.body.overlaps(s.player.body)) continue;
        p.active = false;
        s.player.energy = std::max(0.0, s.player.energy - p.damage);
    }
    if (s.player.contact_cooldown == 0 && s.player.body.overlaps(s.enemy.body)) {
        s.player.energy = std::max(0.0, s.player.energy - contact_damage);
        s.player.contact_cooldown = contact_recovery;
    }
}

GameState resolve_hits(GameState state) {
    resolve_hits_in_place(state);
    return state;
}

std::optional<Winner> advance(GameState& s, const ActionSet& player_actions, const ActionSet& enemy_actions) {
    if (is_terminal(s)) throw ContractViolation("match already terminal");
    if (player_actions.any_weapon()) throw ContractViolation("player actions may not set shootN");

    const EnemyArchetype& arch = *s.archetype;
    const PhaseSpec& phase = arch.phase_at(s.tick);
    const int start_shoot_cd[2] = {s.player.shoot_cooldown, s.enemy.shoot_cooldown};
    const int start_contact_cd = s.player.contact_cooldown;

    // Intent.
    const int player_dir = player_actions.horizontal_intent();
    const int enemy_dir = enemy_actions.horizontal_intent();
    apply_facing(s.player, player_dir);
    apply_facing(s.enemy, enemy_dir);
    s.enemy.immune = phase.immune;

    // Horizontal movement.
    s.player.velocity.x = player_dir * walk_speed;
    s.player.body = s.player.body.translated({s.player.velocity.x, 0});
    clamp_horizontal(s.player, s.stage.arena);

    s.enemy.velocity.x = 0;
    if (phase.movement == Movement::pursue) {
        s.enemy.velocity.x = enemy_dir * phase.speed;
        s.enemy.body = s.enemy.body.translated({s.enemy.velocity.x, 0});
    } else if (phase.movement == Movement::teleport && arch.phase_starts_at(s.tick)) {
        teleport_enemy(s);
    }
    clamp_horizontal(s.enemy, s.stage.arena);

    // Gravity, jump and release; then the vertical collision clamp.
    integrate_vertical(s.player, player_actions, gravity);
    integrate_vertical(s.enemy, enemy_actions, gravity * arch.gravity_scale);
    move_and_collide_vertical(s.player, s.stage);
    move_and_collide_vertical(s.enemy, s.stage);

    spawn_player_projectile(s, player_actions);
    spawn_enemy_projectiles(s, enemy_actions);

    move_projectiles(s.player_projectiles, s.stage.arena);
    move_projectiles(s.enemy_projectiles, s.stage.arena);

    resolve_hits_in_place(s);

    if (start_shoot_cd[0] > 0) --s.player.shoot_cooldown;
    if (start_shoot_cd[1] > 0) --s.enemy.shoot_cooldown;
    if (start_contact_cd > 0) --s.player.contact_cooldown;

    ++s.tick;
    return is_terminal(s);
}

TickOutcome step(GameState state, const ActionSet& player_actions, const ActionSet& enemy_actions) {
    auto terminal = advance(state, player_actions, enemy_actions);
    return {std::move(state), terminal};
}

int active_count(const GameState& s, Side owner) {
    int n = 0;
    if (owner == Side::player) {
        for (const auto& p : s.player_projectiles) n += p.active ? 1 : 0;
    } else {
        for (const auto& p : s.enemy_projectiles) n += p.active ? 1 : 0;
    }
    return n;
}

std::string serialize(const GameState& s) {
    std::string out;
    out.reserve(1024);
    write_int(out, s.tick);
    write_int(out, s.tick_limit);
    write_character(out, s.player);
    write_character(out, s.enemy);
    for (const auto& p : s.player_projectiles) write_projectile(out, p);
    for (const auto& p : s.enemy_projectiles) write_projectile(out, p);
    write_int(out, s.stage.id);
    write_int(out, s.archetype ? s.archetype->id : 0);
    std::ostringstream rng;
    rng << s.rng;
    out += rng.str();
    return out;
}

}  // namespace evoman::engine
