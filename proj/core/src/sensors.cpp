#include "evoman/sensors.hpp"

#include <algorithm>
#include <sstream>

namespace evoman::sensors {
namespace {

using engine::arena_height;
using engine::arena_width;

double flag(bool b) { return b ? 1.0 : -1.0; }

struct Writer {
    SensorVector& out;
    std::size_t i = 0;
    void put(double v) { out[i++] = v; }
    void rect(const Rect& r) {
        put(normalize(r.min.x, 0, arena_width));
        put(normalize(r.min.y, 0, arena_height));
        put(normalize(r.max.x, 0, arena_width));
        put(normalize(r.max.y, 0, arena_height));
    }
    void projectile(const engine::Projectile& p) {
        if (!p.active) {
            for (int k = 0; k < 4; ++k) put(0.0);
            return;
        }
        rect(p.body);
    }
};

}  // namespace

double normalize(double value, double lo, double hi) {
    if (hi <= lo) return 0.0;
    return std::clamp(2.0 * (value - lo) / (hi - lo) - 1.0, -1.0, 1.0);
}

SensorVector sense(const engine::GameState& state, Side perspective) {
    const engine::CharacterState& self = engine::character(state, perspective);
    const engine::CharacterState& other = engine::character(state, opponent_of(perspective));
    const engine::CharacterState* pair[2] = {&self, &other};

    SensorVector out{};
    Writer w{out};
    for (const auto* c : pair) w.rect(c->body);
    for (const auto* c : pair) w.put(flag(c->on_surface));
    for (const auto* c : pair) w.put(normalize(c->shoot_cooldown, 0, std::max(1, c->max_cooldown)));
    for (const auto* c : pair) w.put(flag(c->shooting));
    for (const auto* c : pair) {
        w.put(normalize(c->velocity.x, -engine::max_horizontal_speed, engine::max_horizontal_speed));
        w.put(normalize(c->velocity.y, -engine::max_vertical_speed, engine::max_vertical_speed));
    }
    for (const auto* c : pair) w.put(c->facing == Facing::right ? 1.0 : -1.0);
    for (const auto* c : pair) w.put(flag(c->attacking));
    for (const auto& p : state.player_projectiles) w.projectile(p);
    for (const auto& p : state.enemy_projectiles) w.projectile(p);
    w.put(flag(state.enemy.immune));
    w.put(normalize(state.tick, 0, state.tick_limit));
    return out;
}

const std::array<std::string, sensor_count>& sensor_names() {
    static const std::array<std::string, sensor_count> names = [] {
        std::array<std::string, sensor_count> n;
        std::size_t i = 0;
        const char* who[2] = {"self", "opponent"};
        for (const char* c : who) {
            for (const char* k : {"left", "top", "right", "bottom"}) n[i++] = std::string(c) + ".rect." + k;
        }
        for (const char* c : who) n[i++] = std::string(c) + ".on_surface";
        for (const char* c : who) n[i++] = std::string(c) + ".shoot_timer";
        for (const char* c : who) n[i++] = std::string(c) + ".shooting";
        for (const char* c : who) {
            n[i++] = std::string(c) + ".velocity.x";
            n[i++] = std::string(c) + ".velocity.y";
        }
        for (const char* c : who) n[i++] = std::string(c) + ".facing";
        for (const char* c : who) n[i++] = std::string(c) + ".attacking";
        for (int p = 0; p < 3; ++p) {
            for (const char* k : {"left", "top", "right", "bottom"}) {
                n[i++] = "player_projectile[" + std::to_string(p) + "]." + k;
            }
        }
        for (int p = 0; p < 8; ++p) {
            for (const char* k : {"left", "top", "right", "bottom"}) {
                n[i++] = "enemy_projectile[" + std::to_string(p) + "]." + k;
            }
        }
        n[i++] = "enemy.immune";
        n[i++] = "tick";
        return n;
    }();
    return names;
}

std::string describe_table() {
    auto range_of = [](std::size_t idx) -> std::string {
        if (idx < 8 || (idx >= 22 && idx < 66)) {
            return "x: [0, 736] px, y: [0, 512] px (inactive projectile: 0)";
        }
        if (idx < 10 || (idx >= 12 && idx < 14) || (idx >= 20 && idx < 22) || idx == 66) return "false=-1, true=+1";
        if (idx < 12) return "[0, max cooldown] ticks";
        if (idx < 18) return "[-16, 16] px/tick";
        if (idx < 20) return "left=-1, right=+1";
        return "[0, tick_limit] ticks";
    };
    std::ostringstream os;
    os << "| index | group | sensor | raw range |\n|---|---|---|---|\n";
    for (const auto& g : groups) {
        for (std::size_t k = 0; k < g.size; ++k) {
            const std::size_t idx = g.offset + k;
            os << "| " << idx << " | " << g.name << " | " << sensor_names()[idx] << " | " << range_of(idx) << " |\n";
        }
    }
    return os.str();
}

}  // namespace evoman::sensors
