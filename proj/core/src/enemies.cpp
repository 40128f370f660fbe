#include "evoman/enemies.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

#include "evoman/errors.hpp"

namespace evoman::enemies {

// Generated from core/data/archetypes.yaml at configure time.
extern const char* const embedded_archetype_yaml;

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
    const auto mark = node.Mark();
    throw ConfigError("archetype table line " + std::to_string(mark.line + 1) + ": " + what);
}

template <typename T>
T required(const YAML::Node& parent, const char* key) {
    const YAML::Node n = parent[key];
    if (!n) fail(parent, std::string("missing field '") + key + "'");
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail(n, std::string("field '") + key + "' has the wrong type");
    }
}

template <typename T>
T optional_field(const YAML::Node& parent, const char* key, T fallback) {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail(n, std::string("field '") + key + "' has the wrong type");
    }
}

Vec2 pair_field(const YAML::Node& parent, const char* key, std::optional<Vec2> fallback = std::nullopt) {
    const YAML::Node n = parent[key];
    if (!n) {
        if (fallback) return *fallback;
        fail(parent, std::string("missing field '") + key + "'");
    }
    if (!n.IsSequence() || n.size() != 2) fail(n, std::string("field '") + key + "' must be a pair");
    return {n[0].as<double>(), n[1].as<double>()};
}

std::array<bool, enemy_weapon_count> slot_set(const YAML::Node& parent, const char* key) {
    std::array<bool, enemy_weapon_count> out{};
    const YAML::Node n = parent[key];
    if (!n) return out;
    if (!n.IsSequence()) fail(n, std::string("field '") + key + "' must be a list of slots");
    for (const auto& item : n) {
        const int slot = item.as<int>();
        if (slot < 1 || slot > static_cast<int>(enemy_weapon_count)) fail(item, "weapon slot out of range 1-6");
        out[static_cast<std::size_t>(slot - 1)] = true;
    }
    return out;
}

Movement parse_movement(const YAML::Node& phase) {
    const auto text = optional_field<std::string>(phase, "movement", "hold");
    if (text == "hold") return Movement::hold;
    if (text == "pursue") return Movement::pursue;
    if (text == "teleport") return Movement::teleport;
    fail(phase["movement"], "unknown movement '" + text + "'");
}

EnemyArchetype parse_one(const YAML::Node& doc) {
    if (!doc.IsMap()) fail(doc, "archetype document must be a mapping");
    const int version = required<int>(doc, "format_version");
    if (version != archetype_format_version) {
        fail(doc, "unsupported format_version " + std::to_string(version));
    }

    EnemyArchetype a;
    a.id = required<int>(doc, "id");
    if (a.id < 1 || a.id > archetype_count) fail(doc, "archetype id must be in 1-8");
    a.name = required<std::string>(doc, "name");
    a.analog = optional_field<std::string>(doc, "analog", "");
    const YAML::Node body = doc["body"];
    if (!body) fail(doc, "missing field 'body'");
    a.body_size = {required<double>(body, "width"), required<double>(body, "height")};
    a.gravity_scale = optional_field<double>(doc, "gravity_scale", 1.0);
    a.cooldown = required<int>(doc, "cooldown");
    if (a.cooldown < 1) fail(doc, "cooldown must be at least 1 tick");
    a.primary_volley = slot_set(doc, "primary_volley");

    const YAML::Node weapons = doc["weapons"];
    if (!weapons || !weapons.IsSequence()) fail(doc, "missing weapons list");
    for (const auto& w : weapons) {
        const int slot = required<int>(w, "slot");
        if (slot < 1 || slot > static_cast<int>(enemy_weapon_count)) fail(w, "weapon slot out of range 1-6");
        ProjectileSpec spec;
        spec.offset = pair_field(w, "offset");
        spec.velocity = pair_field(w, "velocity");
        spec.size = pair_field(w, "size");
        spec.damage = required<double>(w, "damage");
        if (spec.damage <= engine::player_projectile_damage) {
            fail(w, "enemy projectiles must be stronger than the player's");
        }
        spec.gravity = optional_field<double>(w, "gravity", 0.0);
        spec.lifetime = optional_field<int>(w, "lifetime", 240);
        spec.boomerang_after = optional_field<int>(w, "boomerang_after", -1);
        spec.aimed = optional_field<bool>(w, "aimed", false);
        const auto anchor = optional_field<std::string>(w, "anchor", "self");
        if (anchor != "self" && anchor != "opponent") fail(w, "anchor must be self or opponent");
        spec.anchored_to_opponent = anchor == "opponent";
        auto& dst = a.weapons[static_cast<std::size_t>(slot - 1)];
        if (dst) fail(w, "duplicate weapon slot " + std::to_string(slot));
        dst = spec;
    }

    const YAML::Node phases = doc["phases"];
    if (!phases || !phases.IsSequence() || phases.size() == 0) fail(doc, "missing phases list");
    for (const auto& p : phases) {
        PhaseSpec phase;
        phase.name = required<std::string>(p, "name");
        phase.duration = required<int>(p, "duration");
        if (phase.duration < 1) fail(p, "phase duration must be at least 1 tick");
        phase.movement = parse_movement(p);
        phase.speed = optional_field<double>(p, "speed", 0.0);
        if (phase.speed < 0 || phase.speed > engine::max_horizontal_speed) fail(p, "phase speed out of range");
        phase.jump = optional_field<bool>(p, "jump", false);
        phase.immune = optional_field<bool>(p, "immune", false);
        phase.weapons = slot_set(p, "weapons");
        for (std::size_t n = 0; n < enemy_weapon_count; ++n) {
            if (phase.weapons[n] && !a.weapons[n]) fail(p, "phase fires undefined weapon slot " + std::to_string(n + 1));
        }
        a.phases.push_back(std::move(phase));
    }
    bool attacks = false;
    for (const auto& p : a.phases) attacks = attacks || p.attacks();
    if (!attacks) fail(doc, "at least one phase must attack");
    for (std::size_t n = 0; n < enemy_weapon_count; ++n) {
        if (a.primary_volley[n] && !a.weapons[n]) fail(doc, "primary_volley names undefined weapon slot");
    }
    return a;
}

}  // namespace

std::vector<EnemyArchetype> parse_archetypes(std::string_view yaml_text) {
    std::vector<YAML::Node> docs;
    try {
        docs = YAML::LoadAll(std::string(yaml_text));
    } catch (const YAML::ParserException& e) {
        throw ParseError("archetype table line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    std::vector<EnemyArchetype> out;
    for (const auto& doc : docs) {
        if (doc.IsNull()) continue;
        out.push_back(parse_one(doc));
    }
    return out;
}

std::vector<EnemyArchetype> load_archetypes(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open archetype table " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_archetypes(buf.str());
}

std::string_view builtin_archetype_document() { return embedded_archetype_yaml; }

const std::vector<ArchetypePtr>& builtin_archetypes() {
    static const std::vector<ArchetypePtr> table = [] {
        std::vector<ArchetypePtr> out(archetype_count);
        for (auto& a : parse_archetypes(builtin_archetype_document())) {
            auto& slot = out[static_cast<std::size_t>(a.id - 1)];
            if (slot) throw ConfigError("duplicate archetype id " + std::to_string(a.id));
            slot = std::make_shared<const EnemyArchetype>(std::move(a));
        }
        for (const auto& a : out) {
            if (!a) throw ConfigError("built-in archetype table is incomplete");
        }
        return out;
    }();
    return table;
}

ArchetypePtr builtin_archetype(int id) {
    if (id < 1 || id > archetype_count) {
        throw ConfigError("unknown enemy archetype " + std::to_string(id) + " (expected 1-8)");
    }
    return builtin_archetypes()[static_cast<std::size_t>(id - 1)];
}

ActionSet enemy_policy(const engine::GameState& state, const EnemyArchetype& archetype) {
    const PhaseSpec& phase = archetype.phase_at(state.tick);
    ActionSet out;
    const double dx = state.player.body.center().x - state.enemy.body.center().x;
    const bool face_left = dx < 0 || (dx == 0 && state.enemy.facing == Facing::left);
    out.left = face_left;
    out.right = !face_left;
    out.jump = phase.jump;
    out.shoot_n = phase.weapons;
    return out;
}

ActionSet enemy_policy(const engine::GameState& state, int archetype_id) {
    return enemy_policy(state, *builtin_archetype(archetype_id));
}

}  // namespace evoman::enemies
