#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "evoman/actions.hpp"
#include "evoman/archetype.hpp"
#include "evoman/engine.hpp"

namespace evoman::enemies {

inline constexpr int archetype_count = 8;
inline constexpr int archetype_format_version = 1;

/// Parses a multi-document archetype table. Validates every document; throws ConfigError
/// (with the offending line) or ParseError.
std::vector<EnemyArchetype> parse_archetypes(std::string_view yaml_text);
std::vector<EnemyArchetype> load_archetypes(const std::filesystem::path& file);

/// The table compiled into the library (core/data/archetypes.yaml).
std::string_view builtin_archetype_document();
const std::vector<ArchetypePtr>& builtin_archetypes();
/// Throws ConfigError for ids outside [1, 8].
ArchetypePtr builtin_archetype(int id);

/// Rule-based Static Enemy controller: a pure function of the tick (through the cyclic
/// phase machine) and the player's position relative to the enemy.
ActionSet enemy_policy(const engine::GameState& state, const EnemyArchetype& archetype);
/// Looks the archetype up in the built-in table; unknown ids raise ConfigError.
ActionSet enemy_policy(const engine::GameState& state, int archetype_id);

}  // namespace evoman::enemies
