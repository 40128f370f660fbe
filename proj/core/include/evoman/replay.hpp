#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "evoman/actions.hpp"

namespace evoman::replay {

inline constexpr int replay_format_version = 1;

/// Everything needed to re-simulate a match: the engine is the decoder.
///
/// File layout (text, one item per line):
///
///     # evoman-replay config_hash=<16 hex> master_seed=<n>
///     format_version 1
///     stage <id>
///     archetype <id>
///     archetype_table <16 hex>
///     seed <engine seed>
///     tick_limit <ticks>
///     ticks <N>
///     <player 11 bits> <enemy 11 bits>     (N lines)
///     end
///
/// Bits are left right jump release shoot shoot1..shoot6.
struct ReplayLog {
    int stage_id = 1;
    int archetype_id = 1;
    std::uint64_t seed = 0;
    int tick_limit = 3000;
    /// Hash of the archetype table the match was played with; 0 skips the check.
    std::uint64_t archetype_table_hash = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t master_seed = 0;
    std::vector<std::pair<ActionSet, ActionSet>> ticks;

    friend bool operator==(const ReplayLog&, const ReplayLog&) = default;
};

void write(std::ostream& out, const ReplayLog& log);
/// Throws ParseError on truncation, malformed records or an unsupported format_version.
ReplayLog read(std::istream& in);

void save(const std::filesystem::path& file, const ReplayLog& log);
ReplayLog load(const std::filesystem::path& file);

std::string hex64(std::uint64_t v);

}  // namespace evoman::replay
