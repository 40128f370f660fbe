#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "evoman/actions.hpp"
#include "evoman/engine.hpp"

namespace evoman::sensors {

inline constexpr std::size_t sensor_count = 68;

/// The eleven observation groups, in vector order.
struct SensorGroup {
    std::string_view name;
    std::size_t offset;
    std::size_t size;
};

inline constexpr std::array<SensorGroup, 11> groups{{
    {"character rectangles", 0, 8},
    {"on-surface flags", 8, 2},
    {"shoot timers", 10, 2},
    {"shooting flags", 12, 2},
    {"accelerations", 14, 4},
    {"facing directions", 18, 2},
    {"attacking flags", 20, 2},
    {"player projectile rectangles", 22, 12},
    {"enemy projectile rectangles", 34, 32},
    {"enemy immunity flag", 66, 1},
    {"time-step counter", 67, 1},
}};

using SensorVector = std::array<double, sensor_count>;

/// Observation of `state` from one character's point of view, every value in [-1, 1].
/// Per-character groups list the observer first; projectile groups keep the absolute
/// player/enemy layout.
SensorVector sense(const engine::GameState& state, Side perspective);

/// Name of every index for the player perspective ("self" is the player).
const std::array<std::string, sensor_count>& sensor_names();

/// Markdown table "index | group | name | raw range".
std::string describe_table();

/// Linear map of [lo, hi] onto [-1, 1], clamped.
double normalize(double value, double lo, double hi);

}  // namespace evoman::sensors
