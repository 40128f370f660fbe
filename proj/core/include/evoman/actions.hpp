#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace evoman {

enum class Side : unsigned char { player, enemy };

constexpr Side opponent_of(Side s) { return s == Side::player ? Side::enemy : Side::player; }
const char* to_string(Side s);

enum class Facing : signed char { left = -1, right = 1 };

inline constexpr std::size_t enemy_weapon_count = 6;

/// Buttons pressed during one tick. Player sets only the five basic actions; shoot1..shoot6
/// select individual enemy weapons.
struct ActionSet {
    bool left = false;
    bool right = false;
    bool jump = false;
    bool release = false;
    bool shoot = false;
    std::array<bool, enemy_weapon_count> shoot_n{};

    bool any_weapon() const {
        for (bool b : shoot_n) {
            if (b) return true;
        }
        return false;
    }

    /// -1, 0 or +1. Opposing directions cancel.
    int horizontal_intent() const { return (right ? 1 : 0) - (left ? 1 : 0); }

    /// 11-character bit string: left right jump release shoot shoot1..shoot6.
    std::string encode() const;
    static ActionSet decode(std::string_view bits);

    friend bool operator==(const ActionSet&, const ActionSet&) = default;
};

}  // namespace evoman
