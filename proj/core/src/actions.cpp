#include "evoman/actions.hpp"

#include "evoman/errors.hpp"

namespace evoman {

const char* to_string(Side s) { return s == Side::player ? "player" : "enemy"; }

std::string ActionSet::encode() const {
    std::string out;
    out.reserve(5 + enemy_weapon_count);
    for (bool b : {left, right, jump, release, shoot}) out.push_back(b ? '1' : '0');
    for (bool b : shoot_n) out.push_back(b ? '1' : '0');
    return out;
}

ActionSet ActionSet::decode(std::string_view bits) {
    if (bits.size() != 5 + enemy_weapon_count) {
        throw ParseError("action record must have 11 bits, got '" + std::string(bits) + "'");
    }
    auto bit = [&](std::size_t i) {
        if (bits[i] != '0' && bits[i] != '1') {
            throw ParseError("action record contains non-binary digit: '" + std::string(bits) + "'");
        }
        return bits[i] == '1';
    };
    ActionSet a;
    a.left = bit(0);
    a.right = bit(1);
    a.jump = bit(2);
    a.release = bit(3);
    a.shoot = bit(4);
    for (std::size_t n = 0; n < enemy_weapon_count; ++n) a.shoot_n[n] = bit(5 + n);
    return a;
}

}  // namespace evoman
