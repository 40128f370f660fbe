#include "evoman/archetype.hpp"

#include <numeric>

namespace evoman {

int EnemyArchetype::cycle_length() const {
    return std::accumulate(phases.begin(), phases.end(), 0,
                           [](int acc, const PhaseSpec& p) { return acc + p.duration; });
}

std::size_t EnemyArchetype::phase_index_at(int tick) const {
    int t = tick % cycle_length();
    for (std::size_t i = 0; i < phases.size(); ++i) {
        if (t < phases[i].duration) return i;
        t -= phases[i].duration;
    }
    return phases.size() - 1;
}

bool EnemyArchetype::phase_starts_at(int tick) const {
    int t = tick % cycle_length();
    for (const auto& p : phases) {
        if (t == 0) return true;
        if (t < p.duration) return false;
        t -= p.duration;
    }
    return false;
}

}  // namespace evoman
