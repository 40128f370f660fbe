#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace evoman {

using Rng = std::mt19937_64;

/// Independent named streams derived from one master seed.
enum class Stream : std::uint32_t {
    engine = 1,
    mutation = 2,
    opponent_sampling = 3,
    match = 4,
    controller = 5,
};

/// Derives a 64-bit seed for `stream` from the master seed. `salt` separates sub-streams
/// (per enemy id, per generation, ...).
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t salt = 0);

inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t salt = 0) {
    return Rng{derive_seed(master, stream, salt)};
}

std::string save_rng(const Rng& rng);
Rng load_rng(const std::string& text);

/// FNV-1a, used for config provenance hashes and fingerprints. Stable across platforms.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace evoman
