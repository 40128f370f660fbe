#include "evoman/rng.hpp"

#include <array>
#include <sstream>

#include "evoman/errors.hpp"

namespace evoman {

std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(salt),
                      static_cast<std::uint32_t>(salt >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::string save_rng(const Rng& rng) {
    std::ostringstream os;
    os << rng;
    return os.str();
}

Rng load_rng(const std::string& text) {
    std::istringstream is(text);
    Rng rng;
    is >> rng;
    if (!is) {
        throw ParseError("corrupt generator state");
    }
    return rng;
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace evoman
