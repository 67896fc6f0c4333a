#include "jdac/rng.hpp"

namespace jdac {

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

} // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::string_view tag) {
    const std::uint64_t t = fnv1a(tag);
    std::seed_seq seq{lo(seed), hi(seed), lo(t), hi(t)};
    return std::mt19937_64(seq);
}

} // namespace jdac
