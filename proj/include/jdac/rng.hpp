#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace jdac {

/// Private PRNG stream for one (seed, operation) pair. Two operations
/// sharing a seed still draw independent sequences.
std::mt19937_64 make_stream(std::uint64_t seed, std::string_view tag);

} // namespace jdac
