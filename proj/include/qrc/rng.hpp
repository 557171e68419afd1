#pragma once

// Named, reproducible random streams. Every stochastic draw in the library
// takes an engine built from (master seed, stream name, index) so results do
// not depend on scheduling order or worker count.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace qrc {

using Engine = std::mt19937_64;

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0);

inline Engine make_engine(std::uint64_t master, std::string_view stream, std::uint64_t index = 0) {
  return Engine(derive_seed(master, stream, index));
}

/// i.i.d. Uniform[0,1] inputs.
std::vector<double> draw_inputs(std::size_t count, std::uint64_t seed);

/// 64-bit FNV-1a, used for config hashes.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace qrc
