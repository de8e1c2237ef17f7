#pragma once

#include <cstdint>
#include <random>

namespace lectern {

// std::mt19937_64 output is bit-exact by the standard; the conversions below
// avoid std::uniform_*_distribution, whose results vary across library
// implementations. Everything seeded here reproduces identically everywhere.

inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const auto idx = static_cast<std::size_t>(uniform_unit(rng) * static_cast<double>(n));
  return idx < n ? idx : n - 1;
}

}  // namespace lectern
