#pragma once

#include <cstdint>
#include <random>

namespace fnl {

// SplitMix64 step; used to decorrelate seeds for derived streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

// Independent stream for task `index` under a common root seed. Work items
// always draw from their own stream, so results do not depend on the thread
// count or execution order.
inline Rng derive_stream(std::uint64_t root_seed, std::uint64_t index) {
  std::uint64_t s = root_seed;
  std::uint64_t a = splitmix64(s);
  s ^= index * 0xd1b54a32d192ed03ULL;
  std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace fnl
