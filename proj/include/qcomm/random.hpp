#pragma once

#include <cstdint>
#include <random>

namespace qcomm {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive independent engine seeds from a user
// seed plus stream coordinates, so parallel shards never share a sequence.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t substream = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ (substream * 0xd1b54a32d192ed03ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0) {
  return Rng(derive_seed(seed, stream, substream));
}

}  // namespace qcomm
