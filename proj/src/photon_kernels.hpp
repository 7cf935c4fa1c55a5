#pragma once

// Per-shard kernels shared by the OpenMP and serial simulation drivers.

#include <cstdint>
#include <vector>

#include "qcomm/photon_stats.hpp"

namespace qcomm::photon::detail {

struct ShardTags {
  std::vector<std::int64_t> a;
  std::vector<std::int64_t> b;
};

inline std::uint64_t shard_count(std::uint64_t n_pulses) {
  return (n_pulses + kShardPulses - 1) / kShardPulses;
}

ShardTags simulate_shard(const PulseTrainSpec& pulses, const std::array<double, 2>& transmissions,
                         const std::array<DetectorSpec, 2>& detectors, std::uint64_t seed,
                         std::uint64_t shard);

// Sorts a channel and applies non-paralyzable dead time. Tags equal to the
// previously kept one are dropped as well, keeping the stream strictly increasing.
std::vector<std::int64_t> finalize_channel(std::vector<std::int64_t> tags, double dead_time_ns);

HeraldedCounts heralded_shard(const PulseTrainSpec& pulses, const HeraldSetup& setup,
                              std::uint64_t seed, std::uint64_t shard);

void validate_inputs(const PulseTrainSpec& pulses, const std::array<double, 2>& transmissions,
                     const std::array<DetectorSpec, 2>& detectors);

inline void add(HeraldedCounts& into, const HeraldedCounts& x) {
  into.n_a += x.n_a;
  into.n_ab += x.n_ab;
  into.n_ac += x.n_ac;
  into.n_abc += x.n_abc;
}

}  // namespace qcomm::photon::detail
