#include <algorithm>
#include <vector>

#include <omp.h>

#include "photon_kernels.hpp"
#include "qcomm/error.hpp"
#include "qcomm/photon_stats.hpp"

namespace qcomm::photon {

StreamPair simulate_streams(const PulseTrainSpec& pulses, std::array<double, 2> arm_transmissions,
                            const std::array<DetectorSpec, 2>& detectors, std::uint64_t seed) {
  detail::validate_inputs(pulses, arm_transmissions, detectors);
  const auto n_shards = static_cast<std::int64_t>(detail::shard_count(pulses.n_pulses));
  std::vector<detail::ShardTags> shards(n_shards);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t s = 0; s < n_shards; ++s)
    shards[s] = detail::simulate_shard(pulses, arm_transmissions, detectors, seed, s);

  std::size_t na = 0, nb = 0;
  for (const auto& s : shards) {
    na += s.a.size();
    nb += s.b.size();
  }
  std::vector<std::int64_t> a, b;
  a.reserve(na);
  b.reserve(nb);
  for (auto& s : shards) {
    a.insert(a.end(), s.a.begin(), s.a.end());
    b.insert(b.end(), s.b.begin(), s.b.end());
  }

  StreamPair out;
  out.a.channel = 0;
  out.b.channel = 1;
#pragma omp parallel sections
  {
#pragma omp section
    out.a.timestamps_ps = detail::finalize_channel(std::move(a), detectors[0].dead_time_ns);
#pragma omp section
    out.b.timestamps_ps = detail::finalize_channel(std::move(b), detectors[1].dead_time_ns);
  }
  return out;
}

CoincidenceHistogram build_histogram(const TimeTagStream& a, const TimeTagStream& b,
                                     std::int64_t bin_width_ps, std::int64_t window_ps) {
  CoincidenceHistogram h = make_histogram(bin_width_ps, window_ps);
  const auto& ta = a.timestamps_ps;
  const auto& tb = b.timestamps_ps;
  require(std::is_sorted(ta.begin(), ta.end()) && std::is_sorted(tb.begin(), tb.end()),
          "time-tag streams must be sorted");
  const auto n = static_cast<std::int64_t>(ta.size());
  const std::size_t bins = h.bins();

#pragma omp parallel
  {
    std::vector<std::uint64_t> local(bins, 0);
    const int threads = omp_get_num_threads();
    const int me = omp_get_thread_num();
    const std::int64_t begin = n * me / threads;
    const std::int64_t end = n * (me + 1) / threads;
    if (begin < end) {
      // Two-pointer sweep over this thread's slice of stream a.
      auto lo = std::lower_bound(tb.begin(), tb.end(), ta[begin] - window_ps);
      for (std::int64_t i = begin; i < end; ++i) {
        const std::int64_t t = ta[i];
        while (lo != tb.end() && *lo < t - window_ps) ++lo;
        for (auto it = lo; it != tb.end() && *it <= t + window_ps; ++it)
          ++local[static_cast<std::size_t>((*it - t + window_ps) / bin_width_ps)];
      }
    }
#pragma omp critical
    for (std::size_t k = 0; k < bins; ++k) h.counts[k] += local[k];
  }
  return h;
}

HeraldedCounts simulate_heralded_counts(const PulseTrainSpec& pulses, const HeraldSetup& setup,
                                        std::uint64_t seed) {
  pulses.validate();
  setup.validate();
  const auto n_shards = static_cast<std::int64_t>(detail::shard_count(pulses.n_pulses));
  std::vector<HeraldedCounts> partial(n_shards);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t s = 0; s < n_shards; ++s)
    partial[s] = detail::heralded_shard(pulses, setup, seed, s);
  HeraldedCounts total;
  for (const auto& p : partial) detail::add(total, p);
  return total;
}

}  // namespace qcomm::photon
