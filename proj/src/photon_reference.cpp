#include <algorithm>

#include "photon_kernels.hpp"
#include "qcomm/error.hpp"
#include "qcomm/photon_stats.hpp"

namespace qcomm::photon::reference {

StreamPair simulate_streams(const PulseTrainSpec& pulses, std::array<double, 2> arm_transmissions,
                            const std::array<DetectorSpec, 2>& detectors, std::uint64_t seed) {
  detail::validate_inputs(pulses, arm_transmissions, detectors);
  std::vector<std::int64_t> a, b;
  for (std::uint64_t s = 0; s < detail::shard_count(pulses.n_pulses); ++s) {
    auto tags = detail::simulate_shard(pulses, arm_transmissions, detectors, seed, s);
    a.insert(a.end(), tags.a.begin(), tags.a.end());
    b.insert(b.end(), tags.b.begin(), tags.b.end());
  }
  StreamPair out;
  out.a = {0, detail::finalize_channel(std::move(a), detectors[0].dead_time_ns)};
  out.b = {1, detail::finalize_channel(std::move(b), detectors[1].dead_time_ns)};
  return out;
}

CoincidenceHistogram build_histogram(const TimeTagStream& a, const TimeTagStream& b,
                                     std::int64_t bin_width_ps, std::int64_t window_ps) {
  CoincidenceHistogram h = make_histogram(bin_width_ps, window_ps);
  const auto& ta = a.timestamps_ps;
  const auto& tb = b.timestamps_ps;
  require(std::is_sorted(ta.begin(), ta.end()) && std::is_sorted(tb.begin(), tb.end()),
          "time-tag streams must be sorted");
  std::size_t lo = 0;
  for (const std::int64_t t : ta) {
    while (lo < tb.size() && tb[lo] < t - window_ps) ++lo;
    for (std::size_t j = lo; j < tb.size() && tb[j] <= t + window_ps; ++j)
      ++h.counts[static_cast<std::size_t>((tb[j] - t + window_ps) / bin_width_ps)];
  }
  return h;
}

HeraldedCounts simulate_heralded_counts(const PulseTrainSpec& pulses, const HeraldSetup& setup,
                                        std::uint64_t seed) {
  pulses.validate();
  setup.validate();
  HeraldedCounts total;
  for (std::uint64_t s = 0; s < detail::shard_count(pulses.n_pulses); ++s)
    detail::add(total, detail::heralded_shard(pulses, setup, seed, s));
  return total;
}

}  // namespace qcomm::photon::reference
