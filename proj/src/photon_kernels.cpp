#include "photon_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qcomm/error.hpp"
#include "qcomm/random.hpp"

namespace qcomm::photon::detail {

namespace {

enum Substream : std::uint64_t { kPairs = 0, kDarkA = 1, kDarkB = 2, kHerald = 3 };

const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

std::uint64_t draw_pairs(const PulseTrainSpec& pulses, Rng& rng,
                         std::poisson_distribution<std::uint64_t>& poisson) {
  if (pulses.statistics == PairStatistics::Poisson) return pulses.mean_pairs_per_pulse > 0.0 ? poisson(rng) : 0;
  const double whole = std::floor(pulses.mean_pairs_per_pulse);
  const double frac = pulses.mean_pairs_per_pulse - whole;
  std::uint64_t n = static_cast<std::uint64_t>(whole);
  if (frac > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < frac) ++n;
  return n;
}

void add_dark_counts(std::vector<std::int64_t>& out, double rate_hz, std::int64_t start_ps,
                     std::int64_t end_ps, Rng rng) {
  if (rate_hz <= 0.0 || end_ps <= start_ps) return;
  const double expected = rate_hz * static_cast<double>(end_ps - start_ps) * 1e-12;
  const auto n = std::poisson_distribution<std::uint64_t>(expected)(rng);
  std::uniform_int_distribution<std::int64_t> when(start_ps, end_ps - 1);
  for (std::uint64_t k = 0; k < n; ++k) out.push_back(when(rng));
}

}  // namespace

void validate_inputs(const PulseTrainSpec& pulses, const std::array<double, 2>& transmissions,
                     const std::array<DetectorSpec, 2>& detectors) {
  pulses.validate();
  for (double t : transmissions) require(t >= 0.0 && t <= 1.0, "arm transmission must lie in [0, 1]");
  for (const auto& d : detectors) d.validate();
}

ShardTags simulate_shard(const PulseTrainSpec& pulses, const std::array<double, 2>& transmissions,
                         const std::array<DetectorSpec, 2>& detectors, std::uint64_t seed,
                         std::uint64_t shard) {
  const std::uint64_t first = shard * kShardPulses;
  const std::uint64_t last = std::min(pulses.n_pulses, first + kShardPulses);
  const double period_ps = pulses.period_ns * 1e3;

  Rng rng = make_rng(seed, shard, kPairs);
  std::poisson_distribution<std::uint64_t> poisson(
      pulses.mean_pairs_per_pulse > 0.0 ? pulses.mean_pairs_per_pulse : 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const std::array<double, 2> survive = {transmissions[0] * detectors[0].efficiency,
                                         transmissions[1] * detectors[1].efficiency};
  std::array<std::normal_distribution<double>, 2> jitter = {
      std::normal_distribution<double>(0.0, detectors[0].jitter_fwhm_ps / kFwhmPerSigma),
      std::normal_distribution<double>(0.0, detectors[1].jitter_fwhm_ps / kFwhmPerSigma)};

  ShardTags tags;
  std::array<std::vector<std::int64_t>*, 2> out = {&tags.a, &tags.b};
  for (std::uint64_t p = first; p < last; ++p) {
    const std::uint64_t n = draw_pairs(pulses, rng, poisson);
    const double t0 = static_cast<double>(p) * period_ps;
    for (std::uint64_t k = 0; k < n; ++k) {
      for (int arm = 0; arm < 2; ++arm) {
        if (uniform(rng) >= survive[arm]) continue;
        const double dt = detectors[arm].jitter_fwhm_ps > 0.0 ? jitter[arm](rng) : 0.0;
        out[arm]->push_back(std::llround(t0 + dt));
      }
    }
  }

  const auto start_ps = std::llround(static_cast<double>(first) * period_ps);
  const auto end_ps = std::llround(static_cast<double>(last) * period_ps);
  add_dark_counts(tags.a, detectors[0].dark_rate_hz, start_ps, end_ps, make_rng(seed, shard, kDarkA));
  add_dark_counts(tags.b, detectors[1].dark_rate_hz, start_ps, end_ps, make_rng(seed, shard, kDarkB));
  std::sort(tags.a.begin(), tags.a.end());
  std::sort(tags.b.begin(), tags.b.end());
  return tags;
}

std::vector<std::int64_t> finalize_channel(std::vector<std::int64_t> tags, double dead_time_ns) {
  // Shards are individually sorted; jitter can still interleave neighbours.
  if (!std::is_sorted(tags.begin(), tags.end())) std::sort(tags.begin(), tags.end());
  const auto dead_ps = std::max<std::int64_t>(1, std::llround(dead_time_ns * 1e3));
  std::size_t kept = 0;
  for (std::size_t k = 0; k < tags.size(); ++k) {
    if (kept == 0 || tags[k] - tags[kept - 1] >= dead_ps) tags[kept++] = tags[k];
  }
  tags.resize(kept);
  return tags;
}

HeraldedCounts heralded_shard(const PulseTrainSpec& pulses, const HeraldSetup& setup,
                              std::uint64_t seed, std::uint64_t shard) {
  const std::uint64_t first = shard * kShardPulses;
  const std::uint64_t last = std::min(pulses.n_pulses, first + kShardPulses);
  Rng rng = make_rng(seed, shard, kHerald);
  std::poisson_distribution<std::uint64_t> poisson(
      pulses.mean_pairs_per_pulse > 0.0 ? pulses.mean_pairs_per_pulse : 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  HeraldedCounts counts;
  for (std::uint64_t p = first; p < last; ++p) {
    const std::uint64_t n_signal = draw_pairs(pulses, rng, poisson);
    const std::uint64_t n_herald =
        setup.source == LightSource::Spdc ? n_signal : draw_pairs(pulses, rng, poisson);
    bool a = false, b = false, c = false;
    for (std::uint64_t k = 0; k < n_herald; ++k) a |= uniform(rng) < setup.herald_efficiency;
    for (std::uint64_t k = 0; k < n_signal; ++k) {
      const bool to_b = uniform(rng) < 0.5;
      const bool seen = uniform(rng) < setup.arm_efficiency;
      (to_b ? b : c) |= seen;
    }
    if (!a) continue;
    ++counts.n_a;
    counts.n_ab += b;
    counts.n_ac += c;
    counts.n_abc += b && c;
  }
  return counts;
}

}  // namespace qcomm::photon::detail
