#include <cmath>
#include <random>
#include <sstream>

#include "qcomm/error.hpp"
#include "qcomm/photon_stats.hpp"
#include "qcomm/random.hpp"

namespace qcomm::photon {

void DetectorSpec::validate() const {
  require(efficiency >= 0.0 && efficiency <= 1.0, "detector efficiency must lie in [0, 1]");
  require(dark_rate_hz >= 0.0, "dark count rate must be non-negative");
  require(jitter_fwhm_ps >= 0.0, "timing jitter must be non-negative");
  require(dead_time_ns >= 0.0, "dead time must be non-negative");
}

void PulseTrainSpec::validate() const {
  require(period_ns > 0.0, "pulse period must be positive");
  require(mean_pairs_per_pulse >= 0.0 && std::isfinite(mean_pairs_per_pulse),
          "mean pairs per pulse must be non-negative");
  require(n_pulses > 0, "pulse count must be positive");
}

void HeraldSetup::validate() const {
  require(herald_efficiency >= 0.0 && herald_efficiency <= 1.0,
          "herald efficiency must lie in [0, 1]");
  require(arm_efficiency >= 0.0 && arm_efficiency <= 1.0, "arm efficiency must lie in [0, 1]");
}

CoincidenceHistogram make_histogram(std::int64_t bin_width_ps, std::int64_t window_ps) {
  require(bin_width_ps > 0, "bin width must be positive");
  require(window_ps >= 0, "coincidence window must be non-negative");
  CoincidenceHistogram h;
  h.bin_width_ps = bin_width_ps;
  h.t_min_ps = -window_ps;
  const std::int64_t span = 2 * window_ps + 1;
  const std::int64_t bins = (span + bin_width_ps - 1) / bin_width_ps;
  h.t_max_ps = h.t_min_ps + bins * bin_width_ps;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  return h;
}

std::uint64_t CoincidenceHistogram::total() const {
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

std::uint64_t CoincidenceHistogram::area(double center_ps, double half_width_ps) const {
  std::uint64_t sum = 0;
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (std::abs(bin_center(k) - center_ps) <= half_width_ps) sum += counts[k];
  return sum;
}

double heralded_g2(const HeraldedCounts& c) {
  require(c.n_ab > 0 && c.n_ac > 0, "heralded g2 needs N_AB > 0 and N_AC > 0");
  return static_cast<double>(c.n_abc) * static_cast<double>(c.n_a) /
         (static_cast<double>(c.n_ab) * static_cast<double>(c.n_ac));
}

KlyshkoCounts simulate_pair_thinning(std::uint64_t n_pairs, double eta_s, double eta_i,
                                     std::uint64_t seed) {
  require(eta_s >= 0.0 && eta_s <= 1.0 && eta_i >= 0.0 && eta_i <= 1.0,
          "efficiencies must lie in [0, 1]");
  Rng rng = make_rng(seed);
  std::bernoulli_distribution signal(eta_s), idler(eta_i);
  KlyshkoCounts c;
  for (std::uint64_t k = 0; k < n_pairs; ++k) {
    const bool s = signal(rng);
    const bool i = idler(rng);
    c.n_s += s;
    c.n_i += i;
    c.n_c += s && i;
  }
  return c;
}

Efficiencies klyshko_calibrate(std::uint64_t n_s, std::uint64_t n_i, std::uint64_t n_c) {
  require(n_s > 0 && n_i > 0, "singles counts must be positive");
  if (n_c > std::min(n_s, n_i)) {
    std::ostringstream msg;
    msg << "coincidences (" << n_c << ") exceed singles (" << n_s << ", " << n_i << ")";
    throw ValidationError(msg.str());
  }
  return {static_cast<double>(n_c) / static_cast<double>(n_i),
          static_cast<double>(n_c) / static_cast<double>(n_s)};
}

PeakAreas predict_peak_areas(const PulseTrainSpec& pulses, std::array<double, 2> eta_pair) {
  pulses.validate();
  require(pulses.mean_pairs_per_pulse <= 0.2,
          "peak-area prediction is first order in mu; mu must be <= 0.2");
  for (double e : eta_pair) require(e >= 0.0 && e <= 1.0, "efficiencies must lie in [0, 1]");
  const double n = static_cast<double>(pulses.n_pulses);
  const double mu = pulses.mean_pairs_per_pulse;
  return {n * mu * eta_pair[0] * eta_pair[1], n * (mu * eta_pair[0]) * (mu * eta_pair[1])};
}

std::uint64_t sample_conversions(std::uint64_t n_trials, double probability, std::uint64_t seed) {
  require(probability >= 0.0 && probability <= 1.0, "probability must lie in [0, 1]");
  Rng rng = make_rng(seed);
  return std::binomial_distribution<std::uint64_t>(n_trials, probability)(rng);
}

}  // namespace qcomm::photon
