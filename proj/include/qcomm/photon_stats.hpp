#pragma once

// Pulsed SPDC source + lossy detectors as time-tag streams, and the
// coincidence statistics derived from them.
//
// The simulation kernels come in two flavours: the default OpenMP versions
// and the serial ones in `reference::`. Both walk the same fixed-size pulse
// shards with the same per-shard seeds, so their outputs are identical for any
// thread count. The reference versions exist for tests and the benchmark.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace qcomm::photon {

struct DetectorSpec {
  double efficiency = 1.0;     // [0, 1]
  double dark_rate_hz = 0.0;   // >= 0
  double jitter_fwhm_ps = 0.0; // >= 0
  double dead_time_ns = 0.0;   // >= 0

  void validate() const;
};

enum class PairStatistics {
  Poisson,
  // floor(mu) pairs plus one more with probability frac(mu). Debug aid: with
  // integer mu every pulse carries exactly mu pairs.
  Fixed,
};

struct PulseTrainSpec {
  double period_ns = 12.5;
  double mean_pairs_per_pulse = 0.0;
  std::uint64_t n_pulses = 1;
  PairStatistics statistics = PairStatistics::Poisson;

  void validate() const;
  // mu >= 1 is allowed but far from the single-pair regime.
  bool above_recommended() const { return mean_pairs_per_pulse >= 1.0; }
};

struct TimeTagStream {
  int channel = 0;
  std::vector<std::int64_t> timestamps_ps;  // strictly increasing
};

struct StreamPair {
  TimeTagStream a;
  TimeTagStream b;
};

// Pulses per shard. Fixed so results do not depend on the worker count.
inline constexpr std::uint64_t kShardPulses = 1u << 16;

StreamPair simulate_streams(const PulseTrainSpec& pulses, std::array<double, 2> arm_transmissions,
                            const std::array<DetectorSpec, 2>& detectors, std::uint64_t seed);

struct CoincidenceHistogram {
  std::int64_t bin_width_ps = 1;
  std::int64_t t_min_ps = 0;
  std::int64_t t_max_ps = 0;
  std::vector<std::uint64_t> counts;

  std::size_t bins() const { return counts.size(); }
  double bin_center(std::size_t k) const {
    return static_cast<double>(t_min_ps) + (static_cast<double>(k) + 0.5) * bin_width_ps;
  }
  std::uint64_t total() const;
  // Sum of counts in bins whose centers lie in [center - half_width, center + half_width].
  std::uint64_t area(double center_ps, double half_width_ps) const;
};

// Histogram of all pairwise t_b - t_a with |t_b - t_a| <= window. Bins are
// half-open, starting at -window.
CoincidenceHistogram build_histogram(const TimeTagStream& a, const TimeTagStream& b,
                                     std::int64_t bin_width_ps, std::int64_t window_ps);

// Empty histogram with the same binning build_histogram would use.
CoincidenceHistogram make_histogram(std::int64_t bin_width_ps, std::int64_t window_ps);

// Three-detector heralded measurement: herald A on the idler arm, the signal
// arm split 50:50 onto B and C. Counts are per pulse (threshold detectors).
struct HeraldedCounts {
  std::uint64_t n_a = 0;
  std::uint64_t n_ab = 0;
  std::uint64_t n_ac = 0;
  std::uint64_t n_abc = 0;
};

enum class LightSource {
  Spdc,      // herald and signal photons come in pairs
  Coherent,  // herald and signal arms carry independent Poisson light
};

struct HeraldSetup {
  double herald_efficiency = 1.0;  // arm A, transmission x detector
  double arm_efficiency = 1.0;     // B and C each, after the splitter
  LightSource source = LightSource::Spdc;

  void validate() const;
};

HeraldedCounts simulate_heralded_counts(const PulseTrainSpec& pulses, const HeraldSetup& setup,
                                        std::uint64_t seed);

// g2(0) = N_ABC N_A / (N_AB N_AC).
double heralded_g2(const HeraldedCounts& counts);

struct KlyshkoCounts {
  std::uint64_t n_s = 0;
  std::uint64_t n_i = 0;
  std::uint64_t n_c = 0;
};

// Each of n_pairs pairs independently thinned by eta_s and eta_i.
KlyshkoCounts simulate_pair_thinning(std::uint64_t n_pairs, double eta_s, double eta_i,
                                     std::uint64_t seed);

struct Efficiencies {
  double signal = 0.0;
  double idler = 0.0;
};

// eta_s = N_c / N_i, eta_i = N_c / N_s.
Efficiencies klyshko_calibrate(std::uint64_t n_s, std::uint64_t n_i, std::uint64_t n_c);

struct PeakAreas {
  double proper = 0.0;
  double accidental = 0.0;  // per side peak
};

PeakAreas predict_peak_areas(const PulseTrainSpec& pulses, std::array<double, 2> eta_pair);

// Number of successes in n_trials Bernoulli(p) draws.
std::uint64_t sample_conversions(std::uint64_t n_trials, double probability, std::uint64_t seed);

namespace reference {

StreamPair simulate_streams(const PulseTrainSpec& pulses, std::array<double, 2> arm_transmissions,
                            const std::array<DetectorSpec, 2>& detectors, std::uint64_t seed);

CoincidenceHistogram build_histogram(const TimeTagStream& a, const TimeTagStream& b,
                                     std::int64_t bin_width_ps, std::int64_t window_ps);

HeraldedCounts simulate_heralded_counts(const PulseTrainSpec& pulses, const HeraldSetup& setup,
                                        std::uint64_t seed);

}  // namespace reference

}  // namespace qcomm::photon
