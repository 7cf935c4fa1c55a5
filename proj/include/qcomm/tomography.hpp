#pragma once

// Two-qubit polarization tomography: waveplate projectors, the canonical
// 16-setting scan, a Poisson data generator and iterative maximum-likelihood
// reconstruction.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "qcomm/quantum_state.hpp"

namespace qcomm::qstate {

// Light passes QWP(q), then HWP(h), then a horizontal polarizer. The detected
// state is U^dagger |H> with U = HWP(h) QWP(q), both plates with the fast axis
// at the given angle from horizontal.
Matrix2 half_wave_plate(double angle_deg);
Matrix2 quarter_wave_plate(double angle_deg);
Matrix2 projector_from_waveplates(double hwp_deg, double qwp_deg);

struct WaveplateSetting {
  double hwp1_deg = 0.0;
  double qwp1_deg = 0.0;
  double hwp2_deg = 0.0;
  double qwp2_deg = 0.0;

  friend bool operator==(const WaveplateSetting&, const WaveplateSetting&) = default;
};

// {0, 22.5} HWP x {0, 45} QWP on each arm.
std::array<WaveplateSetting, 16> canonical_settings();

// P1 (x) P2 for a setting.
Matrix setting_projector(const WaveplateSetting& s);

struct TomographyRecord {
  WaveplateSetting setting;
  std::uint64_t coincidences = 0;
  std::uint64_t n_ref = 1;
};

double expected_coincidences(const DensityMatrix& rho, const WaveplateSetting& s, double n_ref);

// Poisson-sampled counts for the canonical settings; deterministic per seed.
std::vector<TomographyRecord> simulate_tomography(const DensityMatrix& rho, std::uint64_t n_ref,
                                                  std::uint64_t seed);
// Expected counts rounded to the nearest integer, no sampling.
std::vector<TomographyRecord> noiseless_tomography(const DensityMatrix& rho, std::uint64_t n_ref);

struct MleOptions {
  int max_iterations = 10000;
  double tolerance = 1e-10;  // stop when the log-likelihood gain drops below
  bool keep_trace = false;
};

struct MleResult {
  DensityMatrix rho;
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
  double clipped_mass = 0.0;
  std::vector<double> likelihood_trace;  // per accepted iteration, if requested
};

// Multinomial log-likelihood sum_j n_j log(p_j / sum_k p_k).
double log_likelihood(const DensityMatrix& rho, std::span<const TomographyRecord> records);

// Diluted R-rho-R iteration. Requires each canonical setting exactly once.
MleResult mle_reconstruct(std::span<const TomographyRecord> records, const MleOptions& options = {});

nlohmann::json to_json(std::span<const TomographyRecord> records);
std::vector<TomographyRecord> records_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const nlohmann::json& j);

}  // namespace qcomm::qstate
