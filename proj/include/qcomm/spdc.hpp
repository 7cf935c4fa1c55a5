#pragma once

// Deterministic SPDC pair-generation physics: energy conservation, quasi-phase
// matching, chi(2) tensor reduction and the effective nonlinearity.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qcomm::spdc {

struct WavelengthNm {
  double value = 0.0;
  double uncertainty = 0.0;

  // Throws ValidationError unless value > 0 and uncertainty >= 0.
  static WavelengthNm make(double value, double uncertainty = 0.0);
};

enum class SpdcType { Type0, TypeI, TypeII };
enum class Polarization { H, V };

std::string_view to_string(SpdcType type);
std::string_view to_string(Polarization p);
SpdcType parse_spdc_type(std::string_view name);
Polarization parse_polarization(std::string_view name);

struct PolarizationTriple {
  Polarization pump;
  Polarization signal;
  Polarization idler;
  friend bool operator==(const PolarizationTriple&, const PolarizationTriple&) = default;
};

// Contracted d-matrix, pm/V. Column zeta follows the Voigt-like map
// 11->1, 22->2, 33->3, 23/32->4, 13/31->5, 12/21->6.
using DMatrix = Eigen::Matrix<double, 3, 6>;

struct CrystalSpec {
  DMatrix d_contracted = DMatrix::Zero();
  double length_mm = 1.0;
  double poling_period_um = 1.0;
  double duty_cycle = 0.5;
  int qpm_order = 1;
  SpdcType spdc_type = SpdcType::Type0;

  void validate() const;
};

// Full second-order susceptibility chi_{abg}, pm/V, zero-based indices.
class SusceptibilityTensor {
 public:
  SusceptibilityTensor() { elements_.fill(0.0); }

  double& operator()(int a, int b, int g) { return elements_[index(a, b, g)]; }
  double operator()(int a, int b, int g) const { return elements_[index(a, b, g)]; }

  // First (a, b, g) whose last two indices are not interchangeable within tol.
  std::optional<std::array<int, 3>> first_asymmetry(double tol = 1e-12) const;
  bool is_kleinman_symmetric(double tol = 1e-12) const { return !first_asymmetry(tol); }

 private:
  static constexpr int index(int a, int b, int g) { return 9 * a + 3 * b + g; }
  std::array<double, 27> elements_;
};

struct PairAmplitude {
  double value = 0.0;
  double constant_c = 1.0;
};

// lambda_i = lambda_p * lambda_s / (lambda_s - lambda_p). Requires signal > pump.
WavelengthNm idler_wavelength(const WavelengthNm& pump, const WavelengthNm& signal);

// First-order propagation of the pump and signal uncertainties onto the idler.
double idler_uncertainty(const WavelengthNm& pump, const WavelengthNm& signal);

// delta_k - 2*pi*m/Lambda, in 1/um. Zero means quasi-phase-matched.
double qpm_residual(double delta_k_per_um, const CrystalSpec& crystal);

// Lambda = 2*pi*m / delta_k, in um.
double required_poling_period(double delta_k_per_um, int qpm_order);

// G_m = 2/(pi m) sin(pi m D) for a rectangular grating.
double fourier_coefficient(int qpm_order, double duty_cycle);

// C * d_eff * L * sinc(delta_k * L / 2) with sinc(x) = sin(x)/x. delta_k in 1/mm.
PairAmplitude pair_amplitude(double delta_k_per_mm, const CrystalSpec& crystal, double d_eff,
                             double constant_c = 1.0);

DMatrix reduce_tensor(const SusceptibilityTensor& full);
SusceptibilityTensor expand_tensor(const DMatrix& d);

// p^T d f(s, i), with f the contracted quadratic form of the signal and idler
// polarization unit vectors.
double effective_nonlinearity(const DMatrix& d, const Eigen::Vector3d& pump_dir,
                              const Eigen::Vector3d& signal_dir, const Eigen::Vector3d& idler_dir);

double conversion_efficiency(std::uint64_t n_pairs, std::uint64_t n_pump);

PolarizationTriple spdc_polarizations(SpdcType type, Polarization pump);
bool is_allowed(SpdcType type, const PolarizationTriple& triple);

// Phase mismatch from tabulated refractive indices.

struct IndexTable {
  // (wavelength nm, refractive index) sorted by wavelength; linear interpolation.
  std::vector<std::pair<double, double>> points;

  double at(double wavelength_nm) const;
};

struct CrystalPreset {
  std::string name;
  CrystalSpec crystal;
  std::map<Polarization, IndexTable> index;
};

// delta_k = 2 pi (n_p/lambda_p - n_s/lambda_s - n_i/lambda_i), 1/um, using the
// polarizations of the preset's SPDC type for the given pump polarization.
double phase_mismatch_per_um(const CrystalPreset& preset, Polarization pump_polarization,
                             double pump_nm, double signal_nm, double idler_nm);

std::map<std::string, CrystalPreset> load_crystal_presets(std::istream& in);
std::map<std::string, CrystalPreset> load_crystal_presets_file(const std::string& path);

struct TuningPoint {
  double lambda_p_nm;
  double lambda_s_nm;
  double lambda_i_nm;
  double d_lambda_i_nm;
};

std::vector<TuningPoint> tuning_curve(std::span<const WavelengthNm> pumps,
                                      std::span<const WavelengthNm> signals);
void write_tuning_csv(std::ostream& out, std::span<const TuningPoint> points);

}  // namespace qcomm::spdc
