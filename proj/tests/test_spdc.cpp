#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qcomm/error.hpp"
#include "qcomm/photon_stats.hpp"
#include "qcomm/spdc.hpp"

namespace {

using namespace qcomm::spdc;
constexpr double kPi = std::numbers::pi;

WavelengthNm wl(double v, double u = 0.0) { return WavelengthNm::make(v, u); }

// Straight 27-term contraction over the full tensor.
double brute_force_deff(const SusceptibilityTensor& chi, const Eigen::Vector3d& p,
                        const Eigen::Vector3d& s, const Eigen::Vector3d& i) {
  double sum = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int g = 0; g < 3; ++g) sum += chi(a, b, g) * p[a] * s[b] * i[g];
  return sum;
}

SusceptibilityTensor random_symmetric(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  SusceptibilityTensor chi;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int g = b; g < 3; ++g) chi(a, b, g) = chi(a, g, b) = u(rng);
  return chi;
}

Eigen::Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Vector3d v(n(rng), n(rng), n(rng));
  return v.normalized();
}

TEST(IdlerWavelength, DesignPointNear1550) {
  const auto i = idler_wavelength(wl(396.1), wl(532.0));
  EXPECT_NEAR(i.value, 396.1 * 532.0 / (532.0 - 396.1), 1e-9);
  EXPECT_GT(i.value, 1550.0);
  EXPECT_LT(i.value, 1551.0);
  EXPECT_EQ(i.uncertainty, 0.0);
}

TEST(IdlerWavelength, DegeneratePoint) {
  for (double p : {300.0, 405.0, 775.0}) EXPECT_NEAR(idler_wavelength(wl(p), wl(2 * p)).value, 2 * p, 1e-9);
}

TEST(IdlerWavelength, InvolutionAndEnergyConservation) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pump(250.0, 1000.0), ratio(1.01, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const double p = pump(rng);
    const double s = p * ratio(rng);
    const double i = idler_wavelength(wl(p), wl(s)).value;
    EXPECT_NEAR(idler_wavelength(wl(p), wl(i)).value / s, 1.0, 1e-9);
    EXPECT_NEAR((1.0 / s + 1.0 / i) * p, 1.0, 1e-12);
  }
}

TEST(IdlerWavelength, RejectsNonPhysicalInput) {
  EXPECT_THROW(idler_wavelength(wl(532.0), wl(532.0)), qcomm::ValidationError);
  EXPECT_THROW(idler_wavelength(wl(532.0), wl(396.1)), qcomm::ValidationError);
  try {
    idler_wavelength(wl(532.0), wl(500.0));
    FAIL();
  } catch (const qcomm::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("non-physical"), std::string::npos);
  }
  EXPECT_THROW(WavelengthNm::make(-1.0), qcomm::ValidationError);
  EXPECT_THROW(WavelengthNm::make(500.0, -0.1), qcomm::ValidationError);
}

TEST(IdlerUncertainty, ZeroInputsGiveZero) {
  EXPECT_EQ(idler_uncertainty(wl(396.1), wl(532.0)), 0.0);
}

TEST(IdlerUncertainty, MatchesFiniteDifferencePropagation) {
  const double p = 396.1, s = 532.0, dp = 0.1, ds = 0.1, h = 1e-4;
  auto f = [](double a, double b) { return idler_wavelength(wl(a), wl(b)).value; };
  const double dfdp = (f(p + h, s) - f(p - h, s)) / (2 * h);
  const double dfds = (f(p, s + h) - f(p, s - h)) / (2 * h);
  const double oracle = std::abs(dfdp) * dp + std::abs(dfds) * ds;
  const double got = idler_uncertainty(wl(p, dp), wl(s, ds));
  EXPECT_NEAR(got / oracle, 1.0, 0.01);
}

TEST(IdlerUncertainty, LinearInInputUncertainties) {
  const double one = idler_uncertainty(wl(396.1, 0.1), wl(532.0, 0.2));
  const double two = idler_uncertainty(wl(396.1, 0.2), wl(532.0, 0.4));
  EXPECT_NEAR(two, 2.0 * one, 1e-12 * one);
}

CrystalSpec crystal(double period_um, int m = 1, double length_mm = 10.0) {
  CrystalSpec c;
  c.poling_period_um = period_um;
  c.qpm_order = m;
  c.length_mm = length_mm;
  return c;
}

TEST(Qpm, ResidualZeroAtMatchedPeriod) {
  EXPECT_NEAR(qpm_residual(2 * kPi / 40.0, crystal(40.0)), 0.0, 1e-15);
  EXPECT_NEAR(qpm_residual(2 * kPi * 3 / 12.0, crystal(12.0, 3)), 0.0, 1e-15);
  EXPECT_GT(qpm_residual(1.0, crystal(40.0)), 0.0);
}

TEST(Qpm, RequiredPeriod) {
  EXPECT_NEAR(required_poling_period(2 * kPi, 1), 1.0, 1e-15);
  EXPECT_NEAR(required_poling_period(2 * kPi / 2.7, 1), 2.7, 1e-12);
  EXPECT_THROW(required_poling_period(0.0, 1), qcomm::ValidationError);
  EXPECT_THROW(required_poling_period(-1.0, 1), qcomm::ValidationError);
  EXPECT_THROW(required_poling_period(1.0, 0), qcomm::ValidationError);
}

TEST(Qpm, RoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dk(1e-3, 10.0);
  std::uniform_int_distribution<int> order(1, 9);
  for (int k = 0; k < 1000; ++k) {
    const double d = dk(rng);
    const int m = order(rng);
    EXPECT_NEAR(qpm_residual(d, crystal(required_poling_period(d, m), m)), 0.0, 1e-12);
  }
}

TEST(Crystal, InvalidFieldsRejected) {
  auto c = crystal(10.0);
  c.duty_cycle = 0.0;
  EXPECT_THROW(c.validate(), qcomm::ValidationError);
  c = crystal(-1.0);
  EXPECT_THROW(c.validate(), qcomm::ValidationError);
  c = crystal(10.0, 0);
  EXPECT_THROW(c.validate(), qcomm::ValidationError);
  c = crystal(10.0, 1, 0.0);
  EXPECT_THROW(c.validate(), qcomm::ValidationError);
}

TEST(FourierCoefficient, ClosedFormValues) {
  EXPECT_NEAR(fourier_coefficient(1, 0.5), 2.0 / kPi, 1e-15);
  EXPECT_NEAR(fourier_coefficient(1, 0.5), 0.63662, 1e-5);
  EXPECT_NEAR(fourier_coefficient(2, 0.5), 0.0, 1e-15);
  EXPECT_NEAR(fourier_coefficient(1, 1.0), 0.0, 1e-15);
  EXPECT_THROW(fourier_coefficient(1, 0.0), qcomm::ValidationError);
  EXPECT_THROW(fourier_coefficient(1, 1.5), qcomm::ValidationError);
}

TEST(FourierCoefficient, Bounded) {
  for (int m = 1; m <= 10; ++m)
    for (int k = 1; k <= 100; ++k)
      EXPECT_LE(std::abs(fourier_coefficient(m, k / 100.0)), 2.0 / (kPi * m) + 1e-15);
}

TEST(PairAmplitude, SincShape) {
  const auto c = crystal(10.0, 1, 10.0);
  const double d_eff = 2.5, cc = 1.7;
  EXPECT_NEAR(pair_amplitude(0.0, c, d_eff, cc).value, cc * d_eff * 10.0, 1e-12);
  // dk L / 2 = pi
  EXPECT_NEAR(pair_amplitude(2 * kPi / 10.0, c, d_eff, cc).value, 0.0, 1e-12);
  // dk L / 2 = pi / 2
  EXPECT_NEAR(pair_amplitude(kPi / 10.0, c, d_eff, cc).value, cc * d_eff * 10.0 * 2.0 / kPi, 1e-12);
}

TEST(PairAmplitude, BoundedAndEven) {
  const auto c = crystal(10.0, 1, 3.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dk(-50.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = dk(rng);
    const double v = pair_amplitude(x, c, -4.0, 0.5).value;
    EXPECT_LE(std::abs(v), 0.5 * 4.0 * 3.0 + 1e-12);
    EXPECT_DOUBLE_EQ(v, pair_amplitude(-x, c, -4.0, 0.5).value);
  }
}

TEST(Tensor, IndexMapPicksOutD14) {
  SusceptibilityTensor chi;
  chi(0, 1, 2) = chi(0, 2, 1) = 3.0;
  const auto d = reduce_tensor(chi);
  EXPECT_EQ(d(0, 3), 3.0);
  EXPECT_EQ(d.cwiseAbs().sum(), 3.0);
}

TEST(Tensor, ZeroTensorGivesZeroMatrix) {
  EXPECT_TRUE(reduce_tensor(SusceptibilityTensor{}).isZero(0.0));
}

TEST(Tensor, AsymmetricRejectedWithIndices) {
  SusceptibilityTensor chi;
  chi(1, 0, 2) = 1.0;
  try {
    reduce_tensor(chi);
    FAIL();
  } catch (const qcomm::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("chi(2,1,3)"), std::string::npos) << e.what();
  }
}

TEST(Tensor, ReduceExpandRoundTrip) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const auto chi = random_symmetric(rng);
    const auto d = reduce_tensor(chi);
    const auto back = expand_tensor(d);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int g = 0; g < 3; ++g) EXPECT_EQ(back(a, b, g), chi(a, b, g));
    EXPECT_EQ(reduce_tensor(back), d);
  }
}

TEST(EffectiveNonlinearity, SimpleCases) {
  const Eigen::Vector3d x = Eigen::Vector3d::UnitX();
  EXPECT_EQ(effective_nonlinearity(DMatrix::Zero(), x, x, x), 0.0);
  DMatrix d = DMatrix::Zero();
  d(0, 0) = 1.0;
  EXPECT_EQ(effective_nonlinearity(d, x, x, x), 1.0);
  EXPECT_THROW(effective_nonlinearity(d, 2 * x, x, x), qcomm::ValidationError);
}

TEST(EffectiveNonlinearity, MatchesFullContraction) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 100; ++k) {
    const auto chi = random_symmetric(rng);
    const auto p = random_unit(rng), s = random_unit(rng), i = random_unit(rng);
    EXPECT_NEAR(effective_nonlinearity(reduce_tensor(chi), p, s, i), brute_force_deff(chi, p, s, i), 1e-12);
  }
}

TEST(ConversionEfficiency, Values) {
  EXPECT_EQ(conversion_efficiency(0, 1000000), 0.0);
  EXPECT_DOUBLE_EQ(conversion_efficiency(10, 10000000000ULL), 1e-9);
  EXPECT_THROW(conversion_efficiency(1, 0), qcomm::ValidationError);
}

TEST(ConversionEfficiency, ExpectedPairsMatchMonteCarlo) {
  // |Psi|^2 used as a per-pump-photon conversion probability.
  const auto c = crystal(10.0, 1, 1.0);
  const double psi = pair_amplitude(0.3, c, 1.0, 0.01).value;
  const double prob = psi * psi;
  const std::uint64_t n = 10000000;
  const double expected = prob * n;
  const double sd = std::sqrt(n * prob * (1 - prob));
  const auto got = qcomm::photon::sample_conversions(n, prob, 99);
  EXPECT_NEAR(static_cast<double>(got), expected, 3 * sd);
  EXPECT_NEAR(conversion_efficiency(got, n), prob, 3 * sd / n);
}

TEST(Polarizations, TableRows) {
  using P = Polarization;
  EXPECT_EQ(spdc_polarizations(SpdcType::Type0, P::V), (PolarizationTriple{P::V, P::V, P::V}));
  EXPECT_EQ(spdc_polarizations(SpdcType::Type0, P::H), (PolarizationTriple{P::H, P::H, P::H}));
  EXPECT_EQ(spdc_polarizations(SpdcType::TypeI, P::V), (PolarizationTriple{P::V, P::H, P::H}));
  EXPECT_EQ(spdc_polarizations(SpdcType::TypeI, P::H), (PolarizationTriple{P::H, P::V, P::V}));
  EXPECT_EQ(spdc_polarizations(SpdcType::TypeII, P::H), (PolarizationTriple{P::H, P::H, P::V}));
  EXPECT_TRUE(is_allowed(SpdcType::TypeII, {P::H, P::H, P::V}));
  EXPECT_FALSE(is_allowed(SpdcType::TypeI, {P::H, P::H, P::V}));
}

TEST(CrystalPresets, BundledPpktpIsQuasiPhaseMatchedAtDesignPoint) {
  const auto presets = load_crystal_presets_file(std::string(QCOMM_DATA_DIR) + "/crystals.json");
  const auto& ppktp = presets.at("ppktp");
  EXPECT_EQ(ppktp.crystal.spdc_type, SpdcType::TypeII);
  const double idler = idler_wavelength(wl(396.1), wl(532.0)).value;
  const double dk = phase_mismatch_per_um(ppktp, Polarization::H, 396.1, 532.0, idler);
  EXPECT_NEAR(required_poling_period(dk, 1), ppktp.crystal.poling_period_um, 0.01);
  EXPECT_NEAR(qpm_residual(dk, ppktp.crystal), 0.0, 1e-3);
}

TEST(CrystalPresets, MalformedConfigRejected) {
  std::istringstream bad(R"({"crystals": {"x": {"d_pm_per_v": [[0]], "length_mm": 1}}})");
  EXPECT_THROW(load_crystal_presets(bad), qcomm::ValidationError);
  std::istringstream garbage("not json");
  EXPECT_THROW(load_crystal_presets(garbage), qcomm::ValidationError);
}

TEST(TuningCurve, CsvColumns) {
  const std::vector<WavelengthNm> pumps{wl(396.1, 0.1), wl(400.0, 0.1)};
  const std::vector<WavelengthNm> signals{wl(532.0, 0.1), wl(532.0, 0.1)};
  const auto pts = tuning_curve(pumps, signals);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_GT(pts[0].d_lambda_i_nm, 0.0);
  std::ostringstream out;
  write_tuning_csv(out, pts);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "lambda_p_nm,lambda_s_nm,lambda_i_nm,d_lambda_i_nm");
}

}  // namespace
