#include "qcomm/spdc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "qcomm/error.hpp"

namespace qcomm::spdc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// (b, g) -> zeta, zero-based.
constexpr int kContractedIndex[3][3] = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}};

void require_down_conversion(const WavelengthNm& pump, const WavelengthNm& signal) {
  require(pump.value > 0.0 && signal.value > 0.0, "wavelengths must be positive");
  if (signal.value <= pump.value) {
    std::ostringstream msg;
    msg << "non-physical input: signal wavelength " << signal.value
        << " nm must exceed pump wavelength " << pump.value << " nm";
    throw ValidationError(msg.str());
  }
}

void require_unit(const Eigen::Vector3d& v, const char* name) {
  if (std::abs(v.norm() - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << name << " direction must be a unit vector (norm " << std::setprecision(12) << v.norm()
        << ")";
    throw ValidationError(msg.str());
  }
}

}  // namespace

WavelengthNm WavelengthNm::make(double value, double uncertainty) {
  require(std::isfinite(value) && value > 0.0, "wavelength must be positive");
  require(std::isfinite(uncertainty) && uncertainty >= 0.0,
          "wavelength uncertainty must be non-negative");
  return {value, uncertainty};
}

std::string_view to_string(SpdcType type) {
  switch (type) {
    case SpdcType::Type0: return "Type0";
    case SpdcType::TypeI: return "TypeI";
    case SpdcType::TypeII: return "TypeII";
  }
  return "?";
}

std::string_view to_string(Polarization p) { return p == Polarization::H ? "H" : "V"; }

SpdcType parse_spdc_type(std::string_view name) {
  if (name == "Type0" || name == "0") return SpdcType::Type0;
  if (name == "TypeI" || name == "I") return SpdcType::TypeI;
  if (name == "TypeII" || name == "II") return SpdcType::TypeII;
  throw ValidationError("unknown SPDC type '" + std::string(name) + "'");
}

Polarization parse_polarization(std::string_view name) {
  if (name == "H") return Polarization::H;
  if (name == "V") return Polarization::V;
  throw ValidationError("unknown polarization '" + std::string(name) + "'");
}

void CrystalSpec::validate() const {
  require(length_mm > 0.0, "crystal length must be positive");
  require(poling_period_um > 0.0, "poling period must be positive");
  require(duty_cycle > 0.0 && duty_cycle <= 1.0, "duty cycle must lie in (0, 1]");
  require(qpm_order >= 1, "QPM order must be >= 1");
  require(d_contracted.allFinite(), "d-matrix must be finite");
}

std::optional<std::array<int, 3>> SusceptibilityTensor::first_asymmetry(double tol) const {
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int g = b + 1; g < 3; ++g)
        if (std::abs((*this)(a, b, g) - (*this)(a, g, b)) > tol) return std::array{a, b, g};
  return std::nullopt;
}

WavelengthNm idler_wavelength(const WavelengthNm& pump, const WavelengthNm& signal) {
  require_down_conversion(pump, signal);
  return {pump.value * signal.value / (signal.value - pump.value), 0.0};
}

double idler_uncertainty(const WavelengthNm& pump, const WavelengthNm& signal) {
  require_down_conversion(pump, signal);
  const double gap2 = (pump.value - signal.value) * (pump.value - signal.value);
  return signal.value * signal.value / gap2 * pump.uncertainty +
         pump.value * pump.value / gap2 * signal.uncertainty;
}

double qpm_residual(double delta_k_per_um, const CrystalSpec& crystal) {
  crystal.validate();
  return delta_k_per_um - kTwoPi * crystal.qpm_order / crystal.poling_period_um;
}

double required_poling_period(double delta_k_per_um, int qpm_order) {
  require(qpm_order >= 1, "QPM order must be >= 1");
  require(delta_k_per_um > 0.0,
          "phase mismatch must be positive; no finite poling period compensates it");
  return kTwoPi * qpm_order / delta_k_per_um;
}

double fourier_coefficient(int qpm_order, double duty_cycle) {
  require(qpm_order >= 1, "QPM order must be >= 1");
  require(duty_cycle > 0.0 && duty_cycle <= 1.0, "duty cycle must lie in (0, 1]");
  const double m = qpm_order;
  return 2.0 / (std::numbers::pi * m) * std::sin(std::numbers::pi * m * duty_cycle);
}

PairAmplitude pair_amplitude(double delta_k_per_mm, const CrystalSpec& crystal, double d_eff,
                             double constant_c) {
  crystal.validate();
  const double x = 0.5 * delta_k_per_mm * crystal.length_mm;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return {constant_c * d_eff * crystal.length_mm * sinc, constant_c};
}

DMatrix reduce_tensor(const SusceptibilityTensor& full) {
  if (auto bad = full.first_asymmetry()) {
    const auto [a, b, g] = *bad;
    std::ostringstream msg;
    msg << "tensor is not Kleinman-symmetric: chi(" << a + 1 << ',' << b + 1 << ',' << g + 1
        << ") != chi(" << a + 1 << ',' << g + 1 << ',' << b + 1 << ')';
    throw ValidationError(msg.str());
  }
  DMatrix d = DMatrix::Zero();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int g = b; g < 3; ++g) d(a, kContractedIndex[b][g]) = full(a, b, g);
  return d;
}

SusceptibilityTensor expand_tensor(const DMatrix& d) {
  SusceptibilityTensor full;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int g = 0; g < 3; ++g) full(a, b, g) = d(a, kContractedIndex[b][g]);
  return full;
}

double effective_nonlinearity(const DMatrix& d, const Eigen::Vector3d& pump_dir,
                              const Eigen::Vector3d& signal_dir,
                              const Eigen::Vector3d& idler_dir) {
  require_unit(pump_dir, "pump");
  require_unit(signal_dir, "signal");
  require_unit(idler_dir, "idler");
  const auto& s = signal_dir;
  const auto& i = idler_dir;
  Eigen::Matrix<double, 6, 1> f;
  f << s.x() * i.x(), s.y() * i.y(), s.z() * i.z(), s.y() * i.z() + s.z() * i.y(),
      s.x() * i.z() + s.z() * i.x(), s.x() * i.y() + s.y() * i.x();
  return pump_dir.dot(d * f);
}

double conversion_efficiency(std::uint64_t n_pairs, std::uint64_t n_pump) {
  require(n_pump > 0, "pump photon number must be positive");
  require(n_pairs <= n_pump, "pair number cannot exceed pump photon number");
  return static_cast<double>(n_pairs) / static_cast<double>(n_pump);
}

PolarizationTriple spdc_polarizations(SpdcType type, Polarization pump) {
  const Polarization other = pump == Polarization::H ? Polarization::V : Polarization::H;
  switch (type) {
    case SpdcType::Type0: return {pump, pump, pump};
    case SpdcType::TypeI: return {pump, other, other};
    case SpdcType::TypeII: return {pump, pump, other};
  }
  throw ValidationError("unknown SPDC type");
}

bool is_allowed(SpdcType type, const PolarizationTriple& triple) {
  return spdc_polarizations(type, triple.pump) == triple;
}

double IndexTable::at(double wavelength_nm) const {
  require(!points.empty(), "empty refractive-index table");
  if (points.size() == 1) return points.front().second;
  auto hi = std::lower_bound(points.begin(), points.end(), wavelength_nm,
                             [](const auto& p, double w) { return p.first < w; });
  require(hi != points.end() && (hi != points.begin() || hi->first == wavelength_nm),
          "wavelength " + std::to_string(wavelength_nm) + " nm outside refractive-index table");
  if (hi->first == wavelength_nm) return hi->second;
  auto lo = std::prev(hi);
  const double t = (wavelength_nm - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

double phase_mismatch_per_um(const CrystalPreset& preset, Polarization pump_polarization,
                             double pump_nm, double signal_nm, double idler_nm) {
  const auto pol = spdc_polarizations(preset.crystal.spdc_type, pump_polarization);
  auto table = [&](Polarization p) -> const IndexTable& {
    auto it = preset.index.find(p);
    require(it != preset.index.end(),
            "preset '" + preset.name + "' has no index table for " + std::string(to_string(p)));
    return it->second;
  };
  // nm -> um
  const double kp = table(pol.pump).at(pump_nm) / (pump_nm * 1e-3);
  const double ks = table(pol.signal).at(signal_nm) / (signal_nm * 1e-3);
  const double ki = table(pol.idler).at(idler_nm) / (idler_nm * 1e-3);
  return kTwoPi * (kp - ks - ki);
}

std::map<std::string, CrystalPreset> load_crystal_presets(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("crystal config: ") + e.what());
  }
  require(doc.contains("crystals") && doc["crystals"].is_object(),
          "crystal config must contain a 'crystals' object");
  std::map<std::string, CrystalPreset> presets;
  for (const auto& [name, node] : doc["crystals"].items()) {
    try {
      CrystalPreset preset;
      preset.name = name;
      auto& c = preset.crystal;
      const auto& rows = node.at("d_pm_per_v");
      require(rows.size() == 3, name + ": d_pm_per_v must have 3 rows");
      for (int a = 0; a < 3; ++a) {
        require(rows[a].size() == 6, name + ": d_pm_per_v rows must have 6 entries");
        for (int z = 0; z < 6; ++z) c.d_contracted(a, z) = rows[a][z].get<double>();
      }
      c.length_mm = node.at("length_mm").get<double>();
      c.poling_period_um = node.at("poling_period_um").get<double>();
      c.duty_cycle = node.value("duty_cycle", 0.5);
      c.qpm_order = node.value("qpm_order", 1);
      c.spdc_type = parse_spdc_type(node.at("type").get<std::string>());
      c.validate();
      if (node.contains("index")) {
        for (const auto& [pol, pts] : node["index"].items()) {
          IndexTable t;
          for (const auto& p : pts) t.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
          std::sort(t.points.begin(), t.points.end());
          preset.index.emplace(parse_polarization(pol), std::move(t));
        }
      }
      presets.emplace(name, std::move(preset));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("crystal '" + name + "': " + e.what());
    }
  }
  return presets;
}

std::map<std::string, CrystalPreset> load_crystal_presets_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open crystal config '" + path + "'");
  return load_crystal_presets(in);
}

std::vector<TuningPoint> tuning_curve(std::span<const WavelengthNm> pumps,
                                      std::span<const WavelengthNm> signals) {
  require(pumps.size() == signals.size(), "pump and signal series must have equal length");
  std::vector<TuningPoint> out;
  out.reserve(pumps.size());
  for (std::size_t k = 0; k < pumps.size(); ++k) {
    const auto idler = idler_wavelength(pumps[k], signals[k]);
    out.push_back({pumps[k].value, signals[k].value, idler.value,
                   idler_uncertainty(pumps[k], signals[k])});
  }
  return out;
}

void write_tuning_csv(std::ostream& out, std::span<const TuningPoint> points) {
  out << "lambda_p_nm,lambda_s_nm,lambda_i_nm,d_lambda_i_nm\n";
  out << std::setprecision(10);
  for (const auto& p : points)
    out << p.lambda_p_nm << ',' << p.lambda_s_nm << ',' << p.lambda_i_nm << ',' << p.d_lambda_i_nm
        << '\n';
}

}  // namespace qcomm::spdc
