#include "qcomm/detectors.hpp"

#include <fstream>
#include <istream>
#include <sstream>

#include "qcomm/error.hpp"
#include "qcomm/photon_io.hpp"

namespace qcomm::detectors {

namespace detail {
extern const std::string_view kBuiltinCatalog;
}

namespace {

constexpr std::pair<DetectorFamily, std::string_view> kNames[] = {
    {DetectorFamily::PMT, "PMT"},   {DetectorFamily::SpadSi, "SPAD_Si"},
    {DetectorFamily::SpadInGaAs, "SPAD_InGaAs"}, {DetectorFamily::SSPD, "SSPD"},
    {DetectorFamily::UCSPD, "UCSPD"}, {DetectorFamily::TES, "TES"}};

Interval interval_from_json(const nlohmann::json& j, const char* what) {
  require(j.is_array() && j.size() == 2, std::string(what) + " must be a [min, max] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

DetectorPreset preset_from_json(const nlohmann::json& j) {
  DetectorPreset p;
  p.family = parse_family(j.at("family").get<std::string>());
  p.variant = j.at("variant").get<std::string>();
  require(!p.variant.empty(), "detector preset variant must not be empty");
  p.version = j.value("version", 1);
  p.spec = photon::detector_from_json(j.at("detector"));
  p.wavelength_range_nm = interval_from_json(j.at("wavelength_range_nm"), "wavelength_range_nm");
  p.efficiency_range = j.contains("efficiency_range")
                           ? interval_from_json(j["efficiency_range"], "efficiency_range")
                           : family_efficiency_bounds(p.family);
  p.representative = j.value("representative", false);
  p.efficiency_kind = j.value("efficiency_kind", std::string("device"));
  require(p.efficiency_kind == "device" || p.efficiency_kind == "system",
          "efficiency_kind must be 'device' or 'system'");
  p.unspecified = j.value("unspecified", std::vector<std::string>{});
  p.note = j.value("note", std::string());
  p.validate();
  return p;
}

}  // namespace

std::string_view to_string(DetectorFamily f) {
  for (const auto& [family, name] : kNames)
    if (family == f) return name;
  return "?";
}

DetectorFamily parse_family(std::string_view name) {
  for (const auto& [family, n] : kNames)
    if (n == name) return family;
  throw ValidationError("unknown detector family '" + std::string(name) +
                        "' (expected PMT, SPAD_Si, SPAD_InGaAs, SSPD, UCSPD or TES)");
}

Interval family_efficiency_bounds(DetectorFamily f) {
  switch (f) {
    case DetectorFamily::PMT: return {0.10, 0.40};
    case DetectorFamily::SpadSi: return {0.0, 0.85};
    case DetectorFamily::SpadInGaAs: return {0.0, 0.30};
    case DetectorFamily::SSPD: return {0.0, 0.90};
    case DetectorFamily::UCSPD: return {0.30, 0.60};
    case DetectorFamily::TES: return {0.0, 0.99};
  }
  return {0.0, 1.0};
}

void DetectorPreset::validate() const {
  spec.validate();
  require(wavelength_range_nm.min > 0.0 && wavelength_range_nm.min < wavelength_range_nm.max,
          id() + ": wavelength interval must be non-empty and positive");
  require(efficiency_range.min <= efficiency_range.max, id() + ": efficiency range is inverted");
  require(efficiency_range.contains(spec.efficiency),
          id() + ": efficiency " + fmt(spec.efficiency) + " outside preset range [" +
              fmt(efficiency_range.min) + ", " + fmt(efficiency_range.max) + "]");
  const Interval bounds = family_efficiency_bounds(family);
  require(bounds.contains(spec.efficiency) && bounds.contains(efficiency_range.min) &&
              bounds.contains(efficiency_range.max),
          id() + ": efficiency " + fmt(spec.efficiency) + " outside " + std::string(to_string(family)) +
              " bounds [" + fmt(bounds.min) + ", " + fmt(bounds.max) + "]");
}

std::string DetectorPreset::id() const { return std::string(to_string(family)) + "/" + variant; }

WavelengthCheck validate_for_wavelength(const DetectorPreset& preset, const spdc::WavelengthNm& lambda) {
  const auto& r = preset.wavelength_range_nm;
  if (r.contains(lambda.value)) return {true, ""};
  return {false, preset.id() + ": " + fmt(lambda.value) + " nm is " +
                     (lambda.value < r.min ? "below" : "above") + " the working range [" +
                     fmt(r.min) + ", " + fmt(r.max) + "] nm"};
}

Catalog Catalog::from_json(const nlohmann::json& j) {
  require(j.value("format", std::string()) == "qcomm-detectors",
          "detector catalog must declare format 'qcomm-detectors'");
  require(j.contains("presets") && j["presets"].is_array(), "detector catalog needs a presets array");
  Catalog c;
  for (const auto& entry : j["presets"]) {
    DetectorPreset p = preset_from_json(entry);
    const auto key = std::make_pair(p.family, p.variant);
    require(!c.presets_.contains(key), "duplicate detector preset " + p.id());
    c.presets_.emplace(key, std::move(p));
  }
  return c;
}

Catalog Catalog::parse(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("detector catalog is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

Catalog Catalog::parse_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open detector catalog '" + path + "'");
  return parse(in);
}

const Catalog& Catalog::builtin() {
  static const Catalog c = from_json(nlohmann::json::parse(detail::kBuiltinCatalog));
  return c;
}

void Catalog::merge(const Catalog& overrides) {
  for (const auto& [key, preset] : overrides.presets_) presets_.insert_or_assign(key, preset);
}

const DetectorPreset& Catalog::find(DetectorFamily family, std::string_view variant) const {
  const auto it = presets_.find({family, std::string(variant)});
  require(it != presets_.end(),
          "unknown detector preset " + std::string(to_string(family)) + "/" + std::string(variant));
  return it->second;
}

std::vector<const DetectorPreset*> Catalog::list() const {
  std::vector<const DetectorPreset*> out;
  for (const auto& [key, p] : presets_) out.push_back(&p);
  return out;
}

const DetectorPreset& load_preset(DetectorFamily family, std::string_view variant) {
  return Catalog::builtin().find(family, variant);
}

const DetectorPreset& load_preset(std::string_view id) {
  const auto slash = id.find('/');
  require(slash != std::string_view::npos, "detector preset id must be FAMILY/variant");
  return load_preset(parse_family(id.substr(0, slash)), id.substr(slash + 1));
}

nlohmann::json to_json(const DetectorPreset& p) {
  return {{"family", to_string(p.family)},
          {"variant", p.variant},
          {"version", p.version},
          {"efficiency_kind", p.efficiency_kind},
          {"representative", p.representative},
          {"efficiency_range", {p.efficiency_range.min, p.efficiency_range.max}},
          {"wavelength_range_nm", {p.wavelength_range_nm.min, p.wavelength_range_nm.max}},
          {"detector", photon::to_json(p.spec)},
          {"unspecified", p.unspecified},
          {"note", p.note}};
}

}  // namespace qcomm::detectors
