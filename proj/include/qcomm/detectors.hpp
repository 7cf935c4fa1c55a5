#pragma once

// Single-photon detector presets. The built-in catalog is compiled in from
// data/detectors.json; overrides use the same format.

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcomm/photon_stats.hpp"
#include "qcomm/spdc.hpp"

namespace qcomm::detectors {

enum class DetectorFamily { PMT, SpadSi, SpadInGaAs, SSPD, UCSPD, TES };

std::string_view to_string(DetectorFamily f);
DetectorFamily parse_family(std::string_view name);

// Closed interval.
struct Interval {
  double min = 0.0;
  double max = 0.0;
  bool contains(double x) const { return x >= min && x <= max; }
};

// Efficiency bounds for the family as a whole.
Interval family_efficiency_bounds(DetectorFamily f);

struct DetectorPreset {
  DetectorFamily family = DetectorFamily::PMT;
  std::string variant;
  int version = 1;
  photon::DetectorSpec spec;
  Interval wavelength_range_nm;
  Interval efficiency_range;
  bool representative = false;  // default taken from a range, not a measurement
  std::string efficiency_kind;  // "device" or "system"
  std::vector<std::string> unspecified;
  std::string note;

  // DetectorSpec validity, non-empty wavelength interval, efficiency inside both the
  // preset's range and the family bounds.
  void validate() const;
  std::string id() const;
};

struct WavelengthCheck {
  bool ok = false;
  std::string diagnostic;
};

WavelengthCheck validate_for_wavelength(const DetectorPreset& preset, const spdc::WavelengthNm& lambda);

class Catalog {
 public:
  static const Catalog& builtin();
  static Catalog from_json(const nlohmann::json& j);
  static Catalog parse(std::istream& in);
  static Catalog parse_file(const std::string& path);

  // Presets from `overrides` replace same-id entries or are added.
  void merge(const Catalog& overrides);

  const DetectorPreset& find(DetectorFamily family, std::string_view variant) const;
  std::vector<const DetectorPreset*> list() const;

 private:
  std::map<std::pair<DetectorFamily, std::string>, DetectorPreset> presets_;
};

const DetectorPreset& load_preset(DetectorFamily family, std::string_view variant);
// "FAMILY/variant".
const DetectorPreset& load_preset(std::string_view id);

nlohmann::json to_json(const DetectorPreset& p);

}  // namespace qcomm::detectors
