#include <sstream>

#include <gtest/gtest.h>

#include "qcomm/detectors.hpp"
#include "qcomm/error.hpp"

namespace {

using namespace qcomm::detectors;
using qcomm::spdc::WavelengthNm;

TEST(Catalog, ShippedPresetsValid) {
  const auto presets = Catalog::builtin().list();
  EXPECT_GE(presets.size(), 6u);
  for (const auto* p : presets) {
    EXPECT_NO_THROW(p->validate()) << p->id();
    EXPECT_LE(p->wavelength_range_nm.min, p->wavelength_range_nm.max);
  }
  for (auto f : {DetectorFamily::PMT, DetectorFamily::SpadSi, DetectorFamily::SpadInGaAs,
                 DetectorFamily::SSPD, DetectorFamily::UCSPD, DetectorFamily::TES}) {
    bool found = false;
    for (const auto* p : presets) found |= p->family == f;
    EXPECT_TRUE(found) << to_string(f);
  }
}

TEST(Catalog, QuotedValues) {
  EXPECT_EQ(load_preset(DetectorFamily::SSPD, "nbn").spec.jitter_fwhm_ps, 20.0);
  EXPECT_LE(load_preset(DetectorFamily::SSPD, "nbn").spec.efficiency, 0.90);
  EXPECT_EQ(family_efficiency_bounds(DetectorFamily::SpadSi).max, 0.85);
  EXPECT_LE(load_preset("SPAD_Si/visible").spec.efficiency, 0.85);
  EXPECT_NEAR(load_preset("SPAD_InGaAs/cooled").spec.efficiency, 0.30, 1e-12);
  EXPECT_NEAR(load_preset("SSPD/measured-1550").spec.efficiency, 0.64, 1e-12);
  EXPECT_EQ(load_preset("SSPD/measured-1550").efficiency_kind, "system");
}

TEST(Catalog, RepresentativeFlagForRanges) {
  const auto& pmt = load_preset("PMT/standard");
  EXPECT_TRUE(pmt.representative);
  EXPECT_NEAR(pmt.spec.efficiency, 0.5 * (pmt.efficiency_range.min + pmt.efficiency_range.max), 1e-12);
}

TEST(Validation, SspdAbove90PercentRejected) {
  auto p = load_preset(DetectorFamily::SSPD, "nbn");
  p.spec.efficiency = 0.99;
  EXPECT_THROW(p.validate(), qcomm::ValidationError);
  p = load_preset(DetectorFamily::SSPD, "nbn");
  p.wavelength_range_nm = {1600, 1500};
  EXPECT_THROW(p.validate(), qcomm::ValidationError);
}

TEST(Wavelength, RangeChecks) {
  const auto& sspd = load_preset("SSPD/nbn");
  EXPECT_TRUE(validate_for_wavelength(sspd, WavelengthNm::make(1550)).ok);
  const auto& si = load_preset("SPAD_Si/visible");
  const auto bad = validate_for_wavelength(si, WavelengthNm::make(2300));
  EXPECT_FALSE(bad.ok);
  EXPECT_NE(bad.diagnostic.find("2300"), std::string::npos) << bad.diagnostic;
  EXPECT_TRUE(validate_for_wavelength(si, WavelengthNm::make(si.wavelength_range_nm.max)).ok);
  EXPECT_TRUE(validate_for_wavelength(si, WavelengthNm::make(si.wavelength_range_nm.min)).ok);
}

TEST(Lookup, UnknownIdsRejected) {
  EXPECT_THROW(load_preset("SSPD/nonexistent"), qcomm::ValidationError);
  EXPECT_THROW(load_preset("NOPE/x"), qcomm::ValidationError);
  EXPECT_THROW(load_preset("SSPD"), qcomm::ValidationError);
  EXPECT_THROW(parse_family("CCD"), qcomm::ValidationError);
}

TEST(Lookup, LoadingTwiceIsIdentical) {
  const auto& a = load_preset("TES/standard");
  const auto& b = load_preset("TES/standard");
  EXPECT_EQ(&a, &b);
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(Catalog::builtin().list().size(), Catalog::builtin().list().size());
}

TEST(Overrides, MergeReplacesAndAdds) {
  std::istringstream in(R"({
    "format": "qcomm-detectors", "version": 1,
    "presets": [
      {"family": "SSPD", "variant": "nbn", "version": 2, "efficiency_kind": "device",
       "efficiency_range": [0.0, 0.9], "wavelength_range_nm": [500, 2000],
       "detector": {"efficiency": 0.8, "dark_rate_hz": 100, "jitter_fwhm_ps": 35, "dead_time_ns": 30}},
      {"family": "TES", "variant": "lab", "efficiency_kind": "system",
       "efficiency_range": [0.0, 0.99], "wavelength_range_nm": [1000, 1600],
       "detector": {"efficiency": 0.95}}
    ]})");
  auto cat = Catalog::builtin();
  cat.merge(Catalog::parse(in));
  EXPECT_EQ(cat.find(DetectorFamily::SSPD, "nbn").spec.jitter_fwhm_ps, 35.0);
  EXPECT_EQ(cat.find(DetectorFamily::SSPD, "nbn").version, 2);
  EXPECT_EQ(cat.find(DetectorFamily::TES, "lab").spec.efficiency, 0.95);
  EXPECT_EQ(load_preset("SSPD/nbn").spec.jitter_fwhm_ps, 20.0);
}

TEST(Overrides, OutOfBoundPresetRejectedAtLoad) {
  std::istringstream in(R"({"format": "qcomm-detectors", "version": 1, "presets": [
      {"family": "SPAD_Si", "variant": "hot", "efficiency_kind": "device",
       "efficiency_range": [0.0, 0.95], "wavelength_range_nm": [400, 900],
       "detector": {"efficiency": 0.95}}]})");
  EXPECT_THROW(Catalog::parse(in), qcomm::ValidationError);
}

}  // namespace
