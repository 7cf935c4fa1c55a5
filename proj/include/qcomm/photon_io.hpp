#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcomm/gaussian_fit.hpp"
#include "qcomm/photon_stats.hpp"

namespace qcomm::photon {

// CSV: header "channel,t_ps", one tag per line.
void write_streams_csv(std::ostream& out, std::span<const TimeTagStream> streams);
std::vector<TimeTagStream> read_streams_csv(std::istream& in);

// Binary, little-endian:
//   8 bytes  magic "QCTTAG01"
//   u64      record count
//   records  { i32 channel; i64 t_ps; }
void write_streams_binary(std::ostream& out, std::span<const TimeTagStream> streams);
std::vector<TimeTagStream> read_streams_binary(std::istream& in);

// Picks the reader from the first bytes of the file.
std::vector<TimeTagStream> read_streams_file(const std::string& path);

nlohmann::json to_json(const CoincidenceHistogram& h);
CoincidenceHistogram histogram_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GaussianFit& fit);
GaussianFit fit_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HeraldedCounts& c);
nlohmann::json to_json(const DetectorSpec& d);
DetectorSpec detector_from_json(const nlohmann::json& j);

}  // namespace qcomm::photon
