#include "qcomm/photon_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "qcomm/error.hpp"

namespace qcomm::photon {

namespace {

constexpr std::array<char, 8> kMagic = {'Q', 'C', 'T', 'T', 'A', 'G', '0', '1'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  require(in.gcount() == sizeof(T), "truncated time-tag file");
  return value;
}

std::vector<TimeTagStream> group(std::map<int, std::vector<std::int64_t>> by_channel) {
  std::vector<TimeTagStream> out;
  for (auto& [ch, tags] : by_channel) {
    require(std::adjacent_find(tags.begin(), tags.end(), std::greater_equal<>()) == tags.end(),
            "channel " + std::to_string(ch) + " timestamps are not strictly increasing");
    out.push_back({ch, std::move(tags)});
  }
  return out;
}

}  // namespace

void write_streams_csv(std::ostream& out, std::span<const TimeTagStream> streams) {
  out << "channel,t_ps\n";
  for (const auto& s : streams)
    for (auto t : s.timestamps_ps) out << s.channel << ',' << t << '\n';
}

std::vector<TimeTagStream> read_streams_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty time-tag CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "channel,t_ps", "time-tag CSV must start with header 'channel,t_ps'");
  std::map<int, std::vector<std::int64_t>> by_channel;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::istringstream fields(line);
    int ch = 0;
    char comma = 0;
    std::int64_t t = 0;
    require(static_cast<bool>(fields >> ch >> comma >> t) && comma == ',',
            "malformed time-tag CSV row " + std::to_string(row));
    by_channel[ch].push_back(t);
  }
  return group(std::move(by_channel));
}

void write_streams_binary(std::ostream& out, std::span<const TimeTagStream> streams) {
  out.write(kMagic.data(), kMagic.size());
  std::uint64_t n = 0;
  for (const auto& s : streams) n += s.timestamps_ps.size();
  put_le<std::uint64_t>(out, n);
  for (const auto& s : streams)
    for (auto t : s.timestamps_ps) {
      put_le<std::int32_t>(out, s.channel);
      put_le<std::int64_t>(out, t);
    }
}

std::vector<TimeTagStream> read_streams_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  require(in.gcount() == 8 && magic == kMagic, "not a QCTTAG01 time-tag file");
  const auto n = get_le<std::uint64_t>(in);
  std::map<int, std::vector<std::int64_t>> by_channel;
  for (std::uint64_t k = 0; k < n; ++k) {
    const auto ch = get_le<std::int32_t>(in);
    by_channel[ch].push_back(get_le<std::int64_t>(in));
  }
  return group(std::move(by_channel));
}

std::vector<TimeTagStream> read_streams_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open time-tag file '" + path + "'");
  std::array<char, 8> head{};
  in.read(head.data(), head.size());
  const bool binary = in.gcount() == 8 && head == kMagic;
  in.clear();
  in.seekg(0);
  return binary ? read_streams_binary(in) : read_streams_csv(in);
}

nlohmann::json to_json(const CoincidenceHistogram& h) {
  return {{"bin_width_ps", h.bin_width_ps},
          {"t_min_ps", h.t_min_ps},
          {"t_max_ps", h.t_max_ps},
          {"total", h.total()},
          {"counts", h.counts}};
}

CoincidenceHistogram histogram_from_json(const nlohmann::json& j) {
  CoincidenceHistogram h;
  try {
    h.bin_width_ps = j.at("bin_width_ps").get<std::int64_t>();
    h.t_min_ps = j.at("t_min_ps").get<std::int64_t>();
    h.t_max_ps = j.at("t_max_ps").get<std::int64_t>();
    h.counts = j.at("counts").get<std::vector<std::uint64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("histogram JSON: ") + e.what());
  }
  require(h.bin_width_ps > 0, "histogram bin width must be positive");
  require(h.t_max_ps - h.t_min_ps == static_cast<std::int64_t>(h.counts.size()) * h.bin_width_ps,
          "histogram range does not match its bin count");
  return h;
}

nlohmann::json to_json(const GaussianFit& f) {
  return {{"a", f.a},
          {"b", f.b},
          {"t0_ps", f.t0_ps},
          {"sigma_fwhm_ps", f.sigma_fwhm_ps},
          {"stderr", {{"a", f.err_a}, {"b", f.err_b}, {"t0_ps", f.err_t0_ps}, {"sigma_fwhm_ps", f.err_sigma_ps}}},
          {"residual_norm", f.residual_norm},
          {"iterations", f.iterations},
          {"converged", f.converged}};
}

GaussianFit fit_from_json(const nlohmann::json& j) {
  GaussianFit f;
  try {
    f.a = j.at("a").get<double>();
    f.b = j.at("b").get<double>();
    f.t0_ps = j.at("t0_ps").get<double>();
    f.sigma_fwhm_ps = j.at("sigma_fwhm_ps").get<double>();
    if (j.contains("stderr")) {
      const auto& e = j["stderr"];
      f.err_a = e.value("a", 0.0);
      f.err_b = e.value("b", 0.0);
      f.err_t0_ps = e.value("t0_ps", 0.0);
      f.err_sigma_ps = e.value("sigma_fwhm_ps", 0.0);
    }
    f.residual_norm = j.value("residual_norm", 0.0);
    f.iterations = j.value("iterations", 0);
    f.converged = j.value("converged", false);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("fit JSON: ") + e.what());
  }
  return f;
}

nlohmann::json to_json(const HeraldedCounts& c) {
  return {{"N_A", c.n_a}, {"N_AB", c.n_ab}, {"N_AC", c.n_ac}, {"N_ABC", c.n_abc}};
}

nlohmann::json to_json(const DetectorSpec& d) {
  return {{"efficiency", d.efficiency},
          {"dark_rate_hz", d.dark_rate_hz},
          {"jitter_fwhm_ps", d.jitter_fwhm_ps},
          {"dead_time_ns", d.dead_time_ns}};
}

DetectorSpec detector_from_json(const nlohmann::json& j) {
  DetectorSpec d;
  try {
    d.efficiency = j.at("efficiency").get<double>();
    d.dark_rate_hz = j.value("dark_rate_hz", 0.0);
    d.jitter_fwhm_ps = j.value("jitter_fwhm_ps", 0.0);
    d.dead_time_ns = j.value("dead_time_ns", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("detector JSON: ") + e.what());
  }
  d.validate();
  return d;
}

}  // namespace qcomm::photon
