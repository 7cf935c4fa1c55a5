#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace qcomm::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

struct OutputRecord {
  std::string flag;  // option that named the file, e.g. "--out"
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::vector<std::string> command;  // argv without the program name
  std::string subcommand;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json seed;  // null for deterministic commands
  std::string version;
  std::vector<OutputRecord> outputs;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

inline std::string manifest_path(const std::string& output_path) { return output_path + ".manifest.json"; }

}  // namespace qcomm::cli
