#include "manifest.hpp"

#include <fstream>
#include <iterator>

#include <openssl/evp.h>

#include "qcomm/error.hpp"

namespace qcomm::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read '" + path + "'");
  return sha256_hex(std::string(std::istreambuf_iterator<char>(in), {}));
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& o : m.outputs) outputs.push_back({{"flag", o.flag}, {"path", o.path}, {"sha256", o.sha256}});
  return {{"command", m.command},  {"subcommand", m.subcommand}, {"parameters", m.parameters},
          {"seed", m.seed},        {"version", m.version},       {"outputs", outputs}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::vector<std::string>>();
    m.subcommand = j.value("subcommand", std::string());
    m.parameters = j.value("parameters", nlohmann::json::object());
    m.seed = j.value("seed", nlohmann::json());
    m.version = j.value("version", std::string());
    for (const auto& o : j.at("outputs"))
      m.outputs.push_back({o.at("flag").get<std::string>(), o.at("path").get<std::string>(),
                           o.at("sha256").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed manifest: ") + e.what());
  }
  require(!m.command.empty(), "manifest has an empty command");
  return m;
}

}  // namespace qcomm::cli
