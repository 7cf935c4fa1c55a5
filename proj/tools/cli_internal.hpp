#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "manifest.hpp"

namespace qcomm::cli {

inline constexpr const char* kVersion = "0.1.0";

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::vector<OutputRecord> outputs;
  int exit_code = 0;
};

// Writes `content` to `path`, or to ctx.out when path is empty. File outputs
// are digested for the run manifest.
void emit(Context& ctx, const std::string& flag, const std::string& path, const std::string& content);
void emit_json(Context& ctx, const std::string& path, const nlohmann::json& j);

std::string read_text_file(const std::string& path);
nlohmann::json read_json_file(const std::string& path);

// Text from --text or the contents of --in; exactly one must be given.
std::string text_input(const std::string& text, const std::string& in_path);

void add_physics_commands(CLI::App& app, Context& ctx);
void add_crypto_commands(CLI::App& app, Context& ctx);

}  // namespace qcomm::cli
