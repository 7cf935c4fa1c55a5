#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "cli_internal.hpp"
#include "qcomm/error.hpp"

namespace qcomm::cli {

void emit(Context& ctx, const std::string& flag, const std::string& path, const std::string& content) {
  if (path.empty()) {
    ctx.out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), "cannot write '" + path + "'");
  f << content;
  f.close();
  require(static_cast<bool>(f), "failed writing '" + path + "'");
  ctx.outputs.push_back({flag, path, sha256_hex(content)});
}

void emit_json(Context& ctx, const std::string& path, const nlohmann::json& j) {
  emit(ctx, "--out", path, j.dump(2) + "\n");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

nlohmann::json read_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string text_input(const std::string& text, const std::string& in_path) {
  require(text.empty() != in_path.empty(), "give exactly one of --text or --in");
  if (!text.empty()) return text;
  std::string s = read_text_file(in_path);
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

namespace {

const CLI::App* leaf_subcommand(const CLI::App* app) {
  for (const auto* sub : app->get_subcommands()) return leaf_subcommand(sub);
  return app;
}

std::string subcommand_path(const CLI::App& app) {
  std::string path;
  for (const CLI::App* a = leaf_subcommand(&app); a && a->get_parent(); a = a->get_parent())
    path = a->get_name() + (path.empty() ? "" : " " + path);
  return path;
}

// Every option on the parsed chain with its effective value.
nlohmann::json collect_parameters(const CLI::App& app, nlohmann::json& seed) {
  nlohmann::json params = nlohmann::json::object();
  for (const CLI::App* a = leaf_subcommand(&app); a; a = a->get_parent()) {
    for (const CLI::Option* opt : a->get_options()) {
      const std::string name = opt->get_name();
      if (name.empty() || name == "--help" || name == "--help-all") continue;
      nlohmann::json value;
      if (opt->count() > 0) {
        const auto& results = opt->results();
        value = results.size() == 1 ? nlohmann::json(results.front()) : nlohmann::json(results);
      } else if (!opt->get_default_str().empty()) {
        value = opt->get_default_str();
      }
      if (name == "--seed" && opt->count() > 0) seed = std::stoull(opt->results().front());
      params[name] = value;
    }
  }
  return params;
}

void add_replay(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
  auto manifest_file = std::make_shared<std::string>();
  cmd->add_option("--manifest", *manifest_file, "Run manifest (*.manifest.json)")->required();
  cmd->callback([&ctx, manifest_file] {
    const RunManifest m = manifest_from_json(read_json_file(*manifest_file));
    require(!m.outputs.empty(), "manifest lists no output files");
    std::vector<std::string> args = m.command;
    require(args.front() != "replay", "refusing to replay a replay");
    std::vector<std::string> replay_paths;
    for (const auto& o : m.outputs) {
      const std::string replay_path = o.path + ".replay";
      bool substituted = false;
      for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == o.flag && args[i + 1] == o.path) {
          args[i + 1] = replay_path;
          substituted = true;
        } else if (args[i] == o.flag + "=" + o.path) {
          args[i] = o.flag + "=" + replay_path;
          substituted = true;
        }
      }
      require(substituted, "manifest command does not name output '" + o.path + "'");
      replay_paths.push_back(replay_path);
    }
    std::ostringstream sink_out, sink_err;
    const int code = run(args, sink_out, sink_err);
    nlohmann::json report = {{"manifest", *manifest_file}, {"exit_code", code}};
    bool all_match = code == 0;
    nlohmann::json files = nlohmann::json::array();
    for (std::size_t k = 0; k < m.outputs.size(); ++k) {
      std::string digest;
      if (std::filesystem::exists(replay_paths[k])) digest = sha256_file(replay_paths[k]);
      const bool match = digest == m.outputs[k].sha256;
      all_match = all_match && match;
      files.push_back({{"path", m.outputs[k].path}, {"expected", m.outputs[k].sha256},
                       {"replayed", digest}, {"match", match}});
      std::error_code ec;
      std::filesystem::remove(replay_paths[k], ec);
      std::filesystem::remove(manifest_path(replay_paths[k]), ec);
    }
    report["outputs"] = files;
    report["reproduced"] = all_match;
    if (code != 0) report["stderr"] = sink_err.str();
    ctx.out << report.dump(2) << "\n";
    if (!all_match) ctx.exit_code = 1;
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, {}, 0};
  CLI::App app{"Quantum communication toolkit: SPDC design, photon statistics, tomography, QKD and classical ciphers",
               "qcomm"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML/INI file supplying option values");
  app.require_subcommand(1);
  // Lets --config follow the subcommand path.
  app.fallthrough();
  add_physics_commands(app, ctx);
  add_crypto_commands(app, ctx);
  add_replay(app, ctx);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << leaf_subcommand(&app)->help();
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return 1;
  }

  if (!ctx.outputs.empty()) {
    RunManifest m;
    m.command = args;
    m.subcommand = subcommand_path(app);
    m.parameters = collect_parameters(app, m.seed);
    m.version = kVersion;
    m.outputs = ctx.outputs;
    std::ofstream f(manifest_path(ctx.outputs.front().path));
    if (!f) {
      err << "runtime error: cannot write manifest for '" << ctx.outputs.front().path << "'\n";
      return 1;
    }
    f << to_json(m).dump(2) << "\n";
  }
  return ctx.exit_code;
}

}  // namespace qcomm::cli
