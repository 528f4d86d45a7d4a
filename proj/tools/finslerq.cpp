// finslerq <experiment> [--config PATH] [--out PATH] [--seed N] [--tol X]
//
// Exit status: 0 pass, 1 fail (or a module error), 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "finslerq/errors.hpp"
#include "finslerq/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using finslerq::Error;
using finslerq::ErrorKind;
namespace ex = finslerq::experiments;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

void add_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--out", flags.out, "JSON record path; CSV tables are written beside it");
  cmd->add_option("--seed", flags.seed, "seed for random sampling");
  cmd->add_option("--tol", flags.tol, "tolerance");
}

json load_config(const Flags& flags, const std::string& command) {
  // Flags first, then the config file on top: the file wins.
  json merged = json::object();
  if (flags.seed) merged["seed"] = *flags.seed;
  if (flags.tol) merged["tol"] = *flags.tol;
  if (!flags.out.empty()) merged["out"] = flags.out;
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    json file;
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::MalformedInput, flags.config + ": " + e.what());
    }
    if (!file.is_object()) throw Error(ErrorKind::MalformedInput, flags.config + ": expected an object");
    merged.update(file);
  }
  if (command != "run") {
    if (merged.contains("experiment-id") && merged["experiment-id"] != command) {
      throw Error(ErrorKind::Usage, "config experiment-id " + merged["experiment-id"].dump() +
                                        " does not match subcommand " + command);
    }
    merged["experiment-id"] = command;
  }
  return merged;
}

void write_outputs(const ex::Result& result, const fs::path& out) {
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream(out) << result.record.dump(2) << '\n';
  for (const auto& table : result.tables) {
    fs::path csv = out;
    csv.replace_filename(out.stem().string() + "." + table.name + ".csv");
    std::ofstream(csv) << ex::to_csv(table);
  }
}

int execute(const std::string& command, const Flags& flags) {
  const json config = load_config(flags, command);
  const auto result = ex::run(config);
  const auto id = result.record["experiment-id"].get<std::string>();
  const std::string out = config.value("out", std::string());
  if (id == "verify") {
    for (const auto& c : result.record["outputs"]["criteria"]) {
      std::cout << (c["pass"].get<bool>() ? "[PASS] " : "[FAIL] ") << c["id"] << ' '
                << c["name"].get<std::string>() << ": " << c["detail"].get<std::string>() << '\n';
    }
  }
  if (!out.empty()) {
    write_outputs(result, out);
    std::cout << id << ": " << result.record["verdict"].get<std::string>() << " (" << out << ")\n";
  } else if (id != "verify") {
    std::cout << result.record.dump(2) << '\n';
  }
  return result.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymmetric distances, Finsler charts and semi-Lipschitz function algebras"};
  app.set_version_flag("--version", std::string(ex::kToolVersion));
  app.require_subcommand(1);

  Flags flags;
  std::string chosen;
  const std::pair<const char*, const char*> commands[] = {
      {"validate", "check quasi-metric or Minkowski-norm axioms"},
      {"distance", "Finsler distances on a chart"},
      {"slip", "semi-Lipschitz constant vs derivative supremum"},
      {"index", "index of symmetry"},
      {"dual-gap", "bracket for the dual norm of a point-evaluation difference"},
      {"isometry", "isometry checks for a map between charts"},
      {"example31", "distances and index decay on the index-zero Randers line"},
      {"example34", "derivative norm comparison and sign obstruction"},
      {"linearity", "linearity verdicts on finite spaces"},
      {"verify", "run the acceptance criteria"},
      {"run", "run the experiment named by the config's experiment-id"},
  };
  for (const auto& [name, help] : commands) {
    auto* cmd = app.add_subcommand(name, help);
    add_flags(cmd, flags);
    cmd->callback([&chosen, name = std::string(name)] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (chosen == "run" && flags.config.empty()) throw Error(ErrorKind::Usage, "run needs --config");
    return execute(chosen, flags);
  } catch (const Error& e) {
    std::cerr << "finslerq: " << e.what() << '\n';
    const bool usage = e.kind() == ErrorKind::Usage || e.kind() == ErrorKind::MalformedInput;
    return usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "finslerq: " << e.what() << '\n';
    return 1;
  }
}
