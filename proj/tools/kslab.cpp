#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kslab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Radial chemotaxis with indirect signal production"};
  std::string mode;
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  app.add_option("mode", mode, "simulate|simulate-mass|certify|build-data|sweep|constants")
      ->required()
      ->check(CLI::IsMember(
          {"simulate", "simulate-mass", "certify", "build-data", "sweep", "constants"}));
  app.add_option("--config,-c", config, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--out,-o", out, "output directory");
  app.add_option("--set,-s", sets, "override, key=value (repeatable)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kslab::kExitConfig;
  }
  std::optional<std::filesystem::path> cfg_path;
  if (!config.empty()) cfg_path = config;
  std::optional<std::filesystem::path> out_dir;
  if (!out.empty()) out_dir = out;
  return kslab::run_command(mode, cfg_path, sets, out_dir, std::cout, std::cerr);
}
