#include <CLI11.hpp>
#include <iostream>

#include "iquad/commands.hpp"
#include "iquad/field_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"iquad: FQPM / iQuad wavefront sensor models, oracles and reconstruction"};
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  std::vector<std::string> overrides;

  app.add_option("command", command, "simulate | verify | reconstruct | compare | scan")
      ->required()
      ->check(CLI::IsMember({"simulate", "verify", "reconstruct", "compare", "scan"}));
  app.add_option("--config", config_path, "flat key=value config file (defaults when omitted)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out, "output directory");
  app.add_option("overrides", overrides, "key=value overrides");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : iquad::kExitUsage;
  }
  seed_set = seed_opt->count() > 0;

  iquad::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = iquad::load_config(config_path);
    for (const auto& o : overrides) iquad::apply_override(cfg, o);
    if (seed_set) cfg.seed = seed;
    if (!out.empty()) cfg.out = out;
    cfg.command = command;
  } catch (const iquad::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return iquad::kExitIo;
  } catch (const iquad::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return iquad::kExitUsage;
  }
  return iquad::run_command(cfg, std::cout, std::cerr);
}
