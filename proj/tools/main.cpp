#include <CLI11.hpp>
#include <iostream>
#include <utility>

#include "dynpol/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dynamic dipole polarizability of diatomic molecules and magic trapping frequencies"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::string> omega;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  bool include_continuum = false;

  const std::pair<const char*, const char*> commands[] = {
      {"solve", "vibrational levels of every configured system"},
      {"alpha", "polarizability, trap depth and Stark splitting at one frequency"},
      {"scan", "polarizability spectrum with resonance zones"},
      {"magic", "frequencies where molecule and reference polarizabilities agree"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "run configuration (JSON)")->required();
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads for scans");
    sub->add_flag("--include-continuum", include_continuum, "keep box-continuum rows in the table");
    if (std::string(name) == "alpha") {
      sub->add_option("--omega", omega, "laser frequency with unit, e.g. 9394.08cm-1 or 1064.5nm")->required();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  dynpol::cli::Overrides o;
  if (out) o.out = std::filesystem::path(*out);
  o.threads = threads;
  o.include_continuum = include_continuum;
  return dynpol::cli::dispatch(app.get_subcommands().front()->get_name(), config, omega, o, std::cout,
                               std::cerr);
}
