#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dynpol/magic.hpp"
#include "dynpol/polarizability.hpp"
#include "dynpol/vibsolver.hpp"

namespace dynpol::cli {

namespace fs = std::filesystem;

/// One vibrational system: a single potential, or two potentials coupled by a spin-orbit function.
struct SystemConfig {
  std::string name;
  std::vector<fs::path> potentials;
  std::optional<fs::path> spin_orbit;
};

struct ExcitedConfig {
  std::string system;
  fs::path dipole;
  double gamma = constants::default_gamma_hartree;
};

/// Where a polarizability comes from: systems (solved curves), table (transition table
/// file), atom, pair (2 x atom), highest_bound (top bound level of the ground system).
struct SourceConfig {
  std::string kind;
  fs::path path;
};

struct RunConfig {
  fs::path config_path;
  double reduced_mass = 0.0;  // electron masses
  std::string initial_system;
  std::size_t v_i = 0;
  RotationalState state = RotationalState::isotropic();

  GridOptions grid;
  std::optional<double> e_max;  // hartree; defaults to each system's dissociation threshold
  bool shared_grid = false;

  std::vector<SystemConfig> systems;
  std::vector<ExcitedConfig> excited;
  std::optional<fs::path> atomic_model;
  SourceConfig molecule;
  SourceConfig reference{"pair", {}};  // cleared when no atomic model is configured

  bool has_scan = false;
  double scan_lo = 0.0;  // hartree
  double scan_hi = 0.0;
  double scan_step = default_scan_step();
  double zone_factor = 10.0;
  double alpha_window = cm1_to_hartree(25.0);  // half width of the local zone scan of `alpha`

  MagicOptions magic;
  double intensity_w_cm2 = 1e3;

  fs::path output_dir = "out";
  std::size_t wavefunctions = 0;
  unsigned threads = 1;
  bool include_continuum = false;
  double d2_cutoff = 0.0;
};

/// Parses a JSON run configuration. Relative paths resolve against the config's
/// directory; every referenced file must exist (ConfigError naming the path otherwise).
RunConfig load_config(const fs::path& path);
RunConfig parse_config(const std::string& text, const fs::path& base_dir);

struct Overrides {
  std::optional<fs::path> out;
  std::optional<unsigned> threads;
  bool include_continuum = false;
};
void apply(RunConfig& cfg, const Overrides& o);

struct SystemSummary {
  std::string name;
  std::size_t bound_count = 0;
  std::size_t levels = 0;
  std::size_t grid_points = 0;
};
std::vector<SystemSummary> cmd_solve(const RunConfig& cfg, std::ostream& log);

struct AlphaReport {
  double omega = 0.0;  // hartree
  Complex alpha;
  std::optional<double> atom_alpha;  // Re alpha of one atom, when a model is configured
  bool resonance = false;
};
AlphaReport cmd_alpha(const RunConfig& cfg, double omega, std::ostream& log);
void cmd_scan(const RunConfig& cfg, std::ostream& log);
MagicReport cmd_magic(const RunConfig& cfg, std::ostream& log);

/// Runs one subcommand and maps failures to exit codes: 0 success, 1 computation error,
/// 2 configuration or file error. Messages go to err.
int dispatch(const std::string& command, const fs::path& config, const std::optional<std::string>& omega,
             const Overrides& overrides, std::ostream& out, std::ostream& err);

}  // namespace dynpol::cli
