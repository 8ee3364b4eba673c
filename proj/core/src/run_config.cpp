#include <algorithm>
#include <fstream>
#include <numbers>
#include <json.hpp>
#include <sstream>

#include "dynpol/cli.hpp"
#include "dynpol/error.hpp"

namespace dynpol::cli {

namespace {

using nlohmann::json;

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

fs::path existing(const fs::path& base, const json& j, const std::string& what) {
  if (!j.is_string()) throw ConfigError(what + " must be a path string");
  fs::path p = resolve(base, j.get<std::string>());
  if (!fs::is_regular_file(p)) throw ConfigError(what + ": file not found: " + p.string());
  return p;
}

// numbers are cm^-1; strings carry their unit ("9394.08cm-1", "1064.5nm", "15MHz")
double energy(const json& j, const std::string& what) {
  if (j.is_number()) return cm1_to_hartree(j.get<double>());
  if (!j.is_string()) throw ConfigError(what + " must be a number (cm-1) or a quantity string");
  try {
    const Quantity q = parse_quantity(j.get<std::string>());
    if (q.kind() == Kind::frequency) {
      // a width given as a frequency is read as gamma / 2 pi
      return 2.0 * std::numbers::pi * convert(q, Unit::freq_hz).value * constants::atomic_time_s;
    }
    return convert(q, Unit::hartree).value;
  } catch (const Error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  return j.get<double>();
}

SourceConfig source(const json& j, const fs::path& base, const std::string& what) {
  SourceConfig s;
  if (j.is_string()) {
    s.kind = j.get<std::string>();
  } else if (j.is_object() && j.contains("source")) {
    s.kind = j.at("source").get<std::string>();
    if (j.contains("path")) s.path = existing(base, j.at("path"), what + ".path");
  } else {
    throw ConfigError(what + " must be a source name or {\"source\": ...}");
  }
  static const std::vector<std::string> kinds{"systems", "table", "atom", "pair", "highest_bound"};
  if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end()) {
    throw ConfigError(what + ": unknown source '" + s.kind + "'");
  }
  if (s.kind == "table" && s.path.empty()) throw ConfigError(what + ": table source needs a path");
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("configuration must be an object");
  RunConfig c;
  try {
    if (j.contains("species")) {
      const json& s = j.at("species");
      if (s.contains("reduced_mass_amu")) {
        c.reduced_mass = number(s.at("reduced_mass_amu"), "species.reduced_mass_amu") * constants::amu_in_me;
      } else if (s.contains("reduced_mass_au")) {
        c.reduced_mass = number(s.at("reduced_mass_au"), "species.reduced_mass_au");
      }
      if (s.contains("initial")) c.initial_system = s.at("initial").get<std::string>();
      if (s.contains("v")) c.v_i = s.at("v").get<std::size_t>();
      if (s.contains("J") && !s.value("isotropic", false)) {
        const int jj = s.at("J").get<int>();
        const int m = s.value("M", 0);
        try {
          c.state = RotationalState::level(jj, m);
        } catch (const Error& e) {
          throw ConfigError(std::string("species: ") + e.what());
        }
      }
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      if (g.contains("beta")) c.grid.beta = number(g.at("beta"), "grid.beta");
      if (g.contains("e_floor")) c.grid.e_floor = energy(g.at("e_floor"), "grid.e_floor");
      if (g.contains("e_max")) c.e_max = energy(g.at("e_max"), "grid.e_max");
      if (g.contains("tunnel_depth")) c.grid.tunnel_depth = number(g.at("tunnel_depth"), "grid.tunnel_depth");
      if (g.contains("r_min")) c.grid.r_min = number(g.at("r_min"), "grid.r_min");
      if (g.contains("r_max")) c.grid.r_max = number(g.at("r_max"), "grid.r_max");
      c.shared_grid = g.value("shared", false);
      if (!(c.grid.beta > 0.0)) throw ConfigError("grid.beta must be > 0");
    }
    if (j.contains("systems")) {
      for (const json& s : j.at("systems")) {
        SystemConfig sc;
        sc.name = s.at("name").get<std::string>();
        for (const json& p : s.at("potentials")) {
          sc.potentials.push_back(existing(base_dir, p, "system " + sc.name + " potential"));
        }
        if (sc.potentials.empty() || sc.potentials.size() > 2) {
          throw ConfigError("system " + sc.name + " needs one or two potentials");
        }
        if (s.contains("spin_orbit")) {
          sc.spin_orbit = existing(base_dir, s.at("spin_orbit"), "system " + sc.name + " spin_orbit");
        }
        if (sc.potentials.size() == 2 && !sc.spin_orbit) {
          throw ConfigError("system " + sc.name + " has two potentials but no spin_orbit");
        }
        c.systems.push_back(std::move(sc));
      }
    }
    auto has_system = [&](const std::string& n) {
      return std::any_of(c.systems.begin(), c.systems.end(),
                         [&](const SystemConfig& s) { return s.name == n; });
    };
    if (j.contains("excited")) {
      for (const json& e : j.at("excited")) {
        ExcitedConfig ec;
        ec.system = e.at("system").get<std::string>();
        if (!has_system(ec.system)) throw ConfigError("excited entry names unknown system '" + ec.system + "'");
        if (!e.contains("dipole")) throw ConfigError("excited entry '" + ec.system + "' has no dipole curve");
        ec.dipole = existing(base_dir, e.at("dipole"), "excited " + ec.system + " dipole");
        if (e.contains("gamma")) ec.gamma = energy(e.at("gamma"), "excited " + ec.system + " gamma");
        if (!(ec.gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
        c.excited.push_back(std::move(ec));
      }
    }
    if (!c.systems.empty()) {
      if (c.initial_system.empty()) c.initial_system = c.systems.front().name;
      if (!has_system(c.initial_system)) {
        throw ConfigError("species.initial names unknown system '" + c.initial_system + "'");
      }
      if (!(c.reduced_mass > 0.0)) throw ConfigError("species needs a positive reduced mass");
    }
    if (j.contains("atomic_model")) c.atomic_model = existing(base_dir, j.at("atomic_model"), "atomic_model");

    c.molecule = j.contains("molecule") ? source(j.at("molecule"), base_dir, "molecule")
                                        : SourceConfig{c.systems.empty() ? "" : "systems", {}};
    if (j.contains("reference")) {
      c.reference = source(j.at("reference"), base_dir, "reference");
    } else if (!c.atomic_model) {
      c.reference.kind.clear();
    }
    for (const SourceConfig* s : {&c.molecule, &c.reference}) {
      if ((s->kind == "atom" || s->kind == "pair") && !c.atomic_model) {
        throw ConfigError("source '" + s->kind + "' needs atomic_model");
      }
      if ((s->kind == "systems" || s->kind == "highest_bound") && c.systems.empty()) {
        throw ConfigError("source '" + s->kind + "' needs systems");
      }
    }

    if (j.contains("scan")) {
      const json& s = j.at("scan");
      c.has_scan = true;
      c.scan_lo = energy(s.at("lo"), "scan.lo");
      c.scan_hi = energy(s.at("hi"), "scan.hi");
      if (c.scan_lo > c.scan_hi) std::swap(c.scan_lo, c.scan_hi);  // wavelengths invert order
      if (s.contains("step")) c.scan_step = energy(s.at("step"), "scan.step");
      if (s.contains("zone_factor")) c.zone_factor = number(s.at("zone_factor"), "scan.zone_factor");
      if (!(c.scan_step > 0.0)) throw ConfigError("scan.step must be > 0");
    }
    if (j.contains("alpha_window")) c.alpha_window = energy(j.at("alpha_window"), "alpha_window");
    if (j.contains("magic")) {
      const json& m = j.at("magic");
      if (m.contains("margin")) c.magic.margin_cm1 = hartree_to_cm1(energy(m.at("margin"), "magic.margin"));
      if (m.contains("tol_root")) c.magic.tol_root = number(m.at("tol_root"), "magic.tol_root");
      if (m.contains("tol_graze")) c.magic.tol_graze = number(m.at("tol_graze"), "magic.tol_graze");
    }
    if (j.contains("intensity")) {
      const json& i = j.at("intensity");
      c.intensity_w_cm2 = i.is_number() ? i.get<double>()
                                        : convert(parse_quantity(i.get<std::string>()), Unit::w_per_cm2).value;
    }
    if (j.contains("output")) {
      const json& o = j.at("output");
      if (o.contains("directory")) c.output_dir = resolve(base_dir, o.at("directory").get<std::string>());
      c.wavefunctions = o.value("wavefunctions", std::size_t{0});
    } else {
      c.output_dir = base_dir / "out";
    }
    c.threads = j.value("threads", 1u);
    c.include_continuum = j.value("include_continuum", false);
    c.d2_cutoff = j.value("d2_cutoff", 0.0);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  } catch (const UnitError& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig c = parse_config(ss.str(), fs::absolute(path).parent_path());
  c.config_path = path;
  return c;
}

void apply(RunConfig& cfg, const Overrides& o) {
  if (o.out) cfg.output_dir = *o.out;
  if (o.threads) cfg.threads = std::max(1u, *o.threads);
  if (o.include_continuum) cfg.include_continuum = true;
}

}  // namespace dynpol::cli
