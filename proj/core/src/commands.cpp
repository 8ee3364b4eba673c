#include <algorithm>
#include <deque>
#include <limits>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "dynpol/cli.hpp"
#include "dynpol/error.hpp"
#include "dynpol/table_io.hpp"

namespace dynpol::cli {

namespace {

struct SolvedSystem {
  std::string name;
  std::deque<PotentialCurve> potentials;
  std::optional<SpinOrbitFunction> spin_orbit;
  std::optional<VibrationalSolution> solution;
};

struct AlphaSource {
  AlphaFunction fn;
  std::string descriptor;
  std::shared_ptr<const TransitionTable> table;
};

class Pipeline {
 public:
  Pipeline(const RunConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log) {}

  SolvedSystem& system(const std::string& name) {
    load_all();
    for (auto& s : systems_) {
      if (s.name != name) continue;
      if (!s.solution) solve(s);
      return s;
    }
    throw ConfigError("unknown system '" + name + "'");
  }

  std::deque<SolvedSystem>& all() {
    for (const auto& sc : cfg_.systems) system(sc.name);
    return systems_;
  }

  AlphaSource source(const SourceConfig& src) {
    if (src.kind == "atom" || src.kind == "pair") {
      auto model = std::make_shared<const AtomicModel>(load_atomic_model(*cfg_.atomic_model));
      if (src.kind == "atom") return {[model](double w) { return alpha_atomic(*model, w); }, "atom", nullptr};
      return {[model](double w) { return pair_alpha(*model, w); }, "atom_pair", nullptr};
    }
    std::shared_ptr<const TransitionTable> table;
    RotationalState state = cfg_.state;
    std::string descriptor;
    if (src.kind == "table") {
      table = std::make_shared<const TransitionTable>(load_transition_table(src.path));
      descriptor = "table:" + state.describe();
    } else if (src.kind == "systems" || src.kind == "highest_bound") {
      const auto& init = *system(cfg_.initial_system).solution;
      std::size_t v = cfg_.v_i;
      if (src.kind == "highest_bound") {
        if (init.bound_count() == 0) throw DomainError("system " + cfg_.initial_system + " has no bound level");
        v = init.bound_count() - 1;
        state = RotationalState::level(0, 0);
      }
      table = std::make_shared<const TransitionTable>(build(init, v));
      descriptor = cfg_.initial_system + ":v=" + std::to_string(v) + ":" + state.describe();
    } else {
      throw ConfigError("no molecule source configured");
    }
    return {[table, state](double w) { return alpha_rotational(*table, state, w); }, descriptor, table};
  }

 private:
  void load_all() {
    if (loaded_) return;
    for (const auto& sc : cfg_.systems) {
      SolvedSystem& s = systems_.emplace_back();
      s.name = sc.name;
      for (const auto& p : sc.potentials) s.potentials.push_back(load_potential(p));
      if (sc.spin_orbit) s.spin_orbit = load_spin_orbit(*sc.spin_orbit);
    }
    loaded_ = true;
  }

  double e_max_for(std::span<const PotentialCurve* const> pots) const {
    if (cfg_.e_max) return *cfg_.e_max;
    double e = -std::numeric_limits<double>::infinity();
    for (const auto* p : pots) e = std::max(e, p->dissociation_energy());
    return e;
  }

  void solve(SolvedSystem& s) {
    std::vector<const PotentialCurve*> pots;
    if (cfg_.shared_grid) {
      for (const auto& other : systems_) {
        for (const auto& p : other.potentials) pots.push_back(&p);
      }
    } else {
      for (const auto& p : s.potentials) pots.push_back(&p);
    }
    if (!shared_ || !cfg_.shared_grid) {
      shared_ = build_grid(pots, cfg_.reduced_mass, e_max_for(pots), cfg_.grid);
    }
    const MappedGrid& grid = *shared_;
    if (s.potentials.size() == 1) {
      s.solution = solve_single(s.potentials[0], cfg_.reduced_mass, grid);
    } else {
      s.solution = solve_coupled(s.potentials[0], s.potentials[1], *s.spin_orbit, cfg_.reduced_mass, grid);
    }
    if (grid.inner_extrapolated()) {
      log_ << "note: system " << s.name << " grid reaches below the first potential sample\n";
    }
  }

  TransitionTable build(const VibrationalSolution& init, std::size_t v) {
    std::vector<std::unique_ptr<TransitionDipoleCurve>> dipoles;
    std::vector<ExcitedSystem> ex;
    for (const auto& e : cfg_.excited) {
      dipoles.push_back(std::make_unique<TransitionDipoleCurve>(load_dipole(e.dipole)));
      ex.push_back({&*system(e.system).solution, dipoles.back().get(), e.gamma});
    }
    TableOptions opt;
    opt.d2_cutoff = cfg_.d2_cutoff;
    opt.include_continuum = cfg_.include_continuum;
    TransitionTable t = build_table(init, v, ex, opt);
    if (t.dropped_downward > 0) {
      log_ << "note: " << t.dropped_downward << " downward transitions left out of the table\n";
    }
    return t;
  }

  const RunConfig& cfg_;
  std::ostream& log_;
  std::deque<SolvedSystem> systems_;
  std::optional<MappedGrid> shared_;
  bool loaded_ = false;
};

void write_out(const RunConfig& cfg, const std::string& name, const std::string& contents) {
  fs::create_directories(cfg.output_dir);
  write_file_atomic(cfg.output_dir / name, contents);
}

ScanOptions scan_options(const RunConfig& cfg) {
  ScanOptions o;
  o.zone_factor = cfg.zone_factor;
  o.threads = cfg.threads;
  return o;
}

}  // namespace

std::vector<SystemSummary> cmd_solve(const RunConfig& cfg, std::ostream& log) {
  if (cfg.systems.empty()) throw ConfigError("solve needs at least one system");
  Pipeline p(cfg, log);
  std::vector<SystemSummary> out;
  for (auto& s : p.all()) {
    const auto& sol = *s.solution;
    std::ostringstream lv;
    write_levels(lv, sol, s.name);
    write_out(cfg, "levels_" + s.name + ".dat", lv.str());
    if (cfg.wavefunctions > 0) {
      std::ostringstream wf;
      write_wavefunctions(wf, sol, s.name, std::min(cfg.wavefunctions, sol.level_count()));
      write_out(cfg, "wavefunctions_" + s.name + ".dat", wf.str());
    }
    out.push_back({s.name, sol.bound_count(), sol.level_count(), sol.grid().size()});
    log << "system " << s.name << ": bound_count=" << sol.bound_count()
        << " levels=" << sol.level_count() << " grid_points=" << sol.grid().size() << '\n';
  }
  return out;
}

AlphaReport cmd_alpha(const RunConfig& cfg, double omega, std::ostream& log) {
  Pipeline p(cfg, log);
  const AlphaSource mol = p.source(cfg.molecule);
  AlphaReport r;
  r.omega = omega;
  r.alpha = mol.fn(omega);
  if (cfg.atomic_model) {
    const AtomicModel model = load_atomic_model(*cfg.atomic_model);
    r.atom_alpha = alpha_atomic(model, omega).real();
  }
  const PolarizabilitySpectrum local =
      scan(mol.fn, omega - cfg.alpha_window, omega + cfg.alpha_window, cfg.scan_step, mol.descriptor,
           scan_options(cfg));
  r.resonance = local.in_zone(omega);

  const double k = constants::polarizability_au_in_hz_per_w_cm2;
  std::ostringstream os;
  os << "molecule=" << mol.descriptor << '\n'
     << "omega_cm1=" << format_double(hartree_to_cm1(omega)) << '\n'
     << "omega_hartree=" << format_double(omega) << '\n';
  if (omega > 0.0) os << "wavelength_nm=" << format_double(convert({omega, Unit::hartree}, Unit::nm_photon).value) << '\n';
  os << "re_alpha_au=" << format_double(r.alpha.real()) << '\n'
     << "im_alpha_au=" << format_double(r.alpha.imag()) << '\n'
     << "re_alpha_hz_per_w_cm2=" << format_double(r.alpha.real() * k) << '\n'
     << "im_alpha_hz_per_w_cm2=" << format_double(r.alpha.imag() * k) << '\n'
     << "intensity_w_cm2=" << format_double(cfg.intensity_w_cm2) << '\n'
     << "trap_depth_hz=" << format_double(trap_depth(r.alpha.real(), cfg.intensity_w_cm2).value) << '\n';
  if (omega > 0.0) {
    os << "absorbed_power_w=" << format_double(scattering_power(r.alpha.imag(), omega, cfg.intensity_w_cm2).value) << '\n';
  }
  if (r.atom_alpha) {
    os << "atom_alpha_au=" << format_double(*r.atom_alpha) << '\n'
       << "ratio_to_atom=" << format_double(r.alpha.real() / *r.atom_alpha) << '\n';
  }
  if (mol.table && !cfg.state.is_isotropic() && cfg.molecule.kind != "highest_bound") {
    const StarkSplitting s = stark_splitting(*mol.table, cfg.state.j(), omega, cfg.intensity_w_cm2);
    for (std::size_t i = 0; i < s.m.size(); ++i) {
      os << "alpha_M" << s.m[i] << "_au=" << format_double(s.alpha[i]) << '\n';
    }
    os << "stark_splitting_hz=" << format_double(s.total_splitting_hz) << '\n';
  }
  os << "resonance_warning=" << (r.resonance ? 1 : 0) << '\n';
  write_out(cfg, "alpha_report.txt", os.str());
  log << os.str();
  return r;
}

void cmd_scan(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.has_scan) throw ConfigError("scan needs a scan block");
  Pipeline p(cfg, log);
  const AlphaSource mol = p.source(cfg.molecule);
  PolarizabilitySpectrum s = scan(mol.fn, cfg.scan_lo, cfg.scan_hi, cfg.scan_step, mol.descriptor, scan_options(cfg));
  std::ostringstream os;
  write_spectrum(os, s);
  write_out(cfg, "spectrum_molecule.dat", os.str());
  log << "spectrum_molecule.dat: " << s.omega.size() << " points, " << s.resonance_zones.size()
      << " resonance zones\n";
  if (mol.table) {
    std::ostringstream ts;
    write_transition_table(ts, *mol.table);
    write_out(cfg, "table_molecule.dat", ts.str());
  }
  if (!cfg.reference.kind.empty()) {
    const AlphaSource ref = p.source(cfg.reference);
    PolarizabilitySpectrum r = scan(ref.fn, cfg.scan_lo, cfg.scan_hi, cfg.scan_step, ref.descriptor, scan_options(cfg));
    std::ostringstream rs;
    write_spectrum(rs, r);
    write_out(cfg, "spectrum_reference.dat", rs.str());
    log << "spectrum_reference.dat: " << r.omega.size() << " points, " << r.resonance_zones.size()
        << " resonance zones\n";
  }
}

MagicReport cmd_magic(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.has_scan) throw ConfigError("magic needs a scan block");
  if (cfg.reference.kind.empty()) throw ConfigError("magic needs a reference (or an atomic_model for the pair default)");
  Pipeline p(cfg, log);
  const AlphaSource mol = p.source(cfg.molecule);
  const AlphaSource ref = p.source(cfg.reference);
  const PolarizabilitySpectrum sm = scan(mol.fn, cfg.scan_lo, cfg.scan_hi, cfg.scan_step, mol.descriptor, scan_options(cfg));
  const PolarizabilitySpectrum sr = scan(ref.fn, cfg.scan_lo, cfg.scan_hi, cfg.scan_step, ref.descriptor, scan_options(cfg));
  MagicReport rep = find_magic(sm, sr, cfg.magic);
  std::ostringstream os;
  write_magic_report(os, rep);
  write_out(cfg, "magic_report.txt", os.str());
  log << os.str();
  return rep;
}

int dispatch(const std::string& command, const fs::path& config, const std::optional<std::string>& omega,
             const Overrides& overrides, std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = load_config(config);
    apply(cfg, overrides);
    if (command == "solve") {
      cmd_solve(cfg, out);
    } else if (command == "alpha") {
      if (!omega) throw ConfigError("alpha needs --omega VALUE_UNIT");
      const Quantity q = parse_quantity(*omega);
      if (q.kind() != Kind::energy) throw UnitError("--omega needs a photon energy or wavelength unit");
      cmd_alpha(cfg, convert(q, Unit::hartree).value, out);
    } else if (command == "scan") {
      cmd_scan(cfg, out);
    } else if (command == "magic") {
      cmd_magic(cfg, out);
    } else {
      throw ConfigError("unknown command '" + command + "'");
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const UnitError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dynpol::cli
