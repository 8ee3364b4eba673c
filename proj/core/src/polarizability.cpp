#include "dynpol/polarizability.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <thread>

#include "dynpol/error.hpp"
#include "dynpol/table_io.hpp"

namespace dynpol {

namespace {

void check_omega(double omega) {
  if (!std::isfinite(omega)) throw DomainError("non-finite frequency");
}

int lambda_of(const VibrationalSolution& sol, const std::string& label) {
  const auto idx = sol.channel_index(label);
  return idx ? sol.channels()[*idx].state.lambda : -1;
}

double parse_gamma(double value, const std::string& unit) {
  if (unit == "hartree") return value;
  if (unit == "MHz") return 2.0 * std::numbers::pi * value * 1e6 * constants::atomic_time_s;
  throw ParseError("unknown gamma_unit '" + unit + "'", 0);
}

}  // namespace

Complex sum_over_states_term(double omega_if, double gamma, double d2, double omega) {
  if (gamma == 0.0 && omega == omega_if) {
    throw PoleError("frequency sits on an undamped transition at " + format_double(omega_if) +
                    " hartree");
  }
  const Complex z(omega_if, -0.5 * gamma);
  // (z - w)(z + w) keeps the near-resonant difference exact
  return 2.0 * z * d2 / ((z - omega) * (z + omega));
}

// ---- TransitionTable --------------------------------------------------------

TransitionTable::TransitionTable(std::vector<TransitionRow> rows) : rows_(std::move(rows)) {
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    const auto& r = rows_[k];
    if (!(r.omega > 0.0) || !std::isfinite(r.omega)) {
      throw InvariantError("transition row " + std::to_string(k) + ": omega must be > 0");
    }
    if (!(r.gamma >= 0.0) || !std::isfinite(r.gamma)) {
      throw InvariantError("transition row " + std::to_string(k) + ": gamma must be >= 0");
    }
    if (!(r.d2 >= 0.0) || !std::isfinite(r.d2)) {
      throw InvariantError("transition row " + std::to_string(k) + ": d2 must be >= 0");
    }
  }
  std::stable_sort(rows_.begin(), rows_.end(),
                   [](const TransitionRow& a, const TransitionRow& b) { return a.omega < b.omega; });
}

double TransitionTable::total_d2(Orientation o) const {
  double s = 0.0;
  for (const auto& r : rows_) {
    if (r.orientation == o) s += r.d2;
  }
  return s;
}

TransitionTable build_table(const VibrationalSolution& initial, std::size_t v_i,
                            std::span<const ExcitedSystem> excited, const TableOptions& options) {
  if (v_i >= initial.level_count()) throw DomainError("initial level out of range");
  if (options.d2_cutoff < 0.0) throw DomainError("d2 cutoff must be >= 0");
  const double e_i = initial.energy(v_i);
  std::vector<TransitionRow> rows;
  std::size_t dropped = 0;
  for (const auto& sys : excited) {
    if (sys.solution == nullptr || sys.dipole == nullptr) {
      throw DomainError("excited system without solution or dipole");
    }
    if (!(sys.gamma >= 0.0)) throw DomainError("gamma must be >= 0");
    const auto& sol = *sys.solution;
    const auto& dip = *sys.dipole;
    int li = lambda_of(initial, dip.from_label());
    int lf = lambda_of(sol, dip.to_label());
    if (li < 0 || lf < 0) {
      li = lambda_of(initial, dip.to_label());
      lf = lambda_of(sol, dip.from_label());
    }
    if (li >= 0 && lf >= 0) dip.check_orientation(li, lf);

    const Eigen::VectorXd tdm = vibronic_tdm_row(initial, v_i, dip, sol);
    const std::string label = sol.channel_count() == 1
                                  ? sol.channels()[0].state.label
                                  : sol.channels()[0].state.label + "/" + sol.channels()[1].state.label;
    for (std::size_t f = 0; f < sol.level_count(); ++f) {
      if (!options.include_continuum && sol.energy(f) >= sol.threshold()) continue;
      const double d2 = tdm[static_cast<Eigen::Index>(f)] * tdm[static_cast<Eigen::Index>(f)];
      if (d2 < options.d2_cutoff || d2 == 0.0) continue;
      const double w = sol.energy(f) - e_i;
      if (!(w > 0.0)) {
        ++dropped;
        continue;
      }
      rows.push_back({w, sys.gamma, d2, dip.orientation(), label, f});
    }
  }
  TransitionTable table(std::move(rows));
  table.dropped_downward = dropped;
  return table;
}

Complex alpha_component(const TransitionTable& table, Orientation orientation, double omega) {
  check_omega(omega);
  Complex s = 0.0;
  for (const auto& r : table.rows()) {
    if (r.orientation == orientation) s += sum_over_states_term(r.omega, r.gamma, r.d2, omega);
  }
  return s;
}

// ---- rotational states ------------------------------------------------------

RotationalState RotationalState::level(int j, int m) {
  if (j < 0) throw DomainError("J must be >= 0");
  if (std::abs(m) > j) throw DomainError("|M| must not exceed J");
  RotationalState s;
  s.j_ = j;
  s.m_ = m;
  s.isotropic_ = false;
  return s;
}

std::string RotationalState::describe() const {
  if (isotropic_) return "isotropic";
  return "J=" + std::to_string(j_) + ":M=" + std::to_string(m_);
}

RotationalWeights rotational_weights(const RotationalState& state) {
  if (state.is_isotropic()) return {1, 2, 3};
  const long long j = state.j(), m = state.m();
  RotationalWeights w;
  w.par_num = 2 * j * j + 2 * j - 1 - 2 * m * m;
  w.perp_num = 2 * j * j + 2 * j - 2 + 2 * m * m;
  w.den = (2 * j + 3) * (2 * j - 1);
  if (w.den < 0) {
    w.par_num = -w.par_num;
    w.perp_num = -w.perp_num;
    w.den = -w.den;
  }
  return w;
}

Complex combine_rotational(Complex alpha_parallel, Complex alpha_perpendicular,
                           const RotationalState& state) {
  const auto w = rotational_weights(state);
  return w.parallel() * alpha_parallel + w.perpendicular() * alpha_perpendicular;
}

Complex alpha_rotational(const TransitionTable& table, const RotationalState& state, double omega) {
  return combine_rotational(alpha_component(table, Orientation::parallel, omega),
                            alpha_component(table, Orientation::perpendicular, omega), state);
}

// ---- atoms ------------------------------------------------------------------

void AtomicModel::validate() const {
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto& l = lines[k];
    if (!(l.omega > 0.0) || !(l.gamma >= 0.0) || !(l.d2 >= 0.0)) {
      throw InvariantError("atomic line " + std::to_string(k) +
                           " needs omega > 0, gamma >= 0, d2 >= 0");
    }
  }
  if (!std::isfinite(alpha_core) || !std::isfinite(alpha_core_valence)) {
    throw InvariantError("non-finite core polarizability");
  }
}

AtomicModel load_atomic_model(std::istream& in) {
  const TableFile t = read_table(in);
  if (t.get("kind").value_or("atomic_lines") != "atomic_lines") {
    throw ParseError("expected kind=atomic_lines", 1);
  }
  const Unit omega_unit = parse_unit(t.get("unit_omega").value_or("cm-1"), Kind::energy);
  const std::string dipole_kind = t.get("dipole").value_or("d2");
  if (dipole_kind != "d2" && dipole_kind != "reduced") {
    throw ParseError("dipole must be d2 or reduced", 1);
  }
  const double j_lower = std::stod(t.get("j_lower").value_or("0.5"));
  const std::string gamma_unit = t.get("gamma_unit").value_or("hartree");

  AtomicModel m;
  m.alpha_core = std::stod(t.get("alpha_core").value_or("0"));
  m.alpha_core_valence = std::stod(t.get("alpha_core_valence").value_or("0"));
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    if (t.rows[k].size() < 2) throw ParseError("atomic line needs omega and dipole", t.row_lines[k]);
    AtomicLine l;
    l.omega = convert({t.number(k, 0), omega_unit}, Unit::hartree).value;
    const double d = t.number(k, 1);
    l.d2 = dipole_kind == "d2" ? d : d * d / (3.0 * (2.0 * j_lower + 1.0));
    l.gamma = t.rows[k].size() > 2 ? parse_gamma(t.number(k, 2), gamma_unit)
                                    : constants::default_gamma_hartree;
    m.lines.push_back(l);
  }
  m.validate();
  return m;
}

AtomicModel load_atomic_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return load_atomic_model(in);
}

Complex alpha_valence(const AtomicModel& model, double omega) {
  check_omega(omega);
  Complex s = 0.0;
  for (const auto& l : model.lines) s += sum_over_states_term(l.omega, l.gamma, l.d2, omega);
  return s;
}

Complex alpha_atomic(const AtomicModel& model, double omega) {
  return alpha_valence(model, omega) + model.alpha_core + model.alpha_core_valence;
}

Complex pair_alpha(const AtomicModel& model, double omega) { return 2.0 * alpha_atomic(model, omega); }

// ---- scans ------------------------------------------------------------------

bool PolarizabilitySpectrum::in_zone(double w) const {
  return std::any_of(resonance_zones.begin(), resonance_zones.end(),
                     [w](const ZoneInterval& z) { return w >= z.lo && w <= z.hi; });
}

double PolarizabilitySpectrum::zone_distance(double w) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : resonance_zones) {
    const double d = w < z.lo ? z.lo - w : (w > z.hi ? w - z.hi : 0.0);
    best = std::min(best, d);
  }
  return best;
}

double default_scan_step() { return cm1_to_hartree(0.0125); }

std::vector<ZoneInterval> resonance_zones(std::span<const double> omega,
                                          std::span<const Complex> alpha, double factor) {
  if (omega.size() != alpha.size()) throw DomainError("omega/alpha size mismatch");
  std::vector<ZoneInterval> zones;
  const std::size_t n = omega.size();
  if (n == 0) return zones;
  std::vector<double> im(n);
  for (std::size_t k = 0; k < n; ++k) im[k] = std::abs(alpha[k].imag());
  std::vector<double> sorted = im;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
  const double threshold = factor * sorted[n / 2];
  // each run of flagged points is padded by one grid step on both sides
  std::size_t k = 0;
  while (k < n) {
    if (!(im[k] > threshold)) {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e + 1 < n && im[e + 1] > threshold) ++e;
    const double lo = omega[k > 0 ? k - 1 : 0];
    const double hi = omega[e + 1 < n ? e + 1 : e];
    if (!zones.empty() && lo <= zones.back().hi) {
      zones.back().hi = hi;
    } else {
      zones.push_back({lo, hi});
    }
    k = e + 1;
  }
  return zones;
}

PolarizabilitySpectrum scan(AlphaFunction fn, double omega_lo, double omega_hi, double step,
                            std::string descriptor, const ScanOptions& options) {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("scan step must be > 0");
  if (!(omega_hi >= omega_lo) || !std::isfinite(omega_lo) || !std::isfinite(omega_hi)) {
    throw DomainError("scan bounds must satisfy lo <= hi");
  }
  const double span = (omega_hi - omega_lo) / step;
  if (span + 1.0 > static_cast<double>(options.max_points)) {
    throw DomainError("scan would need " + format_double(std::floor(span) + 1.0) +
                      " points (limit " + std::to_string(options.max_points) + ")");
  }
  const auto n = static_cast<std::size_t>(std::floor(span * (1.0 + 1e-12))) + 1;

  PolarizabilitySpectrum s;
  s.step = step;
  s.state_descriptor = std::move(descriptor);
  s.omega.resize(n);
  s.alpha.resize(n);
  for (std::size_t k = 0; k < n; ++k) s.omega[k] = omega_lo + static_cast<double>(k) * step;

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (std::size_t k = 0; k < n; ++k) s.alpha[k] = fn(s.omega[k]);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          const std::size_t b = t * chunk, e = std::min(n, b + chunk);
          for (std::size_t k = b; k < e; ++k) s.alpha[k] = fn(s.omega[k]);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  s.resonance_zones = resonance_zones(s.omega, s.alpha, options.zone_factor);
  s.evaluate = std::move(fn);
  return s;
}

PolarizabilitySpectrum scan(const TransitionTable& table, const RotationalState& state,
                            double omega_lo, double omega_hi, double step, const ScanOptions& options) {
  auto shared = std::make_shared<const TransitionTable>(table);
  AlphaFunction fn = [shared, state](double w) { return alpha_rotational(*shared, state, w); };
  return scan(std::move(fn), omega_lo, omega_hi, step, "molecule:" + state.describe(), options);
}

PolarizabilitySpectrum scan_pair(const AtomicModel& model, double omega_lo, double omega_hi,
                                 double step, const ScanOptions& options) {
  model.validate();
  auto shared = std::make_shared<const AtomicModel>(model);
  AlphaFunction fn = [shared](double w) { return pair_alpha(*shared, w); };
  return scan(std::move(fn), omega_lo, omega_hi, step, "atom_pair", options);
}

void write_spectrum(std::ostream& out, const PolarizabilitySpectrum& spectrum) {
  std::map<std::string, std::string> h{
      {"kind", "spectrum"},
      {"state", spectrum.state_descriptor},
      {"points", std::to_string(spectrum.omega.size())},
      {"step_cm1", format_double(hartree_to_cm1(spectrum.step))},
      {"resonance_zones", std::to_string(spectrum.resonance_zones.size())},
  };
  if (!spectrum.omega.empty()) {
    h["omega_lo_cm1"] = format_double(hartree_to_cm1(spectrum.omega.front()));
    h["omega_hi_cm1"] = format_double(hartree_to_cm1(spectrum.omega.back()));
  }
  const std::vector<std::string> order{"kind", "state", "omega_lo_cm1", "omega_hi_cm1",
                                       "step_cm1", "points", "resonance_zones"};
  const std::vector<std::string> cols{"omega_cm1", "re_alpha_au", "im_alpha_au", "in_resonance_zone"};
  std::vector<std::vector<std::string>> rows;
  rows.reserve(spectrum.omega.size());
  for (std::size_t k = 0; k < spectrum.omega.size(); ++k) {
    rows.push_back({format_double(hartree_to_cm1(spectrum.omega[k])),
                    format_double(spectrum.alpha[k].real()), format_double(spectrum.alpha[k].imag()),
                    spectrum.in_zone(spectrum.omega[k]) ? "1" : "0"});
  }
  write_table(out, h, cols, rows, order);
}

void write_transition_table(std::ostream& out, const TransitionTable& table) {
  const std::map<std::string, std::string> h{{"kind", "transition_table"},
                                             {"unit_omega", "hartree"},
                                             {"rows", std::to_string(table.size())}};
  const std::vector<std::string> order{"kind", "unit_omega", "rows"};
  const std::vector<std::string> cols{"omega", "gamma", "d2", "orientation", "excited", "v_f"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : table.rows()) {
    rows.push_back({format_double(r.omega), format_double(r.gamma), format_double(r.d2),
                    std::string(to_string(r.orientation)), r.excited_label.empty() ? "-" : r.excited_label,
                    std::to_string(r.v_f)});
  }
  write_table(out, h, cols, rows, order);
}

TransitionTable load_transition_table(std::istream& in) {
  const TableFile t = read_table(in);
  if (t.get("kind").value_or("transition_table") != "transition_table") {
    throw ParseError("expected kind=transition_table", 1);
  }
  const Unit u = parse_unit(t.get("unit_omega").value_or("hartree"), Kind::energy);
  const std::string gamma_unit = t.get("gamma_unit").value_or("hartree");
  std::vector<TransitionRow> rows;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& f = t.rows[k];
    if (f.size() < 4) {
      throw ParseError("transition row needs omega, gamma, d2, orientation", t.row_lines[k]);
    }
    TransitionRow r;
    r.omega = convert({t.number(k, 0), u}, Unit::hartree).value;
    r.gamma = parse_gamma(t.number(k, 1), gamma_unit);
    r.d2 = t.number(k, 2);
    try {
      r.orientation = parse_orientation(f[3]);
    } catch (const Error& e) {
      throw ParseError(e.what(), t.row_lines[k]);
    }
    if (f.size() > 4 && f[4] != "-") r.excited_label = f[4];
    if (f.size() > 5) r.v_f = static_cast<std::size_t>(t.number(k, 5));
    rows.push_back(std::move(r));
  }
  return TransitionTable(std::move(rows));
}

TransitionTable load_transition_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return load_transition_table(in);
}

}  // namespace dynpol
