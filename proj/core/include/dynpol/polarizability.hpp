#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dynpol/curves.hpp"
#include "dynpol/units.hpp"
#include "dynpol/vibsolver.hpp"

namespace dynpol {

using Complex = std::complex<double>;
using AlphaFunction = std::function<Complex(double omega)>;

/// One term of the sum over states:
///   2 (w_if - i g/2) / ((w_if - i g/2)^2 - w^2) * d2
/// Throws PoleError when g == 0 and w == w_if.
Complex sum_over_states_term(double omega_if, double gamma, double d2, double omega);

struct TransitionRow {
  double omega = 0.0;  // hartree, > 0
  double gamma = 0.0;  // hartree, >= 0
  double d2 = 0.0;     // squared radial dipole, a.u.
  Orientation orientation = Orientation::parallel;
  std::string excited_label;
  std::size_t v_f = 0;
};

/// Flattened line list, sorted by transition energy. Immutable after construction.
class TransitionTable {
 public:
  TransitionTable() = default;
  /// Validates positivity and sorts by omega.
  explicit TransitionTable(std::vector<TransitionRow> rows);

  std::span<const TransitionRow> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  /// Sum of d2 over rows of one orientation.
  double total_d2(Orientation o) const;
  /// Rows with omega <= 0 discarded while building (downward transitions).
  std::size_t dropped_downward = 0;

 private:
  std::vector<TransitionRow> rows_;
};

struct ExcitedSystem {
  const VibrationalSolution* solution = nullptr;
  const TransitionDipoleCurve* dipole = nullptr;
  double gamma = constants::default_gamma_hartree;
};

struct TableOptions {
  double d2_cutoff = 0.0;
  bool include_continuum = false;
};

/// One row per (excited system, level) whose squared vibronic dipole reaches the cutoff.
/// Throws InvariantError when a dipole's orientation contradicts the channels' Lambda.
TransitionTable build_table(const VibrationalSolution& initial, std::size_t v_i,
                            std::span<const ExcitedSystem> excited, const TableOptions& options = {});

/// Parallel or perpendicular polarizability from the rows of that orientation.
Complex alpha_component(const TransitionTable& table, Orientation orientation, double omega);

/// Rotational level (J, M), or the isotropic (M-averaged) state.
class RotationalState {
 public:
  static RotationalState level(int j, int m);
  static RotationalState isotropic() { return RotationalState(); }

  bool is_isotropic() const { return isotropic_; }
  int j() const { return j_; }
  int m() const { return m_; }
  std::string describe() const;

 private:
  RotationalState() = default;
  int j_ = 0;
  int m_ = 0;
  bool isotropic_ = true;
};

/// Exact rational weights of the parallel and perpendicular components:
///   w_par  = (2J^2 + 2J - 1 - 2M^2) / ((2J + 3)(2J - 1))
///   w_perp = (2J^2 + 2J - 2 + 2M^2) / ((2J + 3)(2J - 1))
/// and (1, 2) / 3 for the isotropic state. par_num + perp_num == den always.
struct RotationalWeights {
  long long par_num = 1;
  long long perp_num = 2;
  long long den = 3;
  double parallel() const { return static_cast<double>(par_num) / static_cast<double>(den); }
  double perpendicular() const { return static_cast<double>(perp_num) / static_cast<double>(den); }
};

RotationalWeights rotational_weights(const RotationalState& state);

Complex alpha_rotational(const TransitionTable& table, const RotationalState& state, double omega);
/// Same combination from precomputed components.
Complex combine_rotational(Complex alpha_parallel, Complex alpha_perpendicular,
                           const RotationalState& state);

struct AtomicLine {
  double omega = 0.0;  // hartree
  double gamma = 0.0;  // hartree
  double d2 = 0.0;     // a.u.
};

/// Valence lines plus constant core and core-valence terms.
struct AtomicModel {
  std::vector<AtomicLine> lines;
  double alpha_core = 0.0;
  double alpha_core_valence = 0.0;

  void validate() const;
};

/// Atomic line list file: kind=atomic_lines, columns omega, dipole[, gamma].
/// Header keys: unit_omega (default cm-1), dipole = d2 | reduced (reduced matrix
/// elements are turned into d2 = |D|^2 / (3 (2 j_lower + 1))), j_lower, gamma_unit
/// (hartree | MHz), alpha_core, alpha_core_valence.
AtomicModel load_atomic_model(const std::filesystem::path& path);
AtomicModel load_atomic_model(std::istream& in);

Complex alpha_valence(const AtomicModel& model, double omega);
Complex alpha_atomic(const AtomicModel& model, double omega);
/// Two non-interacting atoms: 2 alpha_atomic.
Complex pair_alpha(const AtomicModel& model, double omega);

struct ZoneInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct PolarizabilitySpectrum {
  std::vector<double> omega;  // hartree, strictly increasing
  std::vector<Complex> alpha;
  std::vector<ZoneInterval> resonance_zones;
  std::string state_descriptor;
  double step = 0.0;
  /// Direct evaluator used for root refinement; may be empty.
  AlphaFunction evaluate;

  bool in_zone(double w) const;
  /// Distance from w to the nearest zone (0 inside one, +inf with no zones).
  double zone_distance(double w) const;
};

struct ScanOptions {
  double zone_factor = 10.0;
  std::size_t max_points = 100'000'000;
  unsigned threads = 1;
};

/// 0.0125 cm^-1, in hartree.
double default_scan_step();

/// Samples fn at lo + k step, k = 0 .. floor((hi - lo)/step), and marks resonance zones
/// where |Im alpha| exceeds zone_factor times the median |Im alpha| of the scan.
PolarizabilitySpectrum scan(AlphaFunction fn, double omega_lo, double omega_hi, double step,
                            std::string descriptor, const ScanOptions& options = {});
PolarizabilitySpectrum scan(const TransitionTable& table, const RotationalState& state,
                            double omega_lo, double omega_hi, double step,
                            const ScanOptions& options = {});
PolarizabilitySpectrum scan_pair(const AtomicModel& model, double omega_lo, double omega_hi,
                                 double step, const ScanOptions& options = {});

/// Zone detection on already sampled data (exposed for tests and re-annotation).
std::vector<ZoneInterval> resonance_zones(std::span<const double> omega,
                                          std::span<const Complex> alpha, double factor);

/// Rows: omega_cm1, re_alpha_au, im_alpha_au, in_resonance_zone.
void write_spectrum(std::ostream& out, const PolarizabilitySpectrum& spectrum);

void write_transition_table(std::ostream& out, const TransitionTable& table);
TransitionTable load_transition_table(const std::filesystem::path& path);
TransitionTable load_transition_table(std::istream& in);

}  // namespace dynpol
