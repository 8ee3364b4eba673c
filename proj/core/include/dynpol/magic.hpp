#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dynpol/polarizability.hpp"

namespace dynpol {

struct MagicOptions {
  double margin_cm1 = 50.0;  // resonance exclusion margin
  double tol_root = 1e-3;    // a.u.
  double tol_graze = 1.0;    // a.u.; |Delta| minima below this without a sign change
  int max_bisections = 200;
};

struct MagicRoot {
  double omega_cm1 = 0.0;
  double alpha = 0.0;             // Re alpha_mol at the root, a.u.
  double alpha_slope_diff = 0.0;  // d(Delta)/d(omega), a.u. per cm^-1
  double delta = 0.0;             // residual Re alpha_mol - Re alpha_ref
  bool clean = false;
};

/// Consecutive grid points with |Delta| < tol_root (degenerate coincidence).
struct MagicInterval {
  double lo_cm1 = 0.0;
  double hi_cm1 = 0.0;
  bool clean = false;
};

struct GrazingPoint {
  double omega_cm1 = 0.0;
  double delta = 0.0;
  bool clean = false;
};

/// Sign change of Delta that bisection pins to a divergence rather than a zero.
struct PoleCrossing {
  double omega_cm1 = 0.0;
  double delta = 0.0;
};

struct ClosestApproach {
  double omega_cm1 = 0.0;
  double delta = 0.0;
  double alpha_mol = 0.0;
  double alpha_ref = 0.0;
  bool outside_zones = true;  // false when every grid point lies in a resonance zone
};

struct MagicReport {
  std::vector<MagicRoot> roots;
  std::vector<MagicInterval> intervals;
  std::vector<GrazingPoint> grazing;
  std::vector<PoleCrossing> poles;
  std::optional<ClosestApproach> closest;
  double search_lo_cm1 = 0.0;
  double search_hi_cm1 = 0.0;
  std::string molecule_descriptor;
  std::string reference_descriptor;
  MagicOptions options;
  bool refined = true;  // false when a spectrum carried no evaluator

  std::size_t clean_root_count() const;
};

/// Roots of Delta(omega) = Re alpha_mol - Re alpha_ref over the shared grid.
/// Throws DomainError when the grids differ.
MagicReport find_magic(const PolarizabilitySpectrum& mol, const PolarizabilitySpectrum& ref,
                       const MagicOptions& options = {});

/// Key-value records, one line per root, interval, grazing point, pole and the closest approach.
void write_magic_report(std::ostream& out, const MagicReport& report);

struct StarkSplitting {
  std::vector<int> m;             // 0, 1, ..., J (shifts depend on |M| only)
  std::vector<double> alpha;      // Re alpha_rotational per |M|, a.u.
  std::vector<double> shift_hz;   // trap depth per |M|
  double total_splitting_hz = 0.0;  // max - min
  double isotropic_shift_hz = 0.0;  // shift of the M-averaged state
  double mean_shift_hz = 0.0;       // (2J+1)-weighted mean of the sublevel shifts
};

StarkSplitting stark_splitting(const TransitionTable& table, int j, double omega,
                               double intensity_w_cm2);
/// Same, from precomputed real parallel and perpendicular components.
StarkSplitting stark_splitting(double alpha_parallel, double alpha_perpendicular, int j,
                               double intensity_w_cm2);

}  // namespace dynpol
