#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dynpol/spline.hpp"

namespace dynpol {

enum class Spin { singlet, triplet };
enum class Parity { g, u };
enum class Orientation { parallel, perpendicular };

std::string_view to_string(Spin s) noexcept;
std::string_view to_string(Parity p) noexcept;
std::string_view to_string(Orientation o) noexcept;
Orientation parse_orientation(std::string_view text);

/// Symmetry labels of one electronic state.
struct StateLabel {
  std::string label;
  int lambda = 0;  // 0 = Sigma, 1 = Pi
  Spin spin = Spin::singlet;
  Parity parity = Parity::g;
};

/// Analytic tail D + shift - sum_n C_n / R^n grafted beyond r_match. A cubic slope
/// correction of width blend_width keeps the first derivative continuous at r_match.
struct LongRangeTail {
  double r_match = 0.0;
  std::map<int, double> coefficients;  // n -> C_n, atomic units
  double asymptote = 0.0;              // D before shifting
  double shift = 0.0;
  double slope_jump = 0.0;
  double blend_width = 1.0;
  double cutoff = 200.0;

  double value(double r) const;
  double derivative(double r) const;
};

/// One electronic potential energy curve, canonical units (bohr, hartree).
/// Immutable once built.
class PotentialCurve {
 public:
  /// Validates the samples: finite, strictly increasing R, at least 8 points.
  /// Throws InvariantError naming the offending sample.
  PotentialCurve(StateLabel state, std::vector<double> r, std::vector<double> v,
                 std::optional<double> dissociation_energy = std::nullopt);

  const StateLabel& state() const { return state_; }
  const std::string& label() const { return state_.label; }
  int lambda() const { return state_.lambda; }

  std::span<const double> r() const { return spline_.knots(); }
  std::span<const double> v() const { return spline_.values(); }

  /// Spline value inside the tabulation (or the tail, when extended). Throws
  /// DomainError outside [r_min(), r_max()].
  double value(double r) const;
  double derivative(double r) const;

  double r_min() const { return spline_.front(); }
  /// End of the evaluable support: the tail cutoff if extended, else the last sample.
  double r_max() const { return tail_ ? tail_->cutoff : spline_.back(); }
  double dissociation_energy() const { return dissociation_; }

  const std::optional<LongRangeTail>& tail() const { return tail_; }
  /// Long-range coefficients declared in the file header (not applied until extension).
  const std::map<int, double>& declared_coefficients() const { return declared_cn_; }

  struct Minimum {
    double r;
    double v;
  };
  /// Spline minimum, refined from the lowest sample by golden-section search.
  Minimum minimum() const;

  PotentialCurve with_tail(LongRangeTail tail) const;
  PotentialCurve with_declared_coefficients(std::map<int, double> cn) const;
  /// Same curve, every energy shifted by delta.
  PotentialCurve shifted(double delta) const;

 private:
  StateLabel state_;
  CubicSpline spline_;
  double dissociation_ = 0.0;
  std::optional<LongRangeTail> tail_;
  std::map<int, double> declared_cn_;
};

/// R-dependent electronic transition dipole between two states (a.u.).
class TransitionDipoleCurve {
 public:
  TransitionDipoleCurve(std::string from_label, std::string to_label, Orientation orientation,
                        std::vector<double> r, std::vector<double> d);

  const std::string& from_label() const { return from_; }
  const std::string& to_label() const { return to_; }
  Orientation orientation() const { return orientation_; }
  std::span<const double> r() const { return spline_.knots(); }
  std::span<const double> d() const { return spline_.values(); }

  /// Interpolated value; DomainError outside the tabulation.
  double value(double r) const;
  /// Interpolated value with the end samples continued as constants. Used by the
  /// vibronic integrals, whose grids may reach past the dipole table.
  double value_or_edge(double r) const;
  double r_min() const { return spline_.front(); }
  double r_max() const { return spline_.back(); }

  /// Throws InvariantError unless |delta Lambda| = 0 pairs with parallel and 1 with perpendicular.
  void check_orientation(int lambda_from, int lambda_to) const;

 private:
  std::string from_;
  std::string to_;
  Orientation orientation_;
  CubicSpline spline_;
};

/// Spin-orbit coupling W(R) between two channels (hartree).
class SpinOrbitFunction {
 public:
  SpinOrbitFunction(std::vector<double> r, std::vector<double> w);

  /// Spline value; DomainError outside the tabulation.
  double value(double r) const;
  /// Spline value continued by the end samples outside the tabulation.
  double value_or_edge(double r) const;
  std::span<const double> r() const { return spline_.knots(); }
  std::span<const double> w() const { return spline_.values(); }

 private:
  CubicSpline spline_;
};

enum class CurveSchema { potential, dipole, spin_orbit };
using AnyCurve = std::variant<PotentialCurve, TransitionDipoleCurve, SpinOrbitFunction>;

/// Reads a curve file (see TableFile) and converts to canonical units. Header keys:
/// kind, label, lambda, spin, parity, unit_R, unit_V; dipoles add from, to, orientation;
/// potentials may add dissociation (in unit_V) and C3/C6/C8/C10 (a.u.).
AnyCurve load_curve(const std::filesystem::path& path, CurveSchema schema);
AnyCurve load_curve(std::istream& in, CurveSchema schema);
PotentialCurve load_potential(const std::filesystem::path& path);
TransitionDipoleCurve load_dipole(const std::filesystem::path& path);
SpinOrbitFunction load_spin_orbit(const std::filesystem::path& path);

/// Writes in canonical units with round-trip exact number formatting.
void write_curve(std::ostream& out, const PotentialCurve& curve);
void write_curve(std::ostream& out, const TransitionDipoleCurve& curve);
void write_curve(std::ostream& out, const SpinOrbitFunction& curve);

struct SpliceOptions {
  double blend_width = 0.5;  // bohr
};

/// Replaces base by patch inside [r1, r2]. Inside the window a smoothstep bridge of
/// width blend_width at each edge carries value and slope from one curve to the other.
PotentialCurve splice(const PotentialCurve& base, const PotentialCurve& patch, double r1, double r2,
                      const SpliceOptions& options = {});

struct ExtensionOptions {
  double blend_width = 1.0;  // bohr, slope-matching width beyond r_match
  double cutoff = 200.0;     // bohr, end of the evaluable support
};

struct ExtensionResult {
  PotentialCurve curve;
  double shift = 0.0;  // vertical shift applied to the analytic tail
  std::vector<std::string> warnings;
};

/// Grafts D - sum C_n/R^n (n in {3, 6, 8, 10}) beyond r_match, D being the curve's
/// dissociation energy. The tabulated data is kept; the tail is shifted to meet it.
ExtensionResult extend_long_range(const PotentialCurve& curve, const std::map<int, double>& cn,
                                  double r_match, const ExtensionOptions& options = {});

}  // namespace dynpol
