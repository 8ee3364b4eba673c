#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynpol/curves.hpp"

namespace dynpol {

/// Non-owning view of a potential curve (which must outlive it), continued below its first sample by an exponential wall
/// V = C + A exp(-b (R - R1)) fitted through the innermost three samples.
/// Falls back to a linear continuation when those samples are not a convex, falling wall.
class ExtendedPotential {
 public:
  explicit ExtendedPotential(const PotentialCurve& curve);

  double operator()(double r) const;
  double r_min() const { return curve_->r_min(); }
  double r_max() const { return curve_->r_max(); }
  const PotentialCurve& curve() const { return *curve_; }
  bool exponential_wall() const { return exponential_; }

 private:
  const PotentialCurve* curve_;
  bool exponential_ = false;
  double a_ = 0.0, b_ = 0.0, c_ = 0.0, r1_ = 0.0;
  double slope_ = 0.0;
};

struct GridOptions {
  double beta = 1.4;          // oversampling relative to the local Nyquist spacing
  double e_floor = 0.0;       // hartree; <= 0 selects 0.5 (E_max - V_min)
  double tunnel_depth = 25.0;  // WKB decay (nepers at E_max) kept beyond each turning point
  double inner_limit = 0.5;   // exponential wall allowed down to this fraction of the first sample
  std::optional<double> r_min;  // explicit range, bypassing the turning-point search
  std::optional<double> r_max;
  int aux_points = 20001;
};

/// Non-uniform grid R(x_j), x_j = j, whose local step follows the local de Broglie
/// wavelength of the envelope potential at envelope_energy.
class MappedGrid {
 public:
  MappedGrid() = default;
  MappedGrid(std::vector<double> r, std::vector<double> jacobian, double envelope_energy,
             double beta, double e_floor, bool inner_extrapolated);

  std::size_t size() const { return r_.size(); }
  std::span<const double> r() const { return r_; }
  std::span<const double> jacobian() const { return jacobian_; }
  double envelope_energy() const { return envelope_energy_; }
  double beta() const { return beta_; }
  double e_floor() const { return e_floor_; }
  /// True when the grid reaches below the first tabulated sample of some potential.
  bool inner_extrapolated() const { return inner_extrapolated_; }

  bool operator==(const MappedGrid& other) const { return r_ == other.r_; }

 private:
  std::vector<double> r_;
  std::vector<double> jacobian_;
  double envelope_energy_ = 0.0;
  double beta_ = 1.0;
  double e_floor_ = 0.0;
  bool inner_extrapolated_ = false;
};

/// Local momentum used by the spacing law, sqrt(2 mu K) with
/// K = ((E_max - V) + E_floor + sqrt((E_max - V - E_floor)^2 + E_floor^2)) / 2,
/// a smooth max(E_max - V, E_floor).
double grid_momentum(double v_env, double mu, double e_max, double e_floor);

MappedGrid build_grid(std::span<const PotentialCurve* const> potentials, double mu, double e_max,
                      const GridOptions& options = {});
MappedGrid build_grid(const PotentialCurve& potential, double mu, double e_max,
                      const GridOptions& options = {});
MappedGrid build_grid(const PotentialCurve& a, const PotentialCurve& b, double mu, double e_max,
                      const GridOptions& options = {});

struct ChannelInfo {
  StateLabel state;
  double dissociation = 0.0;
};

/// Eigenpairs of a one- or two-channel mapped-grid Hamiltonian. Every eigenpair of the
/// discrete Hamiltonian is kept (bound levels plus box-discretized continuum) so that
/// closure sums over the full spectrum are exact.
///
/// Wavefunction columns hold phi_j = sqrt(J_j) psi(R_j), channel blocks stacked, so the
/// plain Euclidean product is the radial integral.
class VibrationalSolution {
 public:
  VibrationalSolution(MappedGrid grid, std::vector<ChannelInfo> channels, double reduced_mass,
                      Eigen::VectorXd energies, Eigen::MatrixXd wavefunctions, double threshold);

  const MappedGrid& grid() const { return grid_; }
  const std::vector<ChannelInfo>& channels() const { return channels_; }
  std::size_t channel_count() const { return channels_.size(); }
  std::optional<std::size_t> channel_index(const std::string& label) const;
  double reduced_mass() const { return reduced_mass_; }

  std::size_t level_count() const { return static_cast<std::size_t>(energies_.size()); }
  const Eigen::VectorXd& energies() const { return energies_; }
  double energy(std::size_t v) const;
  /// Full stacked wavefunction of level v.
  Eigen::Ref<const Eigen::VectorXd> wavefunction(std::size_t v) const;
  /// One channel block of level v.
  Eigen::Ref<const Eigen::VectorXd> wavefunction(std::size_t v, std::size_t channel) const;
  double channel_fraction(std::size_t v, std::size_t channel) const;

  /// Levels strictly below the lowest dissociation threshold.
  std::size_t bound_count() const { return bound_count_; }
  double threshold() const { return threshold_; }
  /// Levels below the grid's envelope energy.
  std::size_t envelope_count() const;

  /// Sign changes of the channel-0 wavefunction over points with non-negligible amplitude.
  int node_count(std::size_t v) const;

 private:
  MappedGrid grid_;
  std::vector<ChannelInfo> channels_;
  double reduced_mass_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd wavefunctions_;
  Eigen::MatrixXd fractions_;
  double threshold_;
  std::size_t bound_count_ = 0;
};

/// Mapped-grid kinetic energy matrix, -(1/2mu) J^-1/2 D J^-1 D J^-1/2 with D the
/// periodic Fourier derivative on the uniform x grid.
Eigen::MatrixXd kinetic_matrix(const MappedGrid& grid, double mu);

VibrationalSolution solve_single(const PotentialCurve& potential, double mu, const MappedGrid& grid);

/// Two diabatic channels coupled by W(R): [[T + V_a, W], [W, T + V_b]].
/// A coupling that vanishes on every grid point is solved block by block so the
/// channels stay exactly pure.
VibrationalSolution solve_coupled(const PotentialCurve& pot_a, const PotentialCurve& pot_b,
                                  const SpinOrbitFunction& so, double mu, const MappedGrid& grid);

/// Lower and upper adiabatic curves of a two-channel diabatic system at the points r.
struct AdiabaticCurves {
  std::vector<double> r;
  std::vector<double> lower;
  std::vector<double> upper;
};
AdiabaticCurves adiabatic_curves(const PotentialCurve& pot_a, const PotentialCurve& pot_b,
                                 const SpinOrbitFunction& so, std::span<const double> r);

/// Radial matrix element <v_i| f(R) |v_f> between channel blocks; the two solutions are
/// resampled onto the denser grid when their grids differ.
double radial_matrix_element(const VibrationalSolution& sol_i, std::size_t v_i, std::size_t ch_i,
                             const std::function<double(double)>& f,
                             const VibrationalSolution& sol_f, std::size_t v_f, std::size_t ch_f);

/// <v_i| d(R) |v_f>, contracting the channels named by the dipole's from/to labels.
double vibronic_tdm(const VibrationalSolution& sol_i, std::size_t v_i,
                    const TransitionDipoleCurve& dipole, const VibrationalSolution& sol_f,
                    std::size_t v_f);

/// <v_i| d(R)^2 |v_i> on the channel matching the dipole.
double dipole_squared_expectation(const VibrationalSolution& sol_i, std::size_t v_i,
                                  const TransitionDipoleCurve& dipole);

/// All <v_i| d |f> for every level f of sol_f, in level order.
Eigen::VectorXd vibronic_tdm_row(const VibrationalSolution& sol_i, std::size_t v_i,
                                 const TransitionDipoleCurve& dipole,
                                 const VibrationalSolution& sol_f);

/// Writes energies (hartree and cm^-1), bound flags and channel fractions.
void write_levels(std::ostream& out, const VibrationalSolution& sol, const std::string& label);
/// Writes R, jacobian and the first `levels` wavefunctions psi(R) per channel.
void write_wavefunctions(std::ostream& out, const VibrationalSolution& sol,
                         const std::string& label, std::size_t levels);

}  // namespace dynpol
