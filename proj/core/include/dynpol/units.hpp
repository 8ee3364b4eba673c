#pragma once

#include <string>
#include <string_view>

namespace dynpol {

/// Physical constants and conversion factors. Internally every quantity is held
/// in Hartree atomic units; these are only used at I/O boundaries.
namespace constants {

inline constexpr double hartree_in_cm1 = 219474.6313632;
inline constexpr double speed_of_light = 299792458.0;             // m/s
inline constexpr double hz_per_cm1 = speed_of_light * 100.0;      // Hz per cm^-1
inline constexpr double hartree_in_hz = hartree_in_cm1 * hz_per_cm1;
inline constexpr double bohr_in_nm = 0.0529177210903;
inline constexpr double atomic_time_s = 2.4188843265857e-17;
inline constexpr double planck_h = 6.62607015e-34;                 // J s
inline constexpr double amu_in_me = 1822.888486209;
inline constexpr double debye_in_au = 1.0 / 2.541746473;

/// Light shift per unit polarizability and intensity: 1 a.u. -> Hz/(W/cm^2).
/// Pinned rather than derived so that reported trap depths match the published figures.
inline constexpr double polarizability_au_in_hz_per_w_cm2 = 4.6883572e-2;

/// Default natural width: 10 ns radiative lifetime, gamma = 1/tau in a.u.
inline constexpr double default_lifetime_s = 10e-9;
inline constexpr double default_gamma_hartree = atomic_time_s / default_lifetime_s;

}  // namespace constants

enum class Kind { energy, length, frequency, polarizability, intensity, rate };

enum class Unit {
  // energy
  hartree,
  cm1,
  hz,
  nm_photon,
  // length
  bohr,
  nm,
  // frequency
  freq_hz,
  freq_khz,
  freq_mhz,
  // polarizability
  au_polarizability,
  hz_per_w_cm2,
  // intensity
  w_per_cm2,
  w_per_m2,
  // rate (absorbed power)
  watt,
  erg_per_s,
};

Kind kind_of(Unit unit) noexcept;
std::string_view to_string(Unit unit) noexcept;
std::string_view to_string(Kind kind) noexcept;

/// Parses unit spellings such as "cm-1", "nm", "hartree", "au", "Hz/(W/cm2)".
/// Energy-like spellings win for "Hz"; use "Hz_freq" for the frequency kind.
Unit parse_unit(std::string_view text);

/// As above, but resolves "nm" and "Hz" by the expected kind and rejects other kinds.
Unit parse_unit(std::string_view text, Kind expected);

struct Quantity {
  double value = 0.0;
  Unit unit = Unit::hartree;

  Kind kind() const noexcept { return kind_of(unit); }
};

/// Converts to another unit of the same kind. Throws UnitError on a kind mismatch,
/// and DomainError when the photon-wavelength reciprocal would be taken of zero.
Quantity convert(Quantity q, Unit target);

/// Parses "9394.08cm-1", "1064.5 nm", "0.04 hartree".
Quantity parse_quantity(std::string_view text);

/// Shorthands for the two conversions used everywhere.
inline double cm1_to_hartree(double cm1) { return cm1 / constants::hartree_in_cm1; }
inline double hartree_to_cm1(double eh) { return eh * constants::hartree_in_cm1; }

/// Dipole-trap potential U = -Re(alpha) I / (2 eps0 c), returned as an energy in Hz.
/// Positive Re(alpha) gives an attractive (negative) shift.
Quantity trap_depth(double alpha_real_au, double intensity_w_cm2);

/// Power absorbed by the driven dipole, P = omega Im(alpha) I / (eps0 c), in watts.
/// omega is the photon energy in hartree.
Quantity scattering_power(double alpha_imag_au, double omega_hartree, double intensity_w_cm2);

}  // namespace dynpol
