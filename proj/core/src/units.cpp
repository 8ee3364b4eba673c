#include "dynpol/units.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "dynpol/error.hpp"

namespace dynpol {

namespace {

// Factor f such that value_in_base = value * f, for the linear units of each kind.
// Bases: hartree, bohr, Hz, a.u. polarizability, W/cm^2, W.
double to_base_factor(Unit u) {
  using namespace constants;
  switch (u) {
    case Unit::hartree: return 1.0;
    case Unit::cm1: return 1.0 / hartree_in_cm1;
    case Unit::hz: return 1.0 / hartree_in_hz;
    case Unit::bohr: return 1.0;
    case Unit::nm: return 1.0 / bohr_in_nm;
    case Unit::freq_hz: return 1.0;
    case Unit::freq_khz: return 1e3;
    case Unit::freq_mhz: return 1e6;
    case Unit::au_polarizability: return 1.0;
    case Unit::hz_per_w_cm2: return 1.0 / polarizability_au_in_hz_per_w_cm2;
    case Unit::w_per_cm2: return 1.0;
    case Unit::w_per_m2: return 1e-4;
    case Unit::watt: return 1.0;
    case Unit::erg_per_s: return 1e-7;
    case Unit::nm_photon: break;
  }
  return 0.0;
}

// lambda[nm] = 1e7 / E[cm^-1]
double photon_nm_to_hartree(double nm) {
  if (nm == 0.0) throw DomainError("photon wavelength of zero has no finite energy");
  return 1e7 / nm / constants::hartree_in_cm1;
}

double hartree_to_photon_nm(double eh) {
  if (eh == 0.0) throw DomainError("zero photon energy has no finite wavelength");
  return 1e7 / (eh * constants::hartree_in_cm1);
}

std::string normalize(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

Kind kind_of(Unit unit) noexcept {
  switch (unit) {
    case Unit::hartree:
    case Unit::cm1:
    case Unit::hz:
    case Unit::nm_photon: return Kind::energy;
    case Unit::bohr:
    case Unit::nm: return Kind::length;
    case Unit::freq_hz:
    case Unit::freq_khz:
    case Unit::freq_mhz: return Kind::frequency;
    case Unit::au_polarizability:
    case Unit::hz_per_w_cm2: return Kind::polarizability;
    case Unit::w_per_cm2:
    case Unit::w_per_m2: return Kind::intensity;
    case Unit::watt:
    case Unit::erg_per_s: return Kind::rate;
  }
  return Kind::energy;
}

std::string_view to_string(Unit unit) noexcept {
  switch (unit) {
    case Unit::hartree: return "hartree";
    case Unit::cm1: return "cm-1";
    case Unit::hz: return "Hz";
    case Unit::nm_photon: return "nm-photon";
    case Unit::bohr: return "bohr";
    case Unit::nm: return "nm";
    case Unit::freq_hz: return "Hz_freq";
    case Unit::freq_khz: return "kHz";
    case Unit::freq_mhz: return "MHz";
    case Unit::au_polarizability: return "au";
    case Unit::hz_per_w_cm2: return "Hz/(W/cm2)";
    case Unit::w_per_cm2: return "W/cm2";
    case Unit::w_per_m2: return "W/m2";
    case Unit::watt: return "W";
    case Unit::erg_per_s: return "erg/s";
  }
  return "?";
}

std::string_view to_string(Kind kind) noexcept {
  switch (kind) {
    case Kind::energy: return "energy";
    case Kind::length: return "length";
    case Kind::frequency: return "frequency";
    case Kind::polarizability: return "polarizability";
    case Kind::intensity: return "intensity";
    case Kind::rate: return "rate";
  }
  return "?";
}

Unit parse_unit(std::string_view text) {
  const std::string s = normalize(text);
  if (s == "hartree" || s == "eh" || s == "ha") return Unit::hartree;
  if (s == "cm-1" || s == "cm^-1" || s == "cm1" || s == "1/cm") return Unit::cm1;
  if (s == "hz") return Unit::hz;
  if (s == "nm-photon" || s == "nm_photon") return Unit::nm_photon;
  if (s == "bohr" || s == "a0") return Unit::bohr;
  if (s == "nm-length" || s == "nm_length") return Unit::nm;
  if (s == "hz_freq" || s == "hz-freq") return Unit::freq_hz;
  if (s == "khz") return Unit::freq_khz;
  if (s == "mhz") return Unit::freq_mhz;
  if (s == "au" || s == "a.u." || s == "au_polarizability") return Unit::au_polarizability;
  if (s == "hz/(w/cm2)" || s == "hz/(w/cm^2)" || s == "hz/w/cm2") return Unit::hz_per_w_cm2;
  if (s == "w/cm2" || s == "w/cm^2") return Unit::w_per_cm2;
  if (s == "w/m2" || s == "w/m^2") return Unit::w_per_m2;
  if (s == "w") return Unit::watt;
  if (s == "erg/s") return Unit::erg_per_s;
  // A bare "nm" on a frequency-like input means a photon wavelength; lengths use "nm-length".
  if (s == "nm") return Unit::nm_photon;
  throw UnitError("unknown unit '" + std::string(text) + "'");
}

Unit parse_unit(std::string_view text, Kind expected) {
  const std::string s = normalize(text);
  Unit u;
  if (s == "nm" && expected == Kind::length) {
    u = Unit::nm;
  } else if (s == "hz" && expected == Kind::frequency) {
    u = Unit::freq_hz;
  } else {
    u = parse_unit(text);
  }
  if (kind_of(u) != expected) {
    throw UnitError("unit '" + std::string(text) + "' is not a " + std::string(to_string(expected)) +
                    " unit");
  }
  return u;
}

Quantity convert(Quantity q, Unit target) {
  if (kind_of(q.unit) != kind_of(target)) {
    throw UnitError("cannot convert " + std::string(to_string(kind_of(q.unit))) + " (" +
                    std::string(to_string(q.unit)) + ") to " +
                    std::string(to_string(kind_of(target))) + " (" +
                    std::string(to_string(target)) + ")");
  }
  if (q.unit == target) return q;
  double base = q.unit == Unit::nm_photon ? photon_nm_to_hartree(q.value)
                                          : q.value * to_base_factor(q.unit);
  double out = target == Unit::nm_photon ? hartree_to_photon_nm(base)
                                         : base / to_base_factor(target);
  return {out, target};
}

Quantity parse_quantity(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), value);
  if (ec != std::errc()) throw UnitError("cannot parse quantity '" + std::string(text) + "'");
  std::string_view rest(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr));
  while (!rest.empty() && (rest.front() == '_' || std::isspace(static_cast<unsigned char>(rest.front()))))
    rest.remove_prefix(1);
  if (rest.empty()) throw UnitError("quantity '" + std::string(text) + "' has no unit");
  return {value, parse_unit(rest)};
}

Quantity trap_depth(double alpha_real_au, double intensity_w_cm2) {
  if (!(intensity_w_cm2 >= 0.0)) throw DomainError("intensity must be non-negative");
  return {-constants::polarizability_au_in_hz_per_w_cm2 * alpha_real_au * intensity_w_cm2,
          Unit::hz};
}

Quantity scattering_power(double alpha_imag_au, double omega_hartree, double intensity_w_cm2) {
  if (!(intensity_w_cm2 >= 0.0)) throw DomainError("intensity must be non-negative");
  if (!(omega_hartree > 0.0)) throw DomainError("photon energy must be positive");
  // I/(eps0 c) * alpha_SI = 2 h k alpha_au I with k the pinned light-shift factor.
  const double omega_rad_s = omega_hartree / constants::atomic_time_s;
  const double watts = omega_rad_s * 2.0 * constants::planck_h *
                       constants::polarizability_au_in_hz_per_w_cm2 * alpha_imag_au *
                       intensity_w_cm2;
  return {watts, Unit::watt};
}

}  // namespace dynpol
