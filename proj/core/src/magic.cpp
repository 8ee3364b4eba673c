#include "dynpol/magic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "dynpol/error.hpp"
#include "dynpol/table_io.hpp"

namespace dynpol {

namespace {

void check_grids(const PolarizabilitySpectrum& a, const PolarizabilitySpectrum& b) {
  if (a.omega.empty()) throw DomainError("empty spectrum");
  if (a.omega.size() != b.omega.size() || a.alpha.size() != a.omega.size() ||
      b.alpha.size() != b.omega.size()) {
    throw DomainError("spectra do not share an omega grid (" + std::to_string(a.omega.size()) +
                      " vs " + std::to_string(b.omega.size()) + " points)");
  }
  for (std::size_t k = 0; k < a.omega.size(); ++k) {
    const double tol = 1e-12 * std::max(1.0, std::abs(a.omega[k]));
    if (std::abs(a.omega[k] - b.omega[k]) > tol) {
      throw DomainError("spectra do not share an omega grid (point " + std::to_string(k) + ")");
    }
  }
}

template <class F>
double golden_min(F f, double a, double b, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

}  // namespace

std::size_t MagicReport::clean_root_count() const {
  return static_cast<std::size_t>(
      std::count_if(roots.begin(), roots.end(), [](const MagicRoot& r) { return r.clean; }));
}

MagicReport find_magic(const PolarizabilitySpectrum& mol, const PolarizabilitySpectrum& ref,
                       const MagicOptions& options) {
  check_grids(mol, ref);
  if (!(options.tol_root > 0.0) || !(options.margin_cm1 >= 0.0)) {
    throw DomainError("tol_root must be > 0 and margin >= 0");
  }
  const auto& w = mol.omega;
  const std::size_t n = w.size();
  const double step = n > 1 ? w[1] - w[0] : std::max(mol.step, 1e-12);

  MagicReport rep;
  rep.options = options;
  rep.search_lo_cm1 = hartree_to_cm1(w.front());
  rep.search_hi_cm1 = hartree_to_cm1(w.back());
  rep.molecule_descriptor = mol.state_descriptor;
  rep.reference_descriptor = ref.state_descriptor;
  rep.refined = static_cast<bool>(mol.evaluate) && static_cast<bool>(ref.evaluate);

  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = mol.alpha[k].real() - ref.alpha[k].real();

  auto delta = [&](double x) { return mol.evaluate(x).real() - ref.evaluate(x).real(); };
  auto is_clean = [&](double x) {
    const double dist = std::min(mol.zone_distance(x), ref.zone_distance(x));
    return hartree_to_cm1(dist) >= options.margin_cm1;
  };
  auto in_zone = [&](double x) { return mol.in_zone(x) || ref.in_zone(x); };
  auto slope_cm1 = [&](double x, std::size_t k) {
    if (rep.refined) {
      const double h = 1e-3 * step;
      return (delta(x + h) - delta(x - h)) / (2.0 * h) / constants::hartree_in_cm1;
    }
    const std::size_t k1 = std::min(k + 1, n - 1), k0 = k1 - 1;
    return (d[k1] - d[k0]) / hartree_to_cm1(w[k1] - w[k0]);
  };

  std::vector<char> zero(n);
  for (std::size_t k = 0; k < n; ++k) zero[k] = std::abs(d[k]) < options.tol_root;

  // bisection on re-evaluated Delta over the bracket [w[lo], w[hi]]; false marks a pole
  auto add_root = [&](std::size_t lo, std::size_t hi) {
    double x = 0.0, fx = 0.0;
    if (rep.refined) {
      double a = w[lo], b = w[hi], fa = d[lo];
      const double target = step * std::ldexp(1.0, -20);
      x = 0.5 * (a + b);
      fx = delta(x);
      for (int it = 0; it < options.max_bisections; ++it) {
        if (fx == 0.0 || (b - a <= target && std::abs(fx) < options.tol_root)) break;
        if ((fa < 0.0) == (fx < 0.0)) {
          a = x;
          fa = fx;
        } else {
          b = x;
        }
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        x = m;
        fx = delta(x);
      }
      if (!(std::abs(fx) < options.tol_root)) {
        rep.poles.push_back({hartree_to_cm1(x), fx});
        return;
      }
    } else {
      x = w[lo] - d[lo] * (w[hi] - w[lo]) / (d[hi] - d[lo]);
      fx = 0.0;
    }
    MagicRoot r;
    r.omega_cm1 = hartree_to_cm1(x);
    r.alpha = rep.refined ? mol.evaluate(x).real()
                          : mol.alpha[lo].real() + (x - w[lo]) / (w[hi] - w[lo]) *
                                                       (mol.alpha[hi].real() - mol.alpha[lo].real());
    r.delta = fx;
    r.alpha_slope_diff = slope_cm1(x, lo);
    r.clean = is_clean(x);
    rep.roots.push_back(r);
  };

  // zero runs: isolated points are roots, longer runs become intervals split by clean status
  for (std::size_t k = 0; k < n;) {
    if (!zero[k]) {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e + 1 < n && zero[e + 1]) ++e;
    if (e == k) {
      if (k > 0 && k + 1 < n && d[k - 1] * d[k + 1] < 0.0) {
        add_root(k - 1, k + 1);
      } else {
        MagicRoot r;
        r.omega_cm1 = hartree_to_cm1(w[k]);
        r.alpha = mol.alpha[k].real();
        r.delta = d[k];
        r.alpha_slope_diff = n > 1 ? slope_cm1(w[k], k) : 0.0;
        r.clean = is_clean(w[k]);
        rep.roots.push_back(r);
      }
    } else {
      std::size_t s = k;
      while (s <= e) {
        const bool c = is_clean(w[s]);
        std::size_t t = s;
        while (t + 1 <= e && is_clean(w[t + 1]) == c) ++t;
        rep.intervals.push_back({hartree_to_cm1(w[s]), hartree_to_cm1(w[t]), c});
        s = t + 1;
      }
    }
    k = e + 1;
  }

  // sign changes between non-zero neighbours
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (zero[k] || zero[k + 1] || !(d[k] * d[k + 1] < 0.0)) continue;
    add_root(k, k + 1);
  }
  std::sort(rep.roots.begin(), rep.roots.end(),
            [](const MagicRoot& a, const MagicRoot& b) { return a.omega_cm1 < b.omega_cm1; });

  auto refine_min = [&](std::size_t k) {
    const std::size_t lo = k > 0 ? k - 1 : 0, hi = std::min(k + 1, n - 1);
    if (!rep.refined || lo == hi || zero[k]) return std::pair{w[k], d[k]};
    const double x = golden_min([&](double y) { return std::abs(delta(y)); }, w[lo], w[hi], 1e-9 * step);
    const double fx = delta(x);
    if (std::abs(fx) <= std::abs(d[k])) return std::pair{x, fx};
    return std::pair{w[k], d[k]};
  };

  // grazing points: local |Delta| minima below tol_graze with no sign change around them
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (zero[k - 1] || zero[k] || zero[k + 1]) continue;
    if (!(d[k - 1] * d[k] > 0.0 && d[k] * d[k + 1] > 0.0)) continue;
    const double a = std::abs(d[k]);
    if (!(a <= std::abs(d[k - 1]) && a < std::abs(d[k + 1]) && a < options.tol_graze)) continue;
    const auto [x, fx] = refine_min(k);
    rep.grazing.push_back({hartree_to_cm1(x), fx, is_clean(x)});
  }

  // closest approach outside resonance zones (all points if none are outside)
  std::size_t best = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (in_zone(w[k])) continue;
    if (best == n || std::abs(d[k]) < std::abs(d[best])) best = k;
  }
  bool outside = true;
  if (best == n) {
    outside = false;
    best = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (std::abs(d[k]) < std::abs(d[best])) best = k;
    }
  }
  {
    auto [x, fx] = refine_min(best);
    if (outside && in_zone(x)) {
      x = w[best];
      fx = d[best];
    }
    ClosestApproach c;
    c.omega_cm1 = hartree_to_cm1(x);
    c.delta = fx;
    c.alpha_mol = rep.refined ? mol.evaluate(x).real() : mol.alpha[best].real();
    c.alpha_ref = c.alpha_mol - fx;
    c.outside_zones = outside;
    rep.closest = c;
  }
  return rep;
}

void write_magic_report(std::ostream& out, const MagicReport& r) {
  auto b = [](bool v) { return v ? "1" : "0"; };
  out << "# kind=magic_report molecule=" << r.molecule_descriptor
      << " reference=" << r.reference_descriptor
      << " search_lo_cm1=" << format_double(r.search_lo_cm1)
      << " search_hi_cm1=" << format_double(r.search_hi_cm1)
      << " margin_cm1=" << format_double(r.options.margin_cm1)
      << " tol_root=" << format_double(r.options.tol_root)
      << " tol_graze=" << format_double(r.options.tol_graze) << " refined=" << b(r.refined) << '\n';
  out << "record=summary roots=" << r.roots.size() << " clean_roots=" << r.clean_root_count()
      << " intervals=" << r.intervals.size() << " grazing=" << r.grazing.size()
      << " poles=" << r.poles.size() << '\n';
  for (const auto& x : r.roots) {
    out << "record=root omega_cm1=" << format_double(x.omega_cm1)
        << " alpha_au=" << format_double(x.alpha)
        << " alpha_slope_diff=" << format_double(x.alpha_slope_diff)
        << " delta_au=" << format_double(x.delta) << " clean=" << b(x.clean) << '\n';
  }
  for (const auto& x : r.intervals) {
    out << "record=interval lo_cm1=" << format_double(x.lo_cm1)
        << " hi_cm1=" << format_double(x.hi_cm1) << " clean=" << b(x.clean) << '\n';
  }
  for (const auto& x : r.grazing) {
    out << "record=grazing omega_cm1=" << format_double(x.omega_cm1)
        << " delta_au=" << format_double(x.delta) << " clean=" << b(x.clean) << '\n';
  }
  for (const auto& x : r.poles) {
    out << "record=pole omega_cm1=" << format_double(x.omega_cm1)
        << " delta_au=" << format_double(x.delta) << '\n';
  }
  if (r.closest) {
    const auto& c = *r.closest;
    out << "record=closest omega_cm1=" << format_double(c.omega_cm1)
        << " delta_au=" << format_double(c.delta) << " alpha_mol_au=" << format_double(c.alpha_mol)
        << " alpha_ref_au=" << format_double(c.alpha_ref)
        << " outside_zones=" << b(c.outside_zones) << '\n';
  }
}

StarkSplitting stark_splitting(double alpha_parallel, double alpha_perpendicular, int j,
                               double intensity_w_cm2) {
  if (j < 0) throw DomainError("J must be >= 0");
  StarkSplitting s;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  for (int m = 0; m <= j; ++m) {
    const double a =
        combine_rotational(alpha_parallel, alpha_perpendicular, RotationalState::level(j, m)).real();
    const double u = trap_depth(a, intensity_w_cm2).value;
    s.m.push_back(m);
    s.alpha.push_back(a);
    s.shift_hz.push_back(u);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += (m == 0 ? 1.0 : 2.0) * u;
  }
  s.total_splitting_hz = hi - lo;
  s.mean_shift_hz = sum / (2.0 * j + 1.0);
  s.isotropic_shift_hz =
      trap_depth(combine_rotational(alpha_parallel, alpha_perpendicular, RotationalState::isotropic()).real(),
                 intensity_w_cm2)
          .value;
  return s;
}

StarkSplitting stark_splitting(const TransitionTable& table, int j, double omega,
                               double intensity_w_cm2) {
  return stark_splitting(alpha_component(table, Orientation::parallel, omega).real(),
                         alpha_component(table, Orientation::perpendicular, omega).real(), j,
                         intensity_w_cm2);
}

}  // namespace dynpol
