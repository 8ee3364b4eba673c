#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "dynpol/curves.hpp"
#include "dynpol/error.hpp"
#include "dynpol/units.hpp"
#include "dynpol/vibsolver.hpp"
#include "oracles.hpp"

using namespace dynpol;

namespace {

const PotentialCurve& morse() {
  static const PotentialCurve c = load_potential(oracle::data("morse_dense.dat"));
  return c;
}
const PotentialCurve& harmonic() {
  static const PotentialCurve c = load_potential(oracle::data("harmonic.dat"));
  return c;
}
const VibrationalSolution& morse_solution() {
  static const VibrationalSolution s = [] {
    const oracle::Morse m;
    return solve_single(morse(), m.mu, build_grid(morse(), m.mu, 0.0));
  }();
  return s;
}

PotentialCurve tabulate(const std::string& label, int lambda, const std::function<double(double)>& f,
                        double lo, double hi, int n, double diss) {
  std::vector<double> r, v;
  for (int i = 0; i < n; ++i) {
    r.push_back(lo + (hi - lo) * i / (n - 1));
    v.push_back(f(r.back()));
  }
  return PotentialCurve({label, lambda}, r, v, diss);
}

SpinOrbitFunction constant_so(double w, double lo, double hi) {
  std::vector<double> r, v;
  for (int i = 0; i < 50; ++i) {
    r.push_back(lo + (hi - lo) * i / 49.0);
    v.push_back(w);
  }
  return SpinOrbitFunction(r, v);
}

}  // namespace

TEST(VibSolver, HarmonicSpectrum) {
  const oracle::Harmonic h;
  const auto g = build_grid(harmonic(), h.mu, 30 * h.omega);
  const auto s = solve_single(harmonic(), h.mu, g);
  for (int v = 0; v <= 20; ++v) {
    EXPECT_NEAR(s.energy(static_cast<std::size_t>(v)), h.level(v), 1e-8 * h.level(v)) << "v=" << v;
  }
}

TEST(VibSolver, MorseSpectrum) {
  const oracle::Morse m;
  const auto& s = morse_solution();
  for (int v = 0; v < 30; ++v) {
    const double e = s.energy(static_cast<std::size_t>(v)) + m.de;
    EXPECT_NEAR(e, m.level_from_bottom(v), 1e-6 * m.level_from_bottom(v)) << "v=" << v;
  }
}

TEST(VibSolver, OrthonormalAndOrdered) {
  const auto& s = morse_solution();
  const std::size_t n = s.level_count();
  Eigen::MatrixXd w(static_cast<Eigen::Index>(s.grid().size()), static_cast<Eigen::Index>(n));
  for (std::size_t v = 0; v < n; ++v) w.col(static_cast<Eigen::Index>(v)) = s.wavefunction(v);
  const Eigen::MatrixXd o = w.transpose() * w;
  EXPECT_LT((o - Eigen::MatrixXd::Identity(o.rows(), o.cols())).cwiseAbs().maxCoeff(), 1e-8);
  for (std::size_t v = 1; v < n; ++v) EXPECT_GT(s.energy(v), s.energy(v - 1));
}

TEST(VibSolver, NodeCountEqualsV) {
  const auto& s = morse_solution();
  for (std::size_t v = 0; v < 40; ++v) EXPECT_EQ(s.node_count(v), static_cast<int>(v));
  EXPECT_GT(s.wavefunction(0).maxCoeff(), 0.0);
}

TEST(VibSolver, ConstantShiftMovesEveryLevel) {
  const oracle::Morse m;
  const double delta = 3.7e-3;
  const auto& g = morse_solution().grid();
  const auto s2 = solve_single(morse().shifted(delta), m.mu, g);
  const auto& s1 = morse_solution();
  for (std::size_t v = 0; v < s1.level_count(); ++v) EXPECT_NEAR(s2.energy(v), s1.energy(v) + delta, 1e-10);
}

TEST(VibSolver, BetaConvergence) {
  const oracle::Morse m;
  GridOptions o;
  o.beta = 2.8;
  const auto fine = solve_single(morse(), m.mu, build_grid(morse(), m.mu, 0.0, o));
  const auto& s = morse_solution();
  for (std::size_t v = 0; v < s.bound_count(); ++v) EXPECT_NEAR(fine.energy(v), s.energy(v), 1e-8) << v;
}

TEST(VibSolver, RepulsivePotentialHasNoBoundLevels) {
  const auto rep = tabulate("R", 0, [](double r) { return 0.5 * std::exp(-r); }, 2.0, 30.0, 200, 0.0);
  const auto g = build_grid(rep, 2000.0, 0.01, [] {
    GridOptions o;
    o.e_floor = 5e-3;
    return o;
  }());
  const auto s = solve_single(rep, 2000.0, g);
  EXPECT_EQ(s.bound_count(), 0u);
}

TEST(Grid, DensestAtHarmonicMinimum) {
  const oracle::Harmonic h;
  const auto g = build_grid(harmonic(), h.mu, 10 * h.omega);
  const auto r = g.r();
  std::size_t densest = 0;
  for (std::size_t j = 0; j + 1 < r.size(); ++j) {
    if (r[j + 1] - r[j] < r[densest + 1] - r[densest]) densest = j;
  }
  EXPECT_NEAR(0.5 * (r[densest] + r[densest + 1]), h.re, 0.1);
  for (double jac : g.jacobian()) EXPECT_GT(jac, 0.0);
  // spacing monotone away from the minimum
  for (std::size_t j = densest + 1; j + 1 < r.size(); ++j) EXPECT_GE(r[j + 1] - r[j], r[j] - r[j - 1] - 1e-12);
}

TEST(Grid, DoublingBetaDoublesN) {
  const oracle::Morse m;
  for (double beta : {1.0, 1.4, 2.0}) {
    GridOptions a, b;
    a.beta = beta;
    b.beta = 2 * beta;
    a.e_floor = b.e_floor = 0.5 * m.de;
    const auto ga = build_grid(morse(), m.mu, 0.0, a);
    const auto gb = build_grid(morse(), m.mu, 0.0, b);
    // both counts are rounded up to odd values
    EXPECT_NEAR(static_cast<double>(gb.size() - 1), 2.0 * static_cast<double>(ga.size() - 1), 4.0);
  }
}

TEST(Grid, PointCountMatchesQuadratureOfSpacingLaw) {
  const oracle::Morse m;
  GridOptions o;
  o.e_floor = 0.5 * m.de;
  const auto g = build_grid(morse(), m.mu, 0.0, o);
  const double lo = g.r().front(), hi = g.r().back();
  // independent count: integrate beta p(R) / pi with the analytic Morse potential
  auto density = [&](double r) {
    const double de = 0.0 - m.v(r);
    const double f = o.e_floor;
    const double k = 0.5 * (de + f + std::sqrt((de - f) * (de - f) + f * f));
    return o.beta * std::sqrt(2.0 * m.mu * k) / std::numbers::pi;
  };
  const double x = oracle::simpson(density, lo, hi, 400000);
  // N - 1 intervals, rounded up to an even count
  EXPECT_GE(static_cast<double>(g.size() - 1), x - 1.0);
  EXPECT_LT(static_cast<double>(g.size() - 1), x + 2.0 + 1.0);
}

TEST(Grid, SpacingWithinHalfLocalWavelength) {
  const oracle::Morse m;
  const auto& g = morse_solution().grid();
  const auto r = g.r();
  for (std::size_t j = 0; j + 1 < r.size(); ++j) {
    const double mid = 0.5 * (r[j] + r[j + 1]);
    const double ke = g.envelope_energy() - m.v(mid);
    if (ke <= 0.0) continue;
    const double half_lambda = std::numbers::pi / std::sqrt(2.0 * m.mu * ke);
    EXPECT_LE(r[j + 1] - r[j], half_lambda * 1.0001) << mid;
  }
}

TEST(Grid, EnergyBelowEveryMinimumIsRejected) {
  const oracle::Morse m;
  EXPECT_THROW(build_grid(morse(), m.mu, -0.03), DomainError);
}

TEST(Tdm, UnitDipoleIsOverlap) {
  const auto& s = morse_solution();
  std::vector<double> r{4.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0};
  const TransitionDipoleCurve one("M", "M", Orientation::parallel, r, std::vector<double>(r.size(), 1.0));
  const TransitionDipoleCurve c3("M", "M", Orientation::parallel, r, std::vector<double>(r.size(), 3.0));
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = 0; b < 6; ++b) {
      EXPECT_NEAR(vibronic_tdm(s, a, one, s, b), a == b ? 1.0 : 0.0, 1e-8);
      EXPECT_NEAR(vibronic_tdm(s, a, c3, s, b), a == b ? 3.0 : 0.0, 3e-8);
    }
  }
}

TEST(Tdm, HarmonicLadder) {
  const oracle::Harmonic h;
  const auto g = build_grid(harmonic(), h.mu, 30 * h.omega);
  const auto s = solve_single(harmonic(), h.mu, g);
  std::vector<double> r, d;
  for (int i = 0; i <= 80; ++i) {
    r.push_back(3.0 + 0.125 * i);
    d.push_back(r.back() - h.re);
  }
  const TransitionDipoleCurve x("H", "H", Orientation::parallel, r, d);
  for (std::size_t v = 0; v < 15; ++v) {
    for (std::size_t w = 0; w < 17; ++w) {
      const double t = vibronic_tdm(s, v, x, s, w);
      if (w == v + 1) {
        EXPECT_NEAR(std::abs(t), h.ladder(static_cast<int>(v)), 1e-6 * h.ladder(static_cast<int>(v)));
      } else if (v == w + 1) {
        EXPECT_NEAR(std::abs(t), h.ladder(static_cast<int>(w)), 1e-6 * h.ladder(static_cast<int>(w)));
      } else {
        EXPECT_NEAR(t, 0.0, 1e-6 * h.ladder(0)) << v << "," << w;
      }
    }
  }
  EXPECT_THROW(vibronic_tdm(s, s.level_count(), x, s, 0), DomainError);
}

TEST(Tdm, ClosureOnSharedGrid) {
  const oracle::Morse m;
  const PotentialCurve up = load_potential(oracle::data("morse_upper.dat"));
  const TransitionDipoleCurve d = load_dipole(oracle::data("morse_pair_dipole.dat"));
  const auto g = build_grid(morse(), up, m.mu, 0.05);
  const auto lo = solve_single(morse(), m.mu, g);
  const auto hi = solve_single(up, m.mu, g);
  for (std::size_t v : {0u, 5u, 20u}) {
    const Eigen::VectorXd row = vibronic_tdm_row(lo, v, d, hi);
    const double lhs = row.squaredNorm();
    const double rhs = dipole_squared_expectation(lo, v, d);
    EXPECT_NEAR(lhs, rhs, 1e-6 * rhs) << "v=" << v;
    for (std::size_t f = 0; f < 10; ++f) {
      EXPECT_NEAR(row[static_cast<Eigen::Index>(f)], vibronic_tdm(lo, v, d, hi, f), 1e-12);
    }
  }
}

TEST(Tdm, ResamplingAcrossGridsAgrees) {
  const oracle::Morse m;
  const PotentialCurve up = load_potential(oracle::data("morse_upper.dat"));
  const TransitionDipoleCurve d = load_dipole(oracle::data("morse_pair_dipole.dat"));
  const auto shared = build_grid(morse(), up, m.mu, 0.05);
  const auto a = solve_single(morse(), m.mu, shared);
  const auto b = solve_single(up, m.mu, shared);
  GridOptions fine;
  fine.beta = 2.8;
  const auto a_fine = solve_single(morse(), m.mu, build_grid(morse(), m.mu, 0.0, fine));
  double coarse_err = 0.0, fine_err = 0.0;
  for (std::size_t f = 0; f < 8; ++f) {
    const double ref = vibronic_tdm(a, 0, d, b, f);
    coarse_err = std::max(coarse_err, std::abs(vibronic_tdm(morse_solution(), 0, d, b, f) - ref));
    fine_err = std::max(fine_err, std::abs(vibronic_tdm(a_fine, 0, d, b, f) - ref));
  }
  // spline resampling error, fourth order in the source spacing
  EXPECT_LT(coarse_err, 5e-5);
  EXPECT_LT(fine_err, coarse_err / 8.0);
  EXPECT_LT(fine_err, 2e-6);
}

TEST(Coupled, ZeroCouplingIsBlockDiagonal) {
  const oracle::Morse m;
  const PotentialCurve up = load_potential(oracle::data("morse_upper.dat")).shifted(-0.04);
  const auto g = build_grid(morse(), up, m.mu, 0.01);
  const auto so = constant_so(0.0, 4.0, 50.0);
  const auto c = solve_coupled(morse(), up, so, m.mu, g);
  const auto a = solve_single(morse(), m.mu, g);
  const auto b = solve_single(up, m.mu, g);
  std::vector<double> merged(a.energies().data(), a.energies().data() + a.level_count());
  merged.insert(merged.end(), b.energies().data(), b.energies().data() + b.level_count());
  std::sort(merged.begin(), merged.end());
  ASSERT_EQ(merged.size(), c.level_count());
  for (std::size_t v = 0; v < merged.size(); ++v) {
    EXPECT_NEAR(c.energy(v), merged[v], 1e-10);
    const double f = c.channel_fraction(v, 0);
    EXPECT_TRUE(f == 0.0 || f == 1.0) << f;
    EXPECT_EQ(f + c.channel_fraction(v, 1), 1.0);
  }
}

TEST(Coupled, ConstantCouplingSplitsIdenticalChannels) {
  const oracle::Morse m;
  const double w = 2.5e-4;
  const auto& g = morse_solution().grid();
  const PotentialCurve twin = tabulate("N", 0, [&](double r) { return m.v(r); }, 4.5, 44.5, 4001, 0.0);
  const auto c = solve_coupled(morse(), twin, constant_so(w, 4.0, 50.0), m.mu, g);
  const auto& s = morse_solution();
  std::vector<double> expect;
  for (std::size_t v = 0; v < s.level_count(); ++v) {
    expect.push_back(s.energy(v) - w);
    expect.push_back(s.energy(v) + w);
  }
  std::sort(expect.begin(), expect.end());
  for (std::size_t v = 0; v < 60; ++v) EXPECT_NEAR(c.energy(v), expect[v], 1e-10) << v;
  for (std::size_t v = 0; v < c.level_count(); ++v) {
    const double f0 = c.channel_fraction(v, 0), f1 = c.channel_fraction(v, 1);
    EXPECT_GE(f0, 0.0);
    EXPECT_LE(f0, 1.0);
    EXPECT_NEAR(f0 + f1, 1.0, 1e-10);
  }
}

TEST(Coupled, AvoidedCrossingGap) {
  // repulsive diabatic state crossing a Morse well, Gaussian coupling
  const oracle::Morse m;
  const auto rep = tabulate("P", 0, [](double r) { return 0.05 * std::exp(-0.6 * (r - 6.0)) - 0.015; }, 4.5, 30.0, 600, 0.0);
  std::vector<double> r, w;
  for (int i = 0; i < 200; ++i) {
    r.push_back(4.0 + 0.2 * i);
    w.push_back(2e-4 * std::exp(-std::pow((r.back() - 8.0) / 3.0, 2)));
  }
  const SpinOrbitFunction so(r, w);
  // crossing point by bisection on the diabatic difference
  double a = 6.0, b = 12.0;
  for (int it = 0; it < 200; ++it) {
    const double c = 0.5 * (a + b);
    ((morse().value(c) - rep.value(c)) * (morse().value(a) - rep.value(a)) > 0 ? a : b) = c;
  }
  const double rc = 0.5 * (a + b);
  std::vector<double> pts;
  for (double x = rc - 1.0; x <= rc + 1.0; x += 1e-4) pts.push_back(x);
  const auto ad = adiabatic_curves(morse(), rep, so, pts);
  double gap = 1e300;
  for (std::size_t i = 0; i < pts.size(); ++i) gap = std::min(gap, ad.upper[i] - ad.lower[i]);
  EXPECT_NEAR(gap, 2.0 * so.value(rc), 0.1 * 2.0 * so.value(rc));
}

TEST(Output, LevelsAndWavefunctionsAreWritten) {
  const auto& s = morse_solution();
  std::ostringstream lv, wf;
  write_levels(lv, s, "M");
  write_wavefunctions(wf, s, "M", 3);
  EXPECT_NE(lv.str().find("kind=levels"), std::string::npos);
  EXPECT_NE(lv.str().find("bound_count=56"), std::string::npos);
  EXPECT_NE(wf.str().find("kind=wavefunctions"), std::string::npos);
}
