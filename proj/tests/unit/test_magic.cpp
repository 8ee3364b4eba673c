#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dynpol/error.hpp"
#include "dynpol/magic.hpp"
#include "dynpol/table_io.hpp"
#include "oracles.hpp"

using namespace dynpol;

namespace {

struct Triplet {
  TransitionTable table = load_transition_table(oracle::data("triplet_table.dat"));
  AtomicModel atom = load_atomic_model(oracle::data("triplet_atom.dat"));
  double lo = cm1_to_hartree(8000.0);
  double hi = cm1_to_hartree(11500.0);

  double delta(double w) const {
    return alpha_rotational(table, RotationalState::isotropic(), w).real() - pair_alpha(atom, w).real();
  }
  MagicReport run(double step, const MagicOptions& opt = {}) const {
    const auto m = scan(table, RotationalState::isotropic(), lo, hi, step);
    const auto r = scan_pair(atom, lo, hi, step);
    return find_magic(m, r, opt);
  }
};

PolarizabilitySpectrum real_scan(std::function<double(double)> f, double lo, double hi, double step,
                                 const std::string& name) {
  return scan([f](double w) { return Complex(f(w), 0.0); }, lo, hi, step, name);
}

}  // namespace

TEST(Magic, IdenticalSpectraGiveIntervals) {
  const AtomicModel cs = load_atomic_model(oracle::data("cs_lines.dat"));
  const double lo = cm1_to_hartree(9000.0), hi = cm1_to_hartree(9010.0), step = default_scan_step();
  const auto a = scan_pair(cs, lo, hi, step);
  const auto b = scan_pair(cs, lo, hi, step);
  const MagicReport r = find_magic(a, b);
  EXPECT_TRUE(r.roots.empty());
  ASSERT_EQ(r.intervals.size(), 1u);
  EXPECT_NEAR(r.intervals[0].lo_cm1, 9000.0, 1e-9);
  EXPECT_NEAR(r.intervals[0].hi_cm1, hartree_to_cm1(a.omega.back()), 1e-9);
}

TEST(Magic, LinearDifferenceRootToBisectionPrecision) {
  auto gen = oracle::rng(41);
  std::uniform_real_distribution<double> u(0.1, 0.9), s(50.0, 5000.0);
  const double lo = cm1_to_hartree(9000.0), hi = cm1_to_hartree(9100.0), step = cm1_to_hartree(0.5);
  for (int trial = 0; trial < 30; ++trial) {
    const double w0 = lo + u(gen) * (hi - lo);
    const double slope = s(gen) * (trial % 2 ? 1.0 : -1.0) / cm1_to_hartree(1.0);
    const auto mol = real_scan([=](double w) { return 1000.0 + slope * (w - w0); }, lo, hi, step, "m");
    const auto ref = real_scan([](double) { return 1000.0; }, lo, hi, step, "r");
    const MagicReport rep = find_magic(mol, ref);
    ASSERT_EQ(rep.roots.size(), 1u);
    EXPECT_LT(std::abs(cm1_to_hartree(rep.roots[0].omega_cm1) - w0), step / 1024.0);
    EXPECT_TRUE(rep.roots[0].clean);
    EXPECT_NEAR(rep.roots[0].alpha_slope_diff, slope * cm1_to_hartree(1.0), 1e-6 * std::abs(slope * cm1_to_hartree(1.0)));
    EXPECT_NEAR(rep.roots[0].alpha, 1000.0, 1e-3);
  }
}

TEST(Magic, RejectsMismatchedGrids) {
  const auto a = real_scan([](double) { return 1.0; }, 0.04, 0.05, 1e-5, "a");
  const auto b = real_scan([](double) { return 1.0; }, 0.04, 0.05, 2e-5, "b");
  const auto c = real_scan([](double) { return 1.0; }, 0.041, 0.051, 1e-5, "c");
  EXPECT_THROW(find_magic(a, b), DomainError);
  EXPECT_THROW(find_magic(a, c), DomainError);
}

TEST(Magic, EverySignChangeIsReported) {
  const Triplet t;
  const double step = default_scan_step();
  const MagicReport rep = t.run(step);
  std::vector<double> found;
  for (const auto& r : rep.roots) found.push_back(cm1_to_hartree(r.omega_cm1));
  for (const auto& p : rep.poles) found.push_back(cm1_to_hartree(p.omega_cm1));
  const auto fine = oracle::sign_changes([&](double w) { return t.delta(w); }, t.lo, t.hi, step / 10);
  ASSERT_FALSE(fine.empty());
  EXPECT_EQ(found.size(), fine.size());
  for (double x : fine) {
    double best = 1e300;
    for (double y : found) best = std::min(best, std::abs(x - y));
    EXPECT_LT(best, step) << hartree_to_cm1(x);
  }
}

TEST(Magic, CleanRootsSatisfyTolerance) {
  const Triplet t;
  const MagicReport rep = t.run(default_scan_step());
  for (const auto& r : rep.roots) EXPECT_LT(std::abs(t.delta(cm1_to_hartree(r.omega_cm1))), 1e-3);
  const AtomicModel flat = load_atomic_model(oracle::data("flat_atom.dat"));
  const TransitionTable cross = load_transition_table(oracle::data("crossing_table.dat"));
  const double lo = cm1_to_hartree(9000.0), hi = cm1_to_hartree(11000.0), step = cm1_to_hartree(0.5);
  const MagicReport c = find_magic(scan(cross, RotationalState::isotropic(), lo, hi, step), scan_pair(flat, lo, hi, step));
  ASSERT_EQ(c.clean_root_count(), 1u);
  const double w = cm1_to_hartree(c.roots[0].omega_cm1);
  EXPECT_LT(std::abs(alpha_rotational(cross, RotationalState::isotropic(), w).real() - pair_alpha(flat, w).real()), 1e-3);
  EXPECT_NEAR(c.roots[0].omega_cm1, 10000.0, 1e-6);
}

TEST(Magic, CleanMeansOutsideTheMargin) {
  const Triplet t;
  MagicOptions opt;
  const MagicReport rep = t.run(default_scan_step(), opt);
  const auto m = scan(t.table, RotationalState::isotropic(), t.lo, t.hi, default_scan_step());
  const auto r = scan_pair(t.atom, t.lo, t.hi, default_scan_step());
  ASSERT_FALSE(rep.roots.empty());
  for (const auto& root : rep.roots) {
    const double w = cm1_to_hartree(root.omega_cm1);
    const double dist = std::min(m.zone_distance(w), r.zone_distance(w));
    EXPECT_EQ(root.clean, dist >= cm1_to_hartree(opt.margin_cm1)) << root.omega_cm1;
  }
  opt.margin_cm1 = 0.0;
  const MagicReport loose = t.run(default_scan_step(), opt);
  EXPECT_GE(loose.clean_root_count(), rep.clean_root_count());
}

TEST(Magic, RootsStableUnderStepHalving) {
  const Triplet t;
  const double step = default_scan_step();
  const MagicReport a = t.run(step), b = t.run(step / 2);
  ASSERT_EQ(a.roots.size(), b.roots.size());
  for (std::size_t k = 0; k < a.roots.size(); ++k) {
    EXPECT_LT(std::abs(cm1_to_hartree(a.roots[k].omega_cm1 - b.roots[k].omega_cm1)), step / 1024.0);
  }
}

TEST(Magic, ClosestApproachWhenNoCleanRoot) {
  const Triplet t;
  const MagicReport rep = t.run(default_scan_step());
  EXPECT_EQ(rep.clean_root_count(), 0u);
  ASSERT_TRUE(rep.closest.has_value());
  EXPECT_TRUE(rep.closest->outside_zones);
  EXPECT_NEAR(rep.closest->delta, rep.closest->alpha_mol - rep.closest->alpha_ref, 1e-9);
  const auto m = scan(t.table, RotationalState::isotropic(), t.lo, t.hi, default_scan_step());
  const auto r = scan_pair(t.atom, t.lo, t.hi, default_scan_step());
  double best = 1e300;
  for (std::size_t k = 0; k < m.omega.size(); ++k) {
    if (m.in_zone(m.omega[k]) || r.in_zone(m.omega[k])) continue;
    best = std::min(best, std::abs(m.alpha[k].real() - r.alpha[k].real()));
  }
  EXPECT_LE(std::abs(rep.closest->delta), best + 1e-12);
}

TEST(Magic, GrazingMinimumWithoutSignChange) {
  const double lo = cm1_to_hartree(9000.0), hi = cm1_to_hartree(9100.0), step = cm1_to_hartree(0.5);
  const double w0 = cm1_to_hartree(9043.3), k = 1e9;
  const auto mol = real_scan([=](double w) { return 1000.0 + 0.2 + k * (w - w0) * (w - w0); }, lo, hi, step, "m");
  const auto ref = real_scan([](double) { return 1000.0; }, lo, hi, step, "r");
  const MagicReport rep = find_magic(mol, ref);
  EXPECT_TRUE(rep.roots.empty());
  ASSERT_EQ(rep.grazing.size(), 1u);
  EXPECT_NEAR(rep.grazing[0].omega_cm1, 9043.3, 1e-3);
  EXPECT_NEAR(rep.grazing[0].delta, 0.2, 1e-6);
}

TEST(Magic, ReportListsEveryRecord) {
  const Triplet t;
  const MagicReport rep = t.run(default_scan_step());
  std::ostringstream out;
  write_magic_report(out, rep);
  const std::string s = out.str();
  std::size_t roots = 0, poles = 0;
  for (std::size_t p = s.find("record=root"); p != std::string::npos; p = s.find("record=root", p + 1)) ++roots;
  for (std::size_t p = s.find("record=pole"); p != std::string::npos; p = s.find("record=pole", p + 1)) ++poles;
  EXPECT_EQ(roots, rep.roots.size());
  EXPECT_EQ(poles, rep.poles.size());
  EXPECT_NE(s.find("record=closest"), std::string::npos);
  EXPECT_NE(s.find("kind=magic_report"), std::string::npos);
}

TEST(Stark, JZeroHasNoSplitting) {
  const auto s = stark_splitting(6453.25, 1106.13, 0, 1e3);
  ASSERT_EQ(s.m.size(), 1u);
  EXPECT_EQ(s.total_splitting_hz, 0.0);
  EXPECT_NEAR(s.shift_hz[0], s.isotropic_shift_hz, 1e-9 * std::abs(s.isotropic_shift_hz));
}

TEST(Stark, AnisotropyFixtureSplitting) {
  const TransitionTable t = load_transition_table(oracle::data("j2_table.dat"));
  const auto s = stark_splitting(t, 2, cm1_to_hartree(9394.08), 1e3);
  ASSERT_EQ(s.m.size(), 3u);
  const double expect = constants::polarizability_au_in_hz_per_w_cm2 * 1e3 * (6453.25 - 1106.13) * 8.0 / 21.0;
  EXPECT_NEAR(s.total_splitting_hz, expect, 1e-6 * expect);
  EXPECT_NEAR(s.total_splitting_hz, 95.5e3, 0.1e3);
  EXPECT_NEAR(s.mean_shift_hz, s.isotropic_shift_hz, 1e-9 * std::abs(s.isotropic_shift_hz));
}

TEST(Stark, LinearInIntensity) {
  auto gen = oracle::rng(42);
  std::uniform_real_distribution<double> a(-3000.0, 3000.0), i(0.0, 1e5);
  for (int k = 0; k < 50; ++k) {
    const double p = a(gen), q = a(gen), x = i(gen), y = i(gen);
    for (int j = 1; j <= 6; ++j) {
      const auto sx = stark_splitting(p, q, j, x), sy = stark_splitting(p, q, j, y), sxy = stark_splitting(p, q, j, x + y);
      EXPECT_NEAR(sxy.total_splitting_hz, sx.total_splitting_hz + sy.total_splitting_hz,
                  1e-9 * (std::abs(sxy.total_splitting_hz) + 1.0));
      EXPECT_NEAR(sxy.mean_shift_hz, sxy.isotropic_shift_hz, 1e-9 * (std::abs(sxy.isotropic_shift_hz) + 1.0));
    }
  }
  EXPECT_THROW(stark_splitting(1.0, 1.0, 2, -1.0), DomainError);
}
