#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "dynpol/curves.hpp"
#include "dynpol/error.hpp"
#include "dynpol/spline.hpp"
#include "dynpol/units.hpp"
#include "dynpol/vibsolver.hpp"
#include "oracles.hpp"

using namespace dynpol;

namespace {

PotentialCurve tabulate(const std::function<double(double)>& f, double lo, double hi, int n,
                        std::optional<double> diss = std::nullopt, const std::string& label = "T") {
  std::vector<double> r, v;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    r.push_back(x);
    v.push_back(f(x));
  }
  return PotentialCurve({label, 0}, r, v, diss);
}

std::string curve_text(const std::string& header, const std::vector<std::pair<double, double>>& rows) {
  std::ostringstream os;
  os << "# " << header << "\nR_bohr,V\n";
  for (auto [r, v] : rows) os << r << "," << v << "\n";
  return os.str();
}

}  // namespace

TEST(Curves, LoadConvertsWavenumbersToHartree) {
  std::vector<std::pair<double, double>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({5.0 + i, 100.0 * i});
  std::istringstream in(curve_text("kind=potential label=X lambda=0 unit_R=bohr unit_V=cm-1", rows));
  const auto c = std::get<PotentialCurve>(load_curve(in, CurveSchema::potential));
  for (int i = 0; i < 10; ++i) EXPECT_DOUBLE_EQ(c.v()[static_cast<std::size_t>(i)], cm1_to_hartree(100.0 * i));
  EXPECT_EQ(c.label(), "X");
}

TEST(Curves, DecreasingRNamesTheRow) {
  std::vector<std::pair<double, double>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({5.0 + i, 0.0});
  rows[6].first = 9.5;  // below row 5's 10.0
  std::istringstream in(curve_text("kind=potential label=X unit_V=hartree", rows));
  try {
    load_curve(in, CurveSchema::potential);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 9u);  // header, column line, then the seventh data row
  }
}

TEST(Curves, RejectsNanDuplicatesAndShortTables) {
  std::vector<std::pair<double, double>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({5.0 + i, 0.0});
  auto dup = rows;
  dup[3].first = dup[2].first;
  std::istringstream a(curve_text("kind=potential label=X unit_V=hartree", dup));
  EXPECT_THROW(load_curve(a, CurveSchema::potential), ParseError);

  std::string nan_text = curve_text("kind=potential label=X unit_V=hartree", rows);
  nan_text.replace(nan_text.find("8,0"), 3, "8,nan");
  std::istringstream b(nan_text);
  EXPECT_THROW(load_curve(b, CurveSchema::potential), ParseError);

  rows.resize(7);
  std::istringstream c(curve_text("kind=potential label=X unit_V=hartree", rows));
  EXPECT_THROW(load_curve(c, CurveSchema::potential), ParseError);
  EXPECT_THROW(PotentialCurve({"X", 0}, {1, 2, 3}, {0, 0, 0}), InvariantError);
}

TEST(Curves, MorseFixtureMinimum) {
  const oracle::Morse m;
  const PotentialCurve c = load_potential(oracle::data("morse_dense.dat"));
  // lowest knot against the analytic formula at the same knot
  std::size_t k = 0;
  for (std::size_t i = 1; i < c.v().size(); ++i) {
    if (c.v()[i] < c.v()[k]) k = i;
  }
  EXPECT_NEAR(c.r()[k], m.re, 1e-10);
  EXPECT_NEAR(c.v()[k], m.v(c.r()[k]), 1e-10);
  const auto mn = c.minimum();
  EXPECT_NEAR(mn.v, -m.de, 1e-10);
  EXPECT_NEAR(mn.r, m.re, 1e-4);
}

TEST(Curves, InterpolationIsExactAtKnotsAndRefusesExtrapolation) {
  const PotentialCurve c = load_potential(oracle::data("morse_200.dat"));
  for (std::size_t i = 0; i < c.r().size(); ++i) EXPECT_EQ(c.value(c.r()[i]), c.v()[i]);
  EXPECT_THROW(c.value(c.r_min() - 1e-9), DomainError);
  EXPECT_THROW(c.value(c.r_max() + 1e-9), DomainError);
}

TEST(Curves, LinearDataStaysLinear) {
  const PotentialCurve c = tabulate([](double r) { return 0.3 * r - 2.0; }, 1.0, 20.0, 37);
  for (std::size_t i = 0; i + 1 < c.r().size(); ++i) {
    const double mid = 0.5 * (c.r()[i] + c.r()[i + 1]);
    EXPECT_NEAR(c.value(mid), 0.3 * mid - 2.0, 1e-12);
  }
}

TEST(Curves, MorseOffKnotAccuracy) {
  // 200 samples over the attractive region, evaluated midway between interior knots
  const oracle::Morse m;
  const PotentialCurve c = tabulate([&](double r) { return m.v(r); }, 7.0, 17.0, 200);
  double worst = 0.0;
  for (std::size_t i = 10; i + 11 < c.r().size(); ++i) {
    const double x = 0.5 * (c.r()[i] + c.r()[i + 1]);
    worst = std::max(worst, std::abs(c.value(x) - m.v(x)) / std::abs(m.v(x)));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Curves, SlopeIsContinuousAcrossKnots) {
  const oracle::Morse m;
  const PotentialCurve c = load_potential(oracle::data("morse_200.dat"));
  const double scale = 2.0 * m.de * m.a;  // typical slope magnitude
  for (std::size_t i = 1; i + 1 < c.r().size(); ++i) {
    const double r = c.r()[i], eps = 1e-6;
    // one-sided slopes extrapolated linearly onto the knot
    const double left = 2.0 * c.derivative(r - eps) - c.derivative(r - 2 * eps);
    const double right = 2.0 * c.derivative(r + eps) - c.derivative(r + 2 * eps);
    EXPECT_LT(std::abs(left - right), 1e-8 * std::max(scale, std::abs(c.derivative(r)))) << "knot " << i;
  }
}

TEST(Curves, WriteLoadRoundTripIsBitIdentical) {
  const PotentialCurve c = load_potential(oracle::data("morse_200.dat"));
  std::ostringstream out;
  write_curve(out, c);
  std::istringstream in(out.str());
  const auto back = std::get<PotentialCurve>(load_curve(in, CurveSchema::potential));
  ASSERT_EQ(back.r().size(), c.r().size());
  for (std::size_t i = 0; i < c.r().size(); ++i) {
    EXPECT_EQ(back.r()[i], c.r()[i]);
    EXPECT_EQ(back.v()[i], c.v()[i]);
  }
  EXPECT_EQ(back.dissociation_energy(), c.dissociation_energy());

  const TransitionDipoleCurve d = load_dipole(oracle::data("toy_XA_dipole.dat"));
  std::ostringstream dout;
  write_curve(dout, d);
  std::istringstream din(dout.str());
  const auto dback = std::get<TransitionDipoleCurve>(load_curve(din, CurveSchema::dipole));
  for (std::size_t i = 0; i < d.r().size(); ++i) EXPECT_EQ(dback.d()[i], d.d()[i]);
  EXPECT_EQ(dback.orientation(), Orientation::parallel);
}

TEST(Curves, DipoleOrientationMustMatchLambda) {
  const TransitionDipoleCurve par = load_dipole(oracle::data("toy_XA_dipole.dat"));
  const TransitionDipoleCurve perp = load_dipole(oracle::data("toy_XB_dipole.dat"));
  EXPECT_NO_THROW(par.check_orientation(0, 0));
  EXPECT_NO_THROW(perp.check_orientation(0, 1));
  EXPECT_THROW(par.check_orientation(0, 1), InvariantError);
  EXPECT_THROW(perp.check_orientation(0, 0), InvariantError);
}

TEST(Curves, SpinOrbitMustLevelOff) {
  std::vector<double> r, flat, growing;
  for (int i = 0; i < 50; ++i) {
    r.push_back(5.0 + 0.5 * i);
    flat.push_back(1e-3 + 1e-4 * std::exp(-i));
    growing.push_back(1e-3 * std::exp(0.2 * i));
  }
  EXPECT_NO_THROW(SpinOrbitFunction(r, flat));
  EXPECT_THROW(SpinOrbitFunction(r, growing), InvariantError);
}

TEST(Splice, IdenticalPatchLeavesBaseUnchanged) {
  // patch made of the base's own samples inside [6, 11]
  const PotentialCurve base = load_potential(oracle::data("morse_dense.dat"));
  std::vector<double> r, v;
  for (std::size_t i = 0; i < base.r().size(); ++i) {
    if (base.r()[i] >= 6.0 - 1e-12 && base.r()[i] <= 11.0 + 1e-12) {
      r.push_back(base.r()[i]);
      v.push_back(base.v()[i]);
    }
  }
  const PotentialCurve patch({"M", 0}, r, v, 0.0);
  const PotentialCurve out = splice(base, patch, 6.5, 10.5);
  const oracle::Morse m;
  for (double x = 4.6; x < 44.0; x += 0.0137) {
    EXPECT_NEAR(out.value(x), base.value(x), 1e-12 * m.de) << x;
  }
  for (std::size_t i = 0; i + 1 < out.r().size(); ++i) EXPECT_LT(out.r()[i], out.r()[i + 1]);
}

TEST(Splice, ConstantShiftPatchIsBridgedSmoothly) {
  const PotentialCurve base = load_potential(oracle::data("morse_dense.dat"));
  const double delta = 1e-3, w = 0.5;
  const PotentialCurve patch = base.shifted(delta);
  const double r1 = 7.0, r2 = 10.0;
  const PotentialCurve out = splice(base, patch, r1, r2, {w});
  // finite-difference slope scan of the output against the base slope
  double worst = 0.0, jump = 0.0;
  const double h = 1e-4;
  for (double r = r1 - 1.0; r < r2 + 1.0; r += 1e-3) {
    const double s_out = (out.value(r + h) - out.value(r - h)) / (2 * h);
    const double s_base = (base.value(r + h) - base.value(r - h)) / (2 * h);
    worst = std::max(worst, std::abs(s_out - s_base));
    jump = std::max(jump, std::abs(out.value(r + 1e-9) - out.value(r - 1e-9)));
  }
  EXPECT_LT(worst, delta / w * 10.0);
  EXPECT_LT(jump, 1e-8);
  EXPECT_NEAR(out.value(0.5 * (r1 + r2)), base.value(0.5 * (r1 + r2)) + delta, 1e-12);
  EXPECT_NEAR(out.value(r1 - 0.2), base.value(r1 - 0.2), 1e-12);
}

TEST(Splice, SplicedMinimumIsThePatchMinimum) {
  const PotentialCurve base = load_potential(oracle::data("morse_200.dat"));
  const PotentialCurve patch = load_potential(oracle::data("morse_patch.dat"));
  const PotentialCurve out = splice(base, patch, 6.0, 11.0);
  // direct minimum search on a fine scan of both curves
  auto scan_min = [](const PotentialCurve& c, double lo, double hi) {
    double best = 1e300, at = lo;
    for (double r = lo; r <= hi; r += 1e-4) {
      if (c.value(r) < best) {
        best = c.value(r);
        at = r;
      }
    }
    return std::pair{at, best};
  };
  const auto [rp, vp] = scan_min(patch, 6.0, 11.0);
  const auto [ro, vo] = scan_min(out, 4.6, 44.0);
  EXPECT_NEAR(ro, rp, 2e-4);
  EXPECT_NEAR(vo, vp, 1e-10);
}

TEST(Splice, WindowOutsideSupportIsRejected) {
  const PotentialCurve base = load_potential(oracle::data("morse_200.dat"));
  const PotentialCurve patch = load_potential(oracle::data("morse_patch.dat"));
  EXPECT_THROW(splice(base, patch, 5.0, 10.0), DomainError);
  EXPECT_THROW(splice(base, patch, 10.0, 7.0), DomainError);
}

TEST(LongRange, SelfConsistentC6TailNeedsNoShift) {
  const PotentialCurve c = load_potential(oracle::data("c6_tail.dat"));
  const auto res = extend_long_range(c, {{6, 6000.0}}, 30.0);
  EXPECT_NEAR(res.shift, 0.0, 1e-10);
  EXPECT_TRUE(res.warnings.empty());
  for (double r = 30.0; r < 150.0; r += 0.77) EXPECT_NEAR(res.curve.value(r), -6000.0 / std::pow(r, 6), 1e-12);
}

TEST(LongRange, ValueAndSlopeContinuousAtMatch) {
  const PotentialCurve c = load_potential(oracle::data("toy_X.dat"));
  const double rm = 25.0;
  const auto res = extend_long_range(c, {{6, 6.85e3}, {8, 1.0e6}}, rm);
  // tabulated side against the analytic tail, both evaluated exactly at the match
  ASSERT_TRUE(res.curve.tail().has_value());
  const auto& tail = *res.curve.tail();
  const double vl = c.value(rm), vr = tail.value(rm);
  EXPECT_LT(std::abs(vl - vr), 1e-8 * std::abs(vl));
  const double dl = c.derivative(rm), dr = tail.derivative(rm);
  EXPECT_LT(std::abs(dl - dr), 1e-8 * std::abs(dl));
  // tail tends to the dissociation energy monotonically
  double prev = res.curve.value(rm + 1.0);
  for (double r = rm + 1.5; r < 199.0; r += 0.5) {
    const double v = res.curve.value(r);
    EXPECT_GE(v, prev - 1e-18);
    prev = v;
  }
  EXPECT_NEAR(res.curve.value(199.0), c.dissociation_energy() + res.shift, 1e-9);
}

TEST(LongRange, ZeroCoefficientsGiveAFlatTail) {
  const PotentialCurve c = load_potential(oracle::data("toy_X.dat"));
  const double rm = 25.0;
  const auto res = extend_long_range(c, {{6, 0.0}}, rm, {1.0, 200.0});
  const double flat = res.curve.value(rm + 1.0);
  for (double r = rm + 1.0; r < 199.0; r += 1.3) EXPECT_NEAR(res.curve.value(r), flat, 1e-15);
  EXPECT_NEAR(flat, c.value(rm) + 1.0 / 3.0 * c.derivative(rm) * 1.0, 1e-9);
  EXPECT_NEAR(res.curve.derivative(rm + 0.999999), 0.0, 1e-9);
}

TEST(LongRange, ExtensionAddsNearThresholdLevels) {
  // a Morse-like well truncated at 18 bohr, then extended with a C6 tail
  const PotentialCurve raw = load_potential(oracle::data("toy_X.dat"));
  std::vector<double> r, v;
  for (std::size_t i = 0; i < raw.r().size() && raw.r()[i] <= 18.0; ++i) {
    r.push_back(raw.r()[i]);
    v.push_back(raw.v()[i]);
  }
  const PotentialCurve cut({"X", 0}, r, v, raw.dissociation_energy());
  const auto ext = extend_long_range(cut, {{6, 6.85e3}}, 17.0);
  const double mu = 66.4527259665 * constants::amu_in_me;
  GridOptions o;
  o.e_floor = 0.1 * 0.0166;
  const auto g1 = build_grid(cut, mu, 0.0, o);
  o.r_max = 60.0;
  const auto g2 = build_grid(ext.curve, mu, 0.0, o);
  const auto s1 = solve_single(cut, mu, g1);
  const auto s2 = solve_single(ext.curve, mu, g2);
  EXPECT_GE(s2.bound_count(), s1.bound_count() + 1);
}

TEST(LongRange, UnsupportedPowerIsRejected) {
  const PotentialCurve c = load_potential(oracle::data("c6_tail.dat"));
  EXPECT_THROW(extend_long_range(c, {{5, 1.0}}, 30.0), DomainError);
  EXPECT_THROW(extend_long_range(c, {{6, 1.0}}, 100.0), DomainError);
}

TEST(Spline, NaturalSplineReproducesCubicInterior) {
  auto gen = oracle::rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const double a = u(gen), b = u(gen);
    std::vector<double> x, y;
    for (int i = 0; i < 40; ++i) {
      x.push_back(i * 0.25);
      y.push_back(a * x.back() + b);
    }
    CubicSpline s(x, y);
    for (double q = 0.0; q <= 9.75; q += 0.0371) {
      EXPECT_NEAR(s.value(q), a * q + b, 1e-12);
      EXPECT_NEAR(s.derivative(q), a, 1e-10);
    }
  }
}
