#include "dynpol/curves.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dynpol/error.hpp"
#include "dynpol/table_io.hpp"
#include "dynpol/units.hpp"

namespace dynpol {

namespace {

constexpr std::size_t kMinSamples = 8;

void validate_samples(const std::vector<double>& r, const std::vector<double>& v,
                      const std::string& what) {
  if (r.size() != v.size()) throw InvariantError(what + ": R and value columns differ in length");
  if (r.size() < kMinSamples) {
    throw InvariantError(what + ": " + std::to_string(r.size()) + " samples, need at least " +
                         std::to_string(kMinSamples));
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i]) || !std::isfinite(v[i])) {
      throw InvariantError(what + ": non-finite sample " + std::to_string(i));
    }
    if (i > 0 && !(r[i] > r[i - 1])) {
      throw InvariantError(what + ": R not strictly increasing at sample " + std::to_string(i) +
                           " (R = " + std::to_string(r[i]) + ")");
    }
  }
}

// Golden-section minimum of f on [a, b].
template <typename F>
double golden_minimum(F&& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
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
  return 0.5 * (a + b);
}

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

double length_factor(std::string_view unit) {
  if (unit == "angstrom" || unit == "Angstrom" || unit == "A") return 0.1 / constants::bohr_in_nm;
  return convert({1.0, parse_unit(unit, Kind::length)}, Unit::bohr).value;
}

double energy_factor(std::string_view unit) {
  const Unit u = parse_unit(unit, Kind::energy);
  if (u == Unit::nm_photon) throw UnitError("photon wavelengths are not valid curve energies");
  return convert({1.0, u}, Unit::hartree).value;
}

double dipole_factor(std::string_view unit) {
  if (unit == "au" || unit == "a.u." || unit == "ea0") return 1.0;
  if (unit == "debye" || unit == "D") return constants::debye_in_au;
  throw UnitError("unknown dipole unit '" + std::string(unit) + "'");
}

Spin parse_spin(std::string_view s) {
  if (s == "singlet" || s == "1") return Spin::singlet;
  if (s == "triplet" || s == "3") return Spin::triplet;
  throw ParseError("unknown spin '" + std::string(s) + "'", 1);
}

Parity parse_parity(std::string_view s) {
  if (s == "g") return Parity::g;
  if (s == "u") return Parity::u;
  throw ParseError("unknown parity '" + std::string(s) + "'", 1);
}

int parse_int(const std::string& s, const char* key) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("header key '") + key + "' is not an integer: '" + s + "'", 1);
  }
}

double parse_header_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("header key '" + key + "' is not a number: '" + s + "'", 1);
  }
}

// Reads columns 0 and 1, rejecting non-monotone or duplicate R at the offending line.
void read_two_columns(const TableFile& t, double r_scale, double v_scale, std::vector<double>& r,
                      std::vector<double>& v) {
  r.clear();
  v.clear();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double ri = t.number(i, 0) * r_scale;
    const double vi = t.number(i, 1) * v_scale;
    if (!r.empty()) {
      if (ri == r.back()) throw ParseError("duplicate R = " + t.rows[i][0], t.row_lines[i]);
      if (ri < r.back()) throw ParseError("R decreases at " + t.rows[i][0], t.row_lines[i]);
    }
    r.push_back(ri);
    v.push_back(vi);
  }
  if (r.size() < kMinSamples) {
    throw ParseError("only " + std::to_string(r.size()) + " samples, need at least " +
                         std::to_string(kMinSamples),
                     t.row_lines.empty() ? 0 : t.row_lines.back());
  }
}

std::vector<std::vector<std::string>> two_column_rows(std::span<const double> a,
                                                      std::span<const double> b) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) rows.push_back({format_double(a[i]), format_double(b[i])});
  return rows;
}

const std::vector<std::string> kHeaderOrder = {"kind",  "label",  "lambda", "spin",
                                               "parity", "unit_R", "unit_V"};

}  // namespace

std::string_view to_string(Spin s) noexcept { return s == Spin::singlet ? "singlet" : "triplet"; }
std::string_view to_string(Parity p) noexcept { return p == Parity::g ? "g" : "u"; }
std::string_view to_string(Orientation o) noexcept {
  return o == Orientation::parallel ? "parallel" : "perpendicular";
}

Orientation parse_orientation(std::string_view text) {
  if (text == "parallel" || text == "z") return Orientation::parallel;
  if (text == "perpendicular" || text == "x") return Orientation::perpendicular;
  throw ParseError("unknown orientation '" + std::string(text) + "'", 1);
}

// ---- LongRangeTail ----------------------------------------------------------

double LongRangeTail::value(double r) const {
  double v = asymptote + shift;
  for (const auto& [n, c] : coefficients) v -= c / std::pow(r, n);
  const double t = r - r_match;
  const double w = blend_width;
  // g(t) = t - t^2/w + t^3/(3 w^2) on [0, w], g(w) = w/3; the offset is zero past the blend.
  const double g = t < w ? t - t * t / w + t * t * t / (3.0 * w * w) : w / 3.0;
  return v + slope_jump * (g - w / 3.0);
}

double LongRangeTail::derivative(double r) const {
  double d = 0.0;
  for (const auto& [n, c] : coefficients) d += n * c / std::pow(r, n + 1);
  const double t = r - r_match;
  if (t < blend_width) {
    const double s = 1.0 - t / blend_width;
    d += slope_jump * s * s;
  }
  return d;
}

// ---- PotentialCurve ---------------------------------------------------------

PotentialCurve::PotentialCurve(StateLabel state, std::vector<double> r, std::vector<double> v,
                               std::optional<double> dissociation_energy)
    : state_(std::move(state)) {
  validate_samples(r, v, "potential '" + state_.label + "'");
  if (state_.lambda < 0 || state_.lambda > 1) {
    throw InvariantError("potential '" + state_.label + "': lambda must be 0 or 1");
  }
  dissociation_ = dissociation_energy.value_or(v.back());
  spline_ = CubicSpline(std::move(r), std::move(v));
}

double PotentialCurve::value(double r) const {
  if (tail_ && r > tail_->r_match) {
    if (r > tail_->cutoff) {
      throw DomainError("R = " + std::to_string(r) + " beyond long-range cutoff " +
                        std::to_string(tail_->cutoff));
    }
    return tail_->value(r);
  }
  return spline_.value(r);
}

double PotentialCurve::derivative(double r) const {
  if (tail_ && r > tail_->r_match) {
    if (r > tail_->cutoff) throw DomainError("R beyond long-range cutoff");
    return tail_->derivative(r);
  }
  return spline_.derivative(r);
}

PotentialCurve::Minimum PotentialCurve::minimum() const {
  const auto rs = spline_.knots();
  const auto vs = spline_.values();
  const std::size_t i = static_cast<std::size_t>(std::min_element(vs.begin(), vs.end()) - vs.begin());
  const double a = rs[i == 0 ? 0 : i - 1];
  const double b = rs[std::min(i + 1, rs.size() - 1)];
  const double rmin = golden_minimum([this](double x) { return spline_.value(x); }, a, b);
  const double vmin = spline_.value(rmin);
  if (vs[i] <= vmin) return {rs[i], vs[i]};
  return {rmin, vmin};
}

PotentialCurve PotentialCurve::with_tail(LongRangeTail tail) const {
  PotentialCurve out = *this;
  out.dissociation_ = tail.asymptote + tail.shift;
  out.tail_ = std::move(tail);
  return out;
}

PotentialCurve PotentialCurve::with_declared_coefficients(std::map<int, double> cn) const {
  PotentialCurve out = *this;
  out.declared_cn_ = std::move(cn);
  return out;
}

PotentialCurve PotentialCurve::shifted(double delta) const {
  std::vector<double> r(spline_.knots().begin(), spline_.knots().end());
  std::vector<double> v(spline_.values().begin(), spline_.values().end());
  for (double& x : v) x += delta;
  PotentialCurve out(state_, std::move(r), std::move(v), dissociation_ + delta);
  out.declared_cn_ = declared_cn_;
  if (tail_) {
    LongRangeTail t = *tail_;
    t.asymptote += delta;
    out = out.with_tail(t);
  }
  return out;
}

// ---- TransitionDipoleCurve --------------------------------------------------

TransitionDipoleCurve::TransitionDipoleCurve(std::string from_label, std::string to_label,
                                             Orientation orientation, std::vector<double> r,
                                             std::vector<double> d)
    : from_(std::move(from_label)), to_(std::move(to_label)), orientation_(orientation) {
  validate_samples(r, d, "dipole '" + from_ + "-" + to_ + "'");
  spline_ = CubicSpline(std::move(r), std::move(d));
}

double TransitionDipoleCurve::value(double r) const { return spline_.value(r); }

double TransitionDipoleCurve::value_or_edge(double r) const {
  if (r <= spline_.front()) return spline_.values().front();
  if (r >= spline_.back()) return spline_.values().back();
  return spline_.value(r);
}

void TransitionDipoleCurve::check_orientation(int lambda_from, int lambda_to) const {
  const int dl = std::abs(lambda_from - lambda_to);
  const bool ok = (dl == 0 && orientation_ == Orientation::parallel) ||
                  (dl == 1 && orientation_ == Orientation::perpendicular);
  if (!ok) {
    throw InvariantError("dipole '" + from_ + "-" + to_ + "' is " +
                         std::string(to_string(orientation_)) + " but |delta Lambda| = " +
                         std::to_string(dl));
  }
}

// ---- SpinOrbitFunction ------------------------------------------------------

SpinOrbitFunction::SpinOrbitFunction(std::vector<double> r, std::vector<double> w) {
  validate_samples(r, w, "spin-orbit function");
  double scale = 0.0;
  for (double x : w) scale = std::max(scale, std::abs(x));
  const std::size_t n = w.size();
  const std::size_t tail = std::max<std::size_t>(2, n / 10);
  double spread = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) spread = std::max(spread, std::abs(w[i] - w.back()));
  if (spread > 0.1 * scale + 1e-300) {
    throw InvariantError("spin-orbit function does not level off over the last 10% of samples");
  }
  spline_ = CubicSpline(std::move(r), std::move(w));
}

double SpinOrbitFunction::value(double r) const { return spline_.value(r); }

double SpinOrbitFunction::value_or_edge(double r) const {
  if (r <= spline_.front()) return spline_.values().front();
  if (r >= spline_.back()) return spline_.values().back();
  return spline_.value(r);
}

// ---- file I/O ---------------------------------------------------------------

AnyCurve load_curve(std::istream& in, CurveSchema schema) {
  const TableFile t = read_table(in);
  const std::string& kind = t.require("kind");
  const double r_scale = length_factor(t.get("unit_R").value_or("bohr"));
  std::vector<double> r, v;

  switch (schema) {
    case CurveSchema::potential: {
      if (kind != "potential") throw ParseError("expected kind=potential, found '" + kind + "'", 1);
      const double v_scale = energy_factor(t.require("unit_V"));
      read_two_columns(t, r_scale, v_scale, r, v);
      StateLabel state;
      state.label = t.require("label");
      state.lambda = parse_int(t.get("lambda").value_or("0"), "lambda");
      state.spin = parse_spin(t.get("spin").value_or("singlet"));
      state.parity = parse_parity(t.get("parity").value_or("g"));
      std::optional<double> diss;
      if (auto d = t.get("dissociation")) diss = parse_header_double(*d, "dissociation") * v_scale;
      std::map<int, double> cn;
      for (int n : {3, 6, 8, 10}) {
        const std::string key = "C" + std::to_string(n);
        if (auto c = t.get(key)) cn[n] = parse_header_double(*c, key);
      }
      PotentialCurve curve(std::move(state), std::move(r), std::move(v), diss);
      curve = curve.with_declared_coefficients(cn);
      if (auto rm = t.get("tail_r_match")) {
        LongRangeTail tail;
        tail.r_match = parse_header_double(*rm, "tail_r_match");
        tail.coefficients = cn;
        tail.asymptote = parse_header_double(t.require("tail_asymptote"), "tail_asymptote");
        tail.shift = parse_header_double(t.require("tail_shift"), "tail_shift");
        tail.slope_jump = parse_header_double(t.require("tail_slope_jump"), "tail_slope_jump");
        tail.blend_width = parse_header_double(t.require("tail_blend_width"), "tail_blend_width");
        tail.cutoff = parse_header_double(t.require("tail_cutoff"), "tail_cutoff");
        curve = curve.with_tail(tail);
      }
      return curve;
    }
    case CurveSchema::dipole: {
      if (kind != "dipole") throw ParseError("expected kind=dipole, found '" + kind + "'", 1);
      const double d_scale = dipole_factor(t.get("unit_V").value_or("au"));
      read_two_columns(t, r_scale, d_scale, r, v);
      return TransitionDipoleCurve(t.require("from"), t.require("to"),
                                   parse_orientation(t.require("orientation")), std::move(r),
                                   std::move(v));
    }
    case CurveSchema::spin_orbit: {
      if (kind != "spin_orbit") throw ParseError("expected kind=spin_orbit, found '" + kind + "'", 1);
      const double v_scale = energy_factor(t.require("unit_V"));
      read_two_columns(t, r_scale, v_scale, r, v);
      return SpinOrbitFunction(std::move(r), std::move(v));
    }
  }
  throw InternalError("unhandled curve schema");
}

AnyCurve load_curve(const std::filesystem::path& path, CurveSchema schema) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  try {
    return load_curve(in, schema);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  } catch (const InvariantError& e) {
    throw InvariantError(path.string() + ": " + e.what());
  }
}

PotentialCurve load_potential(const std::filesystem::path& path) {
  return std::get<PotentialCurve>(load_curve(path, CurveSchema::potential));
}

TransitionDipoleCurve load_dipole(const std::filesystem::path& path) {
  return std::get<TransitionDipoleCurve>(load_curve(path, CurveSchema::dipole));
}

SpinOrbitFunction load_spin_orbit(const std::filesystem::path& path) {
  return std::get<SpinOrbitFunction>(load_curve(path, CurveSchema::spin_orbit));
}

void write_curve(std::ostream& out, const PotentialCurve& curve) {
  std::map<std::string, std::string> h{
      {"kind", "potential"},
      {"label", curve.label()},
      {"lambda", std::to_string(curve.lambda())},
      {"spin", std::string(to_string(curve.state().spin))},
      {"parity", std::string(to_string(curve.state().parity))},
      {"unit_R", "bohr"},
      {"unit_V", "hartree"},
      {"dissociation", format_double(curve.dissociation_energy())},
  };
  const auto& cn = curve.tail() ? curve.tail()->coefficients : curve.declared_coefficients();
  for (const auto& [n, c] : cn) h["C" + std::to_string(n)] = format_double(c);
  if (const auto& t = curve.tail()) {
    h["tail_r_match"] = format_double(t->r_match);
    h["tail_asymptote"] = format_double(t->asymptote);
    h["tail_shift"] = format_double(t->shift);
    h["tail_slope_jump"] = format_double(t->slope_jump);
    h["tail_blend_width"] = format_double(t->blend_width);
    h["tail_cutoff"] = format_double(t->cutoff);
  }
  const std::vector<std::string> cols{"R_bohr", "V_hartree"};
  const auto rows = two_column_rows(curve.r(), curve.v());
  write_table(out, h, cols, rows, kHeaderOrder);
}

void write_curve(std::ostream& out, const TransitionDipoleCurve& curve) {
  std::map<std::string, std::string> h{{"kind", "dipole"},
                                       {"from", curve.from_label()},
                                       {"to", curve.to_label()},
                                       {"orientation", std::string(to_string(curve.orientation()))},
                                       {"unit_R", "bohr"},
                                       {"unit_V", "au"}};
  const std::vector<std::string> cols{"R_bohr", "d_au"};
  const auto rows = two_column_rows(curve.r(), curve.d());
  write_table(out, h, cols, rows, kHeaderOrder);
}

void write_curve(std::ostream& out, const SpinOrbitFunction& curve) {
  std::map<std::string, std::string> h{{"kind", "spin_orbit"}, {"unit_R", "bohr"}, {"unit_V", "hartree"}};
  const std::vector<std::string> cols{"R_bohr", "W_hartree"};
  const auto rows = two_column_rows(curve.r(), curve.w());
  write_table(out, h, cols, rows, kHeaderOrder);
}

// ---- splice / extend --------------------------------------------------------

PotentialCurve splice(const PotentialCurve& base, const PotentialCurve& patch, double r1, double r2,
                      const SpliceOptions& options) {
  const double w = options.blend_width;
  if (!(r2 > r1)) throw DomainError("splice window must satisfy r1 < r2");
  if (!(w >= 0.0) || 2.0 * w > r2 - r1) {
    throw DomainError("blend width must be non-negative and fit twice into the window");
  }
  if (patch.r().front() > r1 || patch.r().back() < r2) {
    throw DomainError("patch '" + patch.label() + "' does not cover the splice window");
  }
  if (base.r().front() >= r1 || base.r().back() <= r2) {
    throw DomainError("base '" + base.label() + "' does not extend past both window edges");
  }

  auto blended = [&](double r) {
    const double pv = patch.value(r);
    if (w == 0.0) return pv;
    double s = 1.0;
    if (r < r1 + w) s = smoothstep((r - r1) / w);
    else if (r > r2 - w) s = smoothstep((r2 - r) / w);
    if (s >= 1.0) return pv;
    const double bv = base.value(r);
    return bv + s * (pv - bv);
  };

  std::vector<double> r, v;
  for (std::size_t i = 0; i < base.r().size() && base.r()[i] < r1; ++i) {
    r.push_back(base.r()[i]);
    v.push_back(base.v()[i]);
  }
  std::vector<double> inside;
  for (double x : patch.r())
    if (x >= r1 && x <= r2) inside.push_back(x);
  // Keep the bridges resolved: at least 8 knots across each blend zone.
  if (w > 0.0) {
    for (auto [lo, hi] : {std::pair{r1, r1 + w}, std::pair{r2 - w, r2}}) {
      const auto count = std::count_if(inside.begin(), inside.end(),
                                       [&](double x) { return x >= lo && x <= hi; });
      if (count < 8) {
        for (int k = 0; k <= 8; ++k) inside.push_back(lo + (hi - lo) * k / 8.0);
      }
    }
    std::sort(inside.begin(), inside.end());
    inside.erase(std::unique(inside.begin(), inside.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 inside.end());
  }
  for (double x : inside) {
    r.push_back(x);
    v.push_back(blended(x));
  }
  for (std::size_t i = 0; i < base.r().size(); ++i) {
    if (base.r()[i] > r2) {
      r.push_back(base.r()[i]);
      v.push_back(base.v()[i]);
    }
  }
  StateLabel state = base.state();
  PotentialCurve out(std::move(state), std::move(r), std::move(v), base.dissociation_energy());
  return out.with_declared_coefficients(base.declared_coefficients());
}

ExtensionResult extend_long_range(const PotentialCurve& curve, const std::map<int, double>& cn,
                                  double r_match, const ExtensionOptions& options) {
  for (const auto& [n, c] : cn) {
    if (n != 3 && n != 6 && n != 8 && n != 10) {
      throw DomainError("unsupported long-range power n = " + std::to_string(n));
    }
  }
  if (!(r_match > curve.r().front() && r_match <= curve.r().back())) {
    throw DomainError("matching point must lie inside the tabulated range");
  }
  if (!(options.blend_width > 0.0)) throw DomainError("blend width must be positive");
  if (!(options.cutoff > r_match + options.blend_width)) {
    throw DomainError("cutoff must lie beyond the matching blend");
  }

  LongRangeTail tail;
  tail.r_match = r_match;
  tail.coefficients = cn;
  tail.asymptote = curve.dissociation_energy();
  tail.blend_width = options.blend_width;
  tail.cutoff = options.cutoff;

  const double v_data = curve.value(r_match);
  const double dv_data = curve.derivative(r_match);
  double raw = tail.asymptote, draw = 0.0;
  for (const auto& [n, c] : cn) {
    raw -= c / std::pow(r_match, n);
    draw += n * c / std::pow(r_match, n + 1);
  }
  tail.slope_jump = dv_data - draw;
  tail.shift = v_data - raw + tail.slope_jump * tail.blend_width / 3.0;

  ExtensionResult result{curve.with_tail(tail), tail.shift, {}};
  const double vmin = curve.minimum().v;
  const double depth_before = tail.asymptote - vmin;
  const double depth_after = tail.asymptote + tail.shift - vmin;
  if ((depth_before > 0.0) != (depth_after > 0.0)) {
    result.warnings.push_back("tail shift " + std::to_string(tail.shift) +
                              " hartree changes the sign of the well depth");
  }
  // Monotonic approach to the asymptote over the extension region.
  const double d_end = tail.derivative(options.cutoff);
  const int want = d_end > 0.0 ? 1 : (d_end < 0.0 ? -1 : 0);
  if (want != 0) {
    const int steps = 400;
    for (int k = 0; k <= steps; ++k) {
      const double rr = r_match + (options.cutoff - r_match) * k / steps;
      const double d = tail.derivative(rr);
      if (d * want < 0.0) {
        result.warnings.push_back("extension is not monotonic near R = " + std::to_string(rr));
        break;
      }
    }
  }
  return result;
}

}  // namespace dynpol
