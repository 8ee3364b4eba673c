#include "dynpol/vibsolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "dynpol/error.hpp"
#include "dynpol/spline.hpp"
#include "dynpol/table_io.hpp"
#include "dynpol/units.hpp"

namespace dynpol {

namespace {

constexpr double kPi = std::numbers::pi;

// Solves (e^{b d0} - 1) / (1 - e^{-b d2}) = q for b > 0 by bisection.
double solve_wall_exponent(double d0, double d2, double q) {
  auto f = [&](double b) { return std::expm1(b * d0) / -std::expm1(-b * d2) - q; };
  double lo = 1e-12, hi = 1.0;
  while (f(hi) < 0.0 && hi < 1e6) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::MatrixXd fourier_derivative(std::size_t n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double nn = static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (j == k) continue;
      const long diff = static_cast<long>(j) - static_cast<long>(k);
      const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
      d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          (kPi / nn) * sign / std::sin(kPi * static_cast<double>(diff) / nn);
    }
  }
  return d;
}

void check_symmetric(const Eigen::MatrixXd& h) {
  const double scale = h.cwiseAbs().maxCoeff();
  const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-10 * std::max(scale, 1e-300))) {
    throw InternalError("assembled Hamiltonian is not symmetric (max asymmetry " +
                        std::to_string(asym) + ")");
  }
}

// Flips each column so its first non-negligible component is positive.
void fix_signs(Eigen::MatrixXd& vecs) {
  for (Eigen::Index c = 0; c < vecs.cols(); ++c) {
    auto col = vecs.col(c);
    const double cut = 1e-3 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > cut) {
        if (col(i) < 0.0) col *= -1.0;
        break;
      }
    }
  }
}

struct Eigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

Eigenpairs diagonalize(Eigen::MatrixXd h) {
  check_symmetric(h);
  h = 0.5 * (h + h.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw InternalError("symmetric eigensolver failed to converge");
  Eigenpairs out{es.eigenvalues(), es.eigenvectors()};
  fix_signs(out.vectors);
  return out;
}

// Orders by energy; near-degenerate runs are ordered by channel-0 weight, descending.
void order_levels(Eigen::VectorXd& e, Eigen::MatrixXd& vecs, std::size_t n_grid) {
  const auto m = static_cast<std::size_t>(e.size());
  std::vector<double> w0(m);
  for (std::size_t i = 0; i < m; ++i) {
    w0[i] = vecs.col(static_cast<Eigen::Index>(i)).head(static_cast<Eigen::Index>(n_grid)).squaredNorm();
  }
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return e[a] < e[b]; });
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i + 1;
    while (j < m && e[idx[j]] - e[idx[i]] <= 1e-11 + 1e-12 * std::abs(e[idx[i]])) ++j;
    std::stable_sort(idx.begin() + static_cast<long>(i), idx.begin() + static_cast<long>(j),
                     [&](std::size_t a, std::size_t b) { return w0[a] > w0[b]; });
    i = j;
  }
  Eigen::VectorXd e2(e.size());
  Eigen::MatrixXd v2(vecs.rows(), vecs.cols());
  for (std::size_t i = 0; i < m; ++i) {
    e2[static_cast<Eigen::Index>(i)] = e[idx[i]];
    v2.col(static_cast<Eigen::Index>(i)) = vecs.col(static_cast<Eigen::Index>(idx[i]));
  }
  e = std::move(e2);
  vecs = std::move(v2);
}

Eigen::VectorXd potential_on_grid(const PotentialCurve& pot, const MappedGrid& grid) {
  const ExtendedPotential ext(pot);
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) v[static_cast<Eigen::Index>(j)] = ext(grid.r()[j]);
  return v;
}

double lowest_coupled_threshold(const PotentialCurve& a, const PotentialCurve& b,
                                const SpinOrbitFunction& so) {
  const double da = a.dissociation_energy();
  const double db = b.dissociation_energy();
  const double w = so.w().back();
  return 0.5 * (da + db) - std::sqrt(0.25 * (da - db) * (da - db) + w * w);
}

// psi = phi / sqrt(J) on the source grid, resampled onto target as sqrt(J') psi.
Eigen::VectorXd project(const MappedGrid& src, Eigen::Ref<const Eigen::VectorXd> phi,
                        const MappedGrid& dst) {
  std::vector<double> psi(src.size());
  for (std::size_t j = 0; j < src.size(); ++j) {
    psi[j] = phi[static_cast<Eigen::Index>(j)] / std::sqrt(src.jacobian()[j]);
  }
  const CubicSpline spline(std::vector<double>(src.r().begin(), src.r().end()), std::move(psi));
  Eigen::VectorXd out(static_cast<Eigen::Index>(dst.size()));
  for (std::size_t j = 0; j < dst.size(); ++j) {
    const double r = dst.r()[j];
    out[static_cast<Eigen::Index>(j)] =
        spline.contains(r) ? spline.value(r) * std::sqrt(dst.jacobian()[j]) : 0.0;
  }
  return out;
}

double density(const MappedGrid& g) {
  return static_cast<double>(g.size()) / (g.r().back() - g.r().front());
}

struct ChannelPair {
  std::size_t ci;
  std::size_t cf;
};

ChannelPair match_channels(const VibrationalSolution& sol_i, const TransitionDipoleCurve& dipole,
                           const VibrationalSolution& sol_f) {
  auto a = sol_i.channel_index(dipole.from_label());
  auto b = sol_f.channel_index(dipole.to_label());
  if (a && b) return {*a, *b};
  a = sol_i.channel_index(dipole.to_label());
  b = sol_f.channel_index(dipole.from_label());
  if (a && b) return {*a, *b};
  throw DomainError("dipole '" + dipole.from_label() + "-" + dipole.to_label() +
                    "' does not link the channels of the two solutions");
}

void check_level(const VibrationalSolution& sol, std::size_t v) {
  if (v >= sol.level_count()) {
    throw DomainError("level " + std::to_string(v) + " out of range (" +
                      std::to_string(sol.level_count()) + " levels)");
  }
}

}  // namespace

// ---- ExtendedPotential ------------------------------------------------------

ExtendedPotential::ExtendedPotential(const PotentialCurve& curve) : curve_(&curve) {
  const auto r = curve.r();
  const auto v = curve.v();
  const double d0 = r[1] - r[0], d2 = r[2] - r[1];
  const double q = (v[0] - v[1]) / (v[1] - v[2]);
  r1_ = r[1];
  if (v[0] > v[1] && v[1] > v[2] && q > d0 / d2) {
    exponential_ = true;
    b_ = solve_wall_exponent(d0, d2, q);
    a_ = (v[1] - v[2]) / -std::expm1(-b_ * d2);
    c_ = v[1] - a_;
  } else {
    slope_ = (v[1] - v[0]) / d0;
  }
}

double ExtendedPotential::operator()(double r) const {
  if (r >= curve_->r_min()) return curve_->value(r);
  if (exponential_) return c_ + a_ * std::exp(-b_ * (r - r1_));
  return curve_->v()[0] + slope_ * (r - curve_->r_min());
}

// ---- MappedGrid -------------------------------------------------------------

MappedGrid::MappedGrid(std::vector<double> r, std::vector<double> jacobian, double envelope_energy,
                       double beta, double e_floor, bool inner_extrapolated)
    : r_(std::move(r)),
      jacobian_(std::move(jacobian)),
      envelope_energy_(envelope_energy),
      beta_(beta),
      e_floor_(e_floor),
      inner_extrapolated_(inner_extrapolated) {
  if (r_.size() != jacobian_.size() || r_.size() < 3) throw InvariantError("malformed mapped grid");
  for (std::size_t i = 0; i < r_.size(); ++i) {
    if (!(jacobian_[i] > 0.0)) throw InvariantError("mapped grid jacobian must be positive");
    if (i && !(r_[i] > r_[i - 1])) throw InvariantError("mapped grid points must increase");
  }
}

double grid_momentum(double v_env, double mu, double e_max, double e_floor) {
  // smooth max(E_max - V, E_floor)
  const double de = e_max - v_env;
  const double k = 0.5 * (de + e_floor + std::sqrt((de - e_floor) * (de - e_floor) + e_floor * e_floor));
  return std::sqrt(2.0 * mu * k);
}

MappedGrid build_grid(std::span<const PotentialCurve* const> potentials, double mu, double e_max,
                      const GridOptions& options) {
  if (potentials.empty()) throw DomainError("build_grid needs at least one potential");
  if (!(options.beta >= 1.0)) throw DomainError("oversampling factor beta must be >= 1");
  if (!(mu > 0.0)) throw DomainError("reduced mass must be positive");

  std::vector<ExtendedPotential> ext;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const PotentialCurve* p : potentials) {
    ext.emplace_back(*p);
    lo = std::max(lo, p->r_min());
    hi = std::min(hi, p->r_max());
  }
  if (!(hi > lo)) throw DomainError("potentials have no common support");
  auto venv = [&](double r) {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& e : ext) v = std::min(v, e(r));
    return v;
  };

  const double inner = options.r_min ? *options.r_min : lo * options.inner_limit;
  const double outer = options.r_max ? *options.r_max : hi;
  if (outer > hi) throw DomainError("grid r_max beyond the potentials' support");
  if (!(outer > inner)) throw DomainError("empty grid range");

  const int m = std::max(options.aux_points, 101);
  const double dr = (outer - inner) / (m - 1);
  std::vector<double> aux_r(static_cast<std::size_t>(m)), aux_v(static_cast<std::size_t>(m));
  double vmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k) {
    aux_r[static_cast<std::size_t>(k)] = k == m - 1 ? outer : inner + k * dr;
    aux_v[static_cast<std::size_t>(k)] = venv(aux_r[static_cast<std::size_t>(k)]);
    if (aux_r[static_cast<std::size_t>(k)] >= lo) vmin = std::min(vmin, aux_v[static_cast<std::size_t>(k)]);
  }
  if (!(e_max > vmin)) {
    throw DomainError("envelope energy " + std::to_string(e_max) +
                      " lies below every potential minimum (" + std::to_string(vmin) + ")");
  }
  const double e_floor = options.e_floor > 0.0 ? options.e_floor : 0.5 * (e_max - vmin);

  double r_min = inner, r_max = outer;
  if (!options.r_min || !options.r_max) {
    std::size_t first = aux_r.size(), last = 0;
    for (std::size_t k = 0; k < aux_r.size(); ++k) {
      if (aux_v[k] < e_max) {
        first = std::min(first, k);
        last = k;
      }
    }
    auto kappa = [&](std::size_t k) { return std::sqrt(2.0 * mu * std::max(aux_v[k] - e_max, 0.0)); };
    if (!options.r_min) {
      double depth = 0.0;
      std::size_t k = first;
      while (k > 0 && depth < options.tunnel_depth) {
        depth += 0.5 * (kappa(k) + kappa(k - 1)) * dr;
        --k;
      }
      r_min = aux_r[k];
    }
    if (!options.r_max) {
      double depth = 0.0;
      std::size_t k = last;
      while (k + 1 < aux_r.size() && depth < options.tunnel_depth) {
        depth += 0.5 * (kappa(k) + kappa(k + 1)) * dr;
        ++k;
      }
      r_max = aux_r[k];
    }
  }

  // Cumulative mapped coordinate X(R) = int rho dR by panel-wise Simpson.
  auto rho = [&](double r) { return options.beta * grid_momentum(venv(r), mu, e_max, e_floor) / kPi; };
  const int q = m;
  const double h = (r_max - r_min) / (q - 1);
  std::vector<double> t(static_cast<std::size_t>(q)), x(static_cast<std::size_t>(q)),
      rt(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) {
    t[static_cast<std::size_t>(k)] = k == q - 1 ? r_max : r_min + k * h;
    rt[static_cast<std::size_t>(k)] = rho(t[static_cast<std::size_t>(k)]);
  }
  x[0] = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double a = t[k], b = t[k + 1];
    x[k + 1] = x[k] + (b - a) / 6.0 * (rt[k] + 4.0 * rho(0.5 * (a + b)) + rt[k + 1]);
  }
  const double total = x.back();
  auto n = static_cast<std::size_t>(std::ceil(total + 1.0));
  if (n % 2 == 0) ++n;
  n = std::max<std::size_t>(n, 3);
  const double s = total / static_cast<double>(n - 1);

  std::vector<double> gr(n), gj(n);
  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double r;
    if (j == 0) {
      r = r_min;
    } else if (j == n - 1) {
      r = r_max;
    } else {
      const double target = static_cast<double>(j) * s;
      while (k + 2 < x.size() && x[k + 1] < target) ++k;
      // Invert the cubic Hermite of X on [t_k, t_k+1] (slopes rho) by safeguarded Newton.
      const double a = t[k], b = t[k + 1], w = b - a;
      const double x0 = x[k], x1 = x[k + 1], m0 = rt[k] * w, m1 = rt[k + 1] * w;
      auto herm = [&](double u) {
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * x0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * x1 +
               (u3 - u2) * m1;
      };
      auto dherm = [&](double u) {
        const double u2 = u * u;
        return (6 * u2 - 6 * u) * x0 + (3 * u2 - 4 * u + 1) * m0 + (-6 * u2 + 6 * u) * x1 +
               (3 * u2 - 2 * u) * m1;
      };
      double u = (target - x0) / (x1 - x0), ulo = 0.0, uhi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double f = herm(u) - target;
        if (f > 0.0) uhi = u; else ulo = u;
        const double df = dherm(u);
        double next = df > 0.0 ? u - f / df : 0.5 * (ulo + uhi);
        if (!(next > ulo && next < uhi)) next = 0.5 * (ulo + uhi);
        if (std::abs(next - u) < 1e-15) {
          u = next;
          break;
        }
        u = next;
      }
      r = a + u * w;
    }
    gr[j] = r;
    gj[j] = s / rho(r);
  }
  return MappedGrid(std::move(gr), std::move(gj), e_max, options.beta, e_floor, r_min < lo);
}

MappedGrid build_grid(const PotentialCurve& potential, double mu, double e_max,
                      const GridOptions& options) {
  const PotentialCurve* p[] = {&potential};
  return build_grid(std::span<const PotentialCurve* const>(p), mu, e_max, options);
}

MappedGrid build_grid(const PotentialCurve& a, const PotentialCurve& b, double mu, double e_max,
                      const GridOptions& options) {
  const PotentialCurve* p[] = {&a, &b};
  return build_grid(std::span<const PotentialCurve* const>(p), mu, e_max, options);
}

// ---- VibrationalSolution ----------------------------------------------------

VibrationalSolution::VibrationalSolution(MappedGrid grid, std::vector<ChannelInfo> channels,
                                         double reduced_mass, Eigen::VectorXd energies,
                                         Eigen::MatrixXd wavefunctions, double threshold)
    : grid_(std::move(grid)),
      channels_(std::move(channels)),
      reduced_mass_(reduced_mass),
      energies_(std::move(energies)),
      wavefunctions_(std::move(wavefunctions)),
      threshold_(threshold) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  const auto nc = static_cast<Eigen::Index>(channels_.size());
  if (wavefunctions_.rows() != n * nc || wavefunctions_.cols() != energies_.size()) {
    throw InternalError("wavefunction matrix shape does not match grid and channels");
  }
  fractions_.resize(energies_.size(), nc);
  for (Eigen::Index v = 0; v < energies_.size(); ++v) {
    for (Eigen::Index c = 0; c < nc; ++c) {
      fractions_(v, c) = wavefunctions_.col(v).segment(c * n, n).squaredNorm();
    }
    const double total = fractions_.row(v).sum();
    if (total > 0.0) fractions_.row(v) /= total;
    if (energies_[v] < threshold_) ++bound_count_;
  }
}

std::optional<std::size_t> VibrationalSolution::channel_index(const std::string& label) const {
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i].state.label == label) return i;
  }
  return std::nullopt;
}

double VibrationalSolution::energy(std::size_t v) const {
  check_level(*this, v);
  return energies_[static_cast<Eigen::Index>(v)];
}

Eigen::Ref<const Eigen::VectorXd> VibrationalSolution::wavefunction(std::size_t v) const {
  check_level(*this, v);
  return wavefunctions_.col(static_cast<Eigen::Index>(v));
}

Eigen::Ref<const Eigen::VectorXd> VibrationalSolution::wavefunction(std::size_t v,
                                                                    std::size_t channel) const {
  check_level(*this, v);
  if (channel >= channels_.size()) throw DomainError("channel index out of range");
  const auto n = static_cast<Eigen::Index>(grid_.size());
  return wavefunctions_.col(static_cast<Eigen::Index>(v)).segment(static_cast<Eigen::Index>(channel) * n, n);
}

double VibrationalSolution::channel_fraction(std::size_t v, std::size_t channel) const {
  check_level(*this, v);
  if (channel >= channels_.size()) throw DomainError("channel index out of range");
  return fractions_(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(channel));
}

std::size_t VibrationalSolution::envelope_count() const {
  return static_cast<std::size_t>(
      (energies_.array() < grid_.envelope_energy()).count());
}

int VibrationalSolution::node_count(std::size_t v) const {
  const auto phi = wavefunction(v, 0);
  std::vector<double> psi(grid_.size());
  double peak = 0.0;
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    psi[j] = phi[static_cast<Eigen::Index>(j)] / std::sqrt(grid_.jacobian()[j]);
    peak = std::max(peak, std::abs(psi[j]));
  }
  const double cut = 1e-4 * peak;
  int nodes = 0;
  int last = 0;
  for (double p : psi) {
    if (std::abs(p) < cut) continue;
    const int sgn = p > 0.0 ? 1 : -1;
    if (last != 0 && sgn != last) ++nodes;
    last = sgn;
  }
  return nodes;
}

// ---- solvers ----------------------------------------------------------------

Eigen::MatrixXd kinetic_matrix(const MappedGrid& grid, double mu) {
  if (!(mu > 0.0)) throw DomainError("reduced mass must be positive");
  const std::size_t n = grid.size();
  const Eigen::MatrixXd d = fourier_derivative(n);
  Eigen::VectorXd inv_j(static_cast<Eigen::Index>(n)), a(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    inv_j[static_cast<Eigen::Index>(j)] = 1.0 / grid.jacobian()[j];
    a[static_cast<Eigen::Index>(j)] = 1.0 / std::sqrt(grid.jacobian()[j]);
  }
  const Eigen::MatrixXd inner = (d * inv_j.asDiagonal()) * d;
  return (-0.5 / mu) * (a.asDiagonal() * inner * a.asDiagonal());
}

VibrationalSolution solve_single(const PotentialCurve& potential, double mu, const MappedGrid& grid) {
  Eigen::MatrixXd h = kinetic_matrix(grid, mu);
  h.diagonal() += potential_on_grid(potential, grid);
  Eigenpairs ep = diagonalize(std::move(h));
  order_levels(ep.values, ep.vectors, grid.size());
  std::vector<ChannelInfo> ch{{potential.state(), potential.dissociation_energy()}};
  return VibrationalSolution(grid, std::move(ch), mu, std::move(ep.values), std::move(ep.vectors),
                             potential.dissociation_energy());
}

VibrationalSolution solve_coupled(const PotentialCurve& pot_a, const PotentialCurve& pot_b,
                                  const SpinOrbitFunction& so, double mu, const MappedGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd w(n);
  for (Eigen::Index j = 0; j < n; ++j) w[j] = so.value_or_edge(grid.r()[static_cast<std::size_t>(j)]);
  const Eigen::MatrixXd t = kinetic_matrix(grid, mu);
  const Eigen::VectorXd va = potential_on_grid(pot_a, grid);
  const Eigen::VectorXd vb = potential_on_grid(pot_b, grid);

  Eigen::VectorXd values(2 * n);
  Eigen::MatrixXd vectors = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  if ((w.array() == 0.0).all()) {
    Eigen::MatrixXd ha = t;
    ha.diagonal() += va;
    Eigen::MatrixXd hb = t;
    hb.diagonal() += vb;
    Eigenpairs ea = diagonalize(std::move(ha));
    Eigenpairs eb = diagonalize(std::move(hb));
    values << ea.values, eb.values;
    vectors.topLeftCorner(n, n) = ea.vectors;
    vectors.bottomRightCorner(n, n) = eb.vectors;
  } else {
    Eigen::MatrixXd h(2 * n, 2 * n);
    h.topLeftCorner(n, n) = t;
    h.bottomRightCorner(n, n) = t;
    h.topLeftCorner(n, n).diagonal() += va;
    h.bottomRightCorner(n, n).diagonal() += vb;
    h.topRightCorner(n, n) = w.asDiagonal();
    h.bottomLeftCorner(n, n) = w.asDiagonal();
    Eigenpairs ep = diagonalize(std::move(h));
    values = std::move(ep.values);
    vectors = std::move(ep.vectors);
  }
  order_levels(values, vectors, grid.size());
  std::vector<ChannelInfo> ch{{pot_a.state(), pot_a.dissociation_energy()},
                              {pot_b.state(), pot_b.dissociation_energy()}};
  return VibrationalSolution(grid, std::move(ch), mu, std::move(values), std::move(vectors),
                             lowest_coupled_threshold(pot_a, pot_b, so));
}

AdiabaticCurves adiabatic_curves(const PotentialCurve& pot_a, const PotentialCurve& pot_b,
                                 const SpinOrbitFunction& so, std::span<const double> r) {
  AdiabaticCurves out;
  for (double x : r) {
    const double va = pot_a.value(x), vb = pot_b.value(x), w = so.value_or_edge(x);
    const double mean = 0.5 * (va + vb);
    const double half = std::sqrt(0.25 * (va - vb) * (va - vb) + w * w);
    out.r.push_back(x);
    out.lower.push_back(mean - half);
    out.upper.push_back(mean + half);
  }
  return out;
}

// ---- radial integrals -------------------------------------------------------

double radial_matrix_element(const VibrationalSolution& sol_i, std::size_t v_i, std::size_t ch_i,
                             const std::function<double(double)>& f,
                             const VibrationalSolution& sol_f, std::size_t v_f, std::size_t ch_f) {
  check_level(sol_i, v_i);
  check_level(sol_f, v_f);
  const auto pi = sol_i.wavefunction(v_i, ch_i);
  const auto pf = sol_f.wavefunction(v_f, ch_f);
  const MappedGrid* g = &sol_f.grid();
  Eigen::VectorXd a, b;
  if (sol_i.grid() == sol_f.grid()) {
    a = pi;
    b = pf;
  } else if (density(sol_i.grid()) >= density(sol_f.grid())) {
    g = &sol_i.grid();
    a = pi;
    b = project(sol_f.grid(), pf, sol_i.grid());
  } else {
    a = project(sol_i.grid(), pi, sol_f.grid());
    b = pf;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < g->size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    sum += a[jj] * f(g->r()[j]) * b[jj];
  }
  return sum;
}

double vibronic_tdm(const VibrationalSolution& sol_i, std::size_t v_i,
                    const TransitionDipoleCurve& dipole, const VibrationalSolution& sol_f,
                    std::size_t v_f) {
  const ChannelPair cp = match_channels(sol_i, dipole, sol_f);
  return radial_matrix_element(
      sol_i, v_i, cp.ci, [&dipole](double r) { return dipole.value_or_edge(r); }, sol_f, v_f, cp.cf);
}

double dipole_squared_expectation(const VibrationalSolution& sol_i, std::size_t v_i,
                                  const TransitionDipoleCurve& dipole) {
  auto c = sol_i.channel_index(dipole.from_label());
  if (!c) c = sol_i.channel_index(dipole.to_label());
  if (!c) throw DomainError("dipole does not touch any channel of the solution");
  return radial_matrix_element(
      sol_i, v_i, *c,
      [&dipole](double r) {
        const double d = dipole.value_or_edge(r);
        return d * d;
      },
      sol_i, v_i, *c);
}

Eigen::VectorXd vibronic_tdm_row(const VibrationalSolution& sol_i, std::size_t v_i,
                                 const TransitionDipoleCurve& dipole,
                                 const VibrationalSolution& sol_f) {
  check_level(sol_i, v_i);
  const ChannelPair cp = match_channels(sol_i, dipole, sol_f);
  const auto nf = static_cast<Eigen::Index>(sol_f.grid().size());
  const auto levels = static_cast<Eigen::Index>(sol_f.level_count());
  Eigen::VectorXd out(levels);
  const bool same = sol_i.grid() == sol_f.grid();
  if (same || density(sol_f.grid()) >= density(sol_i.grid())) {
    Eigen::VectorXd u = same ? Eigen::VectorXd(sol_i.wavefunction(v_i, cp.ci))
                             : project(sol_i.grid(), sol_i.wavefunction(v_i, cp.ci), sol_f.grid());
    for (Eigen::Index j = 0; j < nf; ++j) u[j] *= dipole.value_or_edge(sol_f.grid().r()[static_cast<std::size_t>(j)]);
    // Levels of sol_f, restricted to the channel block cp.cf.
    for (Eigen::Index v = 0; v < levels; ++v) {
      out[v] = u.dot(sol_f.wavefunction(static_cast<std::size_t>(v), cp.cf));
    }
    return out;
  }
  const MappedGrid& g = sol_i.grid();
  Eigen::VectorXd u = sol_i.wavefunction(v_i, cp.ci);
  for (std::size_t j = 0; j < g.size(); ++j) u[static_cast<Eigen::Index>(j)] *= dipole.value_or_edge(g.r()[j]);
  for (Eigen::Index v = 0; v < levels; ++v) {
    out[v] = u.dot(project(sol_f.grid(), sol_f.wavefunction(static_cast<std::size_t>(v), cp.cf), g));
  }
  return out;
}

// ---- output -----------------------------------------------------------------

void write_levels(std::ostream& out, const VibrationalSolution& sol, const std::string& label) {
  std::string channels;
  for (const auto& c : sol.channels()) channels += (channels.empty() ? "" : ";") + c.state.label;
  std::map<std::string, std::string> h{
      {"kind", "levels"},
      {"label", label},
      {"channels", channels},
      {"unit_E", "hartree"},
      {"threshold", format_double(sol.threshold())},
      {"bound_count", std::to_string(sol.bound_count())},
      {"grid_points", std::to_string(sol.grid().size())},
      {"beta", format_double(sol.grid().beta())},
      {"inner_wall_extrapolated", sol.grid().inner_extrapolated() ? "1" : "0"},
  };
  std::vector<std::string> cols{"v", "E_hartree", "E_cm-1", "bound"};
  for (const auto& c : sol.channels()) cols.push_back("frac_" + c.state.label);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t v = 0; v < sol.level_count(); ++v) {
    const double e = sol.energy(v);
    std::vector<std::string> row{std::to_string(v), format_double(e), format_double(hartree_to_cm1(e)),
                                 e < sol.threshold() ? "1" : "0"};
    for (std::size_t c = 0; c < sol.channel_count(); ++c) row.push_back(format_double(sol.channel_fraction(v, c)));
    rows.push_back(std::move(row));
  }
  const std::vector<std::string> order{"kind", "label", "channels"};
  write_table(out, h, cols, rows, order);
}

void write_wavefunctions(std::ostream& out, const VibrationalSolution& sol, const std::string& label,
                         std::size_t levels) {
  levels = std::min(levels, sol.level_count());
  std::map<std::string, std::string> h{{"kind", "wavefunctions"},
                                       {"label", label},
                                       {"unit_R", "bohr"},
                                       {"levels", std::to_string(levels)}};
  std::vector<std::string> cols{"R_bohr", "jacobian"};
  for (std::size_t v = 0; v < levels; ++v)
    for (const auto& c : sol.channels()) cols.push_back("psi_" + std::to_string(v) + "_" + c.state.label);
  std::vector<std::vector<std::string>> rows;
  const auto& g = sol.grid();
  for (std::size_t j = 0; j < g.size(); ++j) {
    std::vector<std::string> row{format_double(g.r()[j]), format_double(g.jacobian()[j])};
    const double sj = std::sqrt(g.jacobian()[j]);
    for (std::size_t v = 0; v < levels; ++v)
      for (std::size_t c = 0; c < sol.channel_count(); ++c)
        row.push_back(format_double(sol.wavefunction(v, c)[static_cast<Eigen::Index>(j)] / sj));
    rows.push_back(std::move(row));
  }
  const std::vector<std::string> order{"kind", "label"};
  write_table(out, h, cols, rows, order);
}

}  // namespace dynpol
