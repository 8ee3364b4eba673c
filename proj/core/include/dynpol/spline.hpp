#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dynpol {

/// Natural cubic spline through strictly increasing knots. Evaluation outside
/// [front, back] throws DomainError; there is no silent extrapolation.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const { return value(x); }
  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  bool contains(double x) const { return !x_.empty() && x >= x_.front() && x <= x_.back(); }
  std::span<const double> knots() const { return x_; }
  std::span<const double> values() const { return y_; }
  bool empty() const { return x_.empty(); }

 private:
  std::size_t segment(double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

}  // namespace dynpol
