#pragma once

#include <span>
#include <vector>

namespace decay {

/// Not-a-knot cubic interpolating spline on strictly increasing abscissae.
/// Evaluation outside [front, back] is the caller's business; the cubic of
/// the nearest end segment is used.
class CubicSpline {
public:
  CubicSpline(std::span<const double> x, std::span<const double> y);

  double operator()(double x) const;
  double derivative(double x) const;

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }

private:
  std::size_t segment(double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

}  // namespace decay
