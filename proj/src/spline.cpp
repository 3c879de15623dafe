#include "decay/spline.hpp"

#include "decay/error.hpp"

#include <Eigen/Sparse>

#include <algorithm>

namespace decay {

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
  const std::size_t n = x_.size();
  if (n != y_.size()) throw InvalidArgument("spline: abscissa and ordinate counts differ");
  if (n < 4) throw InvalidArgument("spline: need at least 4 knots");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw InvalidArgument("spline: abscissae must be strictly increasing");
  }

  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> entries;
  entries.reserve(3 * n + 2);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  const auto at = [](std::size_t i) { return static_cast<Eigen::Index>(i); };

  // not-a-knot: third derivative continuous across the second and the
  // second-to-last knot
  entries.emplace_back(0, 0, h[1]);
  entries.emplace_back(0, 1, -(h[0] + h[1]));
  entries.emplace_back(0, 2, h[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    entries.emplace_back(at(i), at(i - 1), h[i - 1]);
    entries.emplace_back(at(i), at(i), 2.0 * (h[i - 1] + h[i]));
    entries.emplace_back(at(i), at(i + 1), h[i]);
    rhs(at(i)) = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
  }
  const std::size_t l = n - 1;
  entries.emplace_back(at(l), at(l - 2), h[l - 1]);
  entries.emplace_back(at(l), at(l - 1), -(h[l - 2] + h[l - 1]));
  entries.emplace_back(at(l), at(l), h[l - 2]);

  Eigen::SparseMatrix<double> a(at(n), at(n));
  a.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw InvalidArgument("spline: singular knot system");
  const Eigen::VectorXd m = lu.solve(rhs);
  for (std::size_t i = 0; i < n; ++i) m_[i] = m(at(i));
}

std::size_t CubicSpline::segment(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  if (it == x_.begin()) return 0;
  const auto i = static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

double CubicSpline::operator()(double x) const {
  const std::size_t i = segment(x);
  if (x == x_[i]) return y_[i];
  if (x == x_[i + 1]) return y_[i + 1];
  const double h = x_[i + 1] - x_[i];
  const double a = x_[i + 1] - x;
  const double b = x - x_[i];
  return m_[i] * a * a * a / (6.0 * h) + m_[i + 1] * b * b * b / (6.0 * h) +
         (y_[i] / h - m_[i] * h / 6.0) * a + (y_[i + 1] / h - m_[i + 1] * h / 6.0) * b;
}

double CubicSpline::derivative(double x) const {
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double a = x_[i + 1] - x;
  const double b = x - x_[i];
  return -m_[i] * a * a / (2.0 * h) + m_[i + 1] * b * b / (2.0 * h) + (y_[i + 1] - y_[i]) / h -
         (m_[i + 1] - m_[i]) * h / 6.0;
}

}  // namespace decay
