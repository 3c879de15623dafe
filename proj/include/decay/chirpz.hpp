#pragma once

#include "decay/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <vector>

namespace decay {

/// Bluestein evaluation of X_j = sum_{n<N} x_n exp(i theta n j), j = 0..M-1,
/// with three FFTs of a 2-3-5 smooth length >= N + M - 1. Holds FFT plans,
/// so use one instance per thread.
class ChirpZ {
public:
  ChirpZ(Eigen::Index inputs, Eigen::Index outputs, double theta);

  Eigen::Index inputs() const { return n_; }
  Eigen::Index outputs() const { return m_; }
  Eigen::Index fft_length() const { return static_cast<Eigen::Index>(kernel_.size()); }

  /// `x` may be shorter than `inputs()`; missing samples are zero.
  ComplexVector operator()(const ComplexVector& x);

private:
  Eigen::Index n_;
  Eigen::Index m_;
  std::vector<Complex> chirp_;   // exp(i theta k^2 / 2), k < max(N, M)
  std::vector<Complex> kernel_;  // FFT of exp(-i theta k^2 / 2) wrapped to the FFT length
  std::vector<Complex> work_;
  std::vector<Complex> spectrum_;
  Eigen::FFT<double> fft_;
};

/// Smallest integer >= n whose only prime factors are 2, 3 and 5.
Eigen::Index smooth_length(Eigen::Index n);

}  // namespace decay
