#include "decay/chirpz.hpp"

#include "decay/error.hpp"

#include <cmath>
#include <numbers>

namespace decay {

Eigen::Index smooth_length(Eigen::Index n) {
  for (Eigen::Index m = std::max<Eigen::Index>(n, 1);; ++m) {
    Eigen::Index r = m;
    for (Eigen::Index p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

ChirpZ::ChirpZ(Eigen::Index inputs, Eigen::Index outputs, double theta) : n_(inputs), m_(outputs) {
  if (inputs < 1 || outputs < 1) throw InvalidArgument("chirp-z transform needs at least one input and output");
  const Eigen::Index len = smooth_length(inputs + outputs - 1);
  const Eigen::Index span = std::max(inputs, outputs);

  // theta k^2 / 2 reduced modulo 2 pi in extended precision; k^2 grows past 1e8
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double half = std::fmod(0.5L * static_cast<long double>(theta), two_pi);
  chirp_.resize(static_cast<std::size_t>(span));
  for (Eigen::Index k = 0; k < span; ++k) {
    const long double kk = static_cast<long double>(k) * static_cast<long double>(k);
    chirp_[static_cast<std::size_t>(k)] = std::polar(1.0, static_cast<double>(std::fmod(half * kk, two_pi)));
  }

  std::vector<Complex> h(static_cast<std::size_t>(len), Complex(0.0));
  for (Eigen::Index k = 0; k < outputs; ++k) h[static_cast<std::size_t>(k)] = std::conj(chirp_[static_cast<std::size_t>(k)]);
  for (Eigen::Index k = 1; k < inputs; ++k) {
    h[static_cast<std::size_t>(len - k)] = std::conj(chirp_[static_cast<std::size_t>(k)]);
  }
  fft_.fwd(kernel_, h);
  work_.assign(static_cast<std::size_t>(len), Complex(0.0));
}

ComplexVector ChirpZ::operator()(const ComplexVector& x) {
  if (x.size() > n_) throw InvalidArgument("chirp-z input longer than the planned length");
  std::fill(work_.begin(), work_.end(), Complex(0.0));
  for (Eigen::Index n = 0; n < x.size(); ++n) work_[static_cast<std::size_t>(n)] = x(n) * chirp_[static_cast<std::size_t>(n)];
  fft_.fwd(spectrum_, work_);
  for (std::size_t i = 0; i < spectrum_.size(); ++i) spectrum_[i] *= kernel_[i];
  fft_.inv(work_, spectrum_);
  ComplexVector out(m_);
  for (Eigen::Index j = 0; j < m_; ++j) out(j) = work_[static_cast<std::size_t>(j)] * chirp_[static_cast<std::size_t>(j)];
  return out;
}

}  // namespace decay
