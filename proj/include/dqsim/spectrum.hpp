#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace dqsim {

/// |sum_k w_k x_k e^{-i omega t_k}| for uniformly spaced samples.
inline double windowed_dft_magnitude(std::span<const double> weighted, double dt, double omega) {
  std::complex<double> acc{};
  for (std::size_t k = 0; k < weighted.size(); ++k) {
    acc += weighted[k] * std::polar(1.0, -omega * dt * static_cast<double>(k));
  }
  return std::abs(acc);
}

/// Angular frequency of the strongest spectral component of a uniformly
/// sampled real signal. Mean removed, Hann window, then the DFT magnitude is
/// scanned on a grid 16x finer than the FFT bins and refined by golden-section
/// search around the best grid point.
inline double dominant_frequency(std::span<const double> samples, double dt) {
  const std::size_t n = samples.size();
  if (n < 4) throw std::invalid_argument("dominant_frequency: need at least 4 samples");
  if (!(dt > 0.0)) throw std::invalid_argument("dominant_frequency: dt must be > 0");

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(n);
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1));
    w[k] = hann * (samples[k] - mean);
  }

  const double bin = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
  const double nyquist = std::numbers::pi / dt;
  const double step = bin / 16.0;
  double best_omega = step;
  double best = -1.0;
  for (double omega = step; omega < nyquist; omega += step) {
    const double mag = windowed_dft_magnitude(w, dt, omega);
    if (mag > best) {
      best = mag;
      best_omega = omega;
    }
  }

  double lo = std::max(step, best_omega - step);
  double hi = std::min(nyquist, best_omega + step);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double a = hi - ratio * (hi - lo);
    const double b = lo + ratio * (hi - lo);
    if (windowed_dft_magnitude(w, dt, a) > windowed_dft_magnitude(w, dt, b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace dqsim
