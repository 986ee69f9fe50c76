#pragma once

#include <cmath>
#include <stdexcept>

namespace dqsim {

/// Smallest non-negative delta with (elapsed + delta) a multiple of period (to 1e-9).
inline double commensurate_padding(double elapsed_ns, double period_ns) {
  if (!(elapsed_ns >= 0.0) || !(period_ns > 0.0)) {
    throw std::invalid_argument("commensurate_padding: need elapsed >= 0 and period > 0");
  }
  const double r = std::fmod(elapsed_ns, period_ns);
  if (r < 1e-9 || period_ns - r < 1e-9) return 0.0;
  return period_ns - r;
}

}  // namespace dqsim
