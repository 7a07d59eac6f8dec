#include "qlink/link.hpp"

#include <cmath>

namespace qlink {

LinkParams LinkParams::make(double gamma0, double tau, double delta) {
  if (!std::isfinite(gamma0) || !std::isfinite(tau) || !std::isfinite(delta)) {
    throw std::invalid_argument("link parameters must be finite");
  }
  if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
  if (gamma0 < 0.0) throw std::invalid_argument("gamma0 must be nonnegative");
  return LinkParams(gamma0, tau, delta);
}

double reduce_angle(double angle) noexcept {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

cplx phase_factor(double n, double phase) noexcept {
  return std::polar(1.0, reduce_angle(n * phase));
}

}  // namespace qlink
