#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qlink {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when a solver cannot honour its contract (truncation, missing bracket, ...).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physical configuration of a two-ended link.
///
/// `gamma0` is the decay-rate scale, `tau` the single-traversal time and
/// `delta` the emitter frequency in the lab frame. The traversal phase and
/// the free spectral range are derived on every access so they can never
/// drift from the stored inputs.
class LinkParams {
 public:
  /// Validates and builds; throws std::invalid_argument on non-finite
  /// input, `tau <= 0` or `gamma0 < 0`.
  static LinkParams make(double gamma0, double tau, double delta);

  double gamma0() const noexcept { return gamma0_; }
  double tau() const noexcept { return tau_; }
  double delta() const noexcept { return delta_; }

  /// Single-traversal phase, not reduced mod 2pi.
  double phi() const noexcept { return delta_ * tau_; }
  double fsr() const noexcept { return kPi / tau_; }

  /// Same link with a different coupling scale.
  LinkParams with_gamma0(double gamma0) const { return make(gamma0, tau_, delta_); }
  LinkParams with_delta(double delta) const { return make(gamma0_, tau_, delta); }

 private:
  LinkParams(double gamma0, double tau, double delta) : gamma0_(gamma0), tau_(tau), delta_(delta) {}

  double gamma0_;
  double tau_;
  double delta_;
};

inline LinkParams make_link(double gamma0, double tau, double delta) {
  return LinkParams::make(gamma0, tau, delta);
}

/// Reduces an angle into [0, 2pi).
double reduce_angle(double angle) noexcept;

/// e^{i n phase}, with n*phase reduced mod 2pi before the trig call.
cplx phase_factor(double n, double phase) noexcept;

}  // namespace qlink
