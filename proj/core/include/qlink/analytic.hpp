#pragma once

#include <span>
#include <vector>

#include "qlink/dde.hpp"
#include "qlink/link.hpp"

namespace qlink {

/// Parameters of the closed-form single-emitter solution with echo delay
/// `delay` and per-echo phase `phi` (phi = omega_e * delay).
class SeriesParams {
 public:
  static constexpr int kMaxOrder = 500;

  /// Throws std::invalid_argument on gamma < 0, delay <= 0, non-finite input
  /// or n_max outside [0, kMaxOrder].
  static SeriesParams make(double gamma, double delay, double phi, int n_max);

  double gamma() const noexcept { return gamma_; }
  double delay() const noexcept { return delay_; }
  double phi() const noexcept { return phi_; }
  int n_max() const noexcept { return n_max_; }
  double omega_e() const noexcept { return phi_ / delay_; }
  /// alpha = i omega_e + gamma/2
  cplx alpha() const noexcept { return {gamma_ / 2.0, omega_e()}; }

 private:
  SeriesParams(double g, double d, double p, int n) : gamma_(g), delay_(d), phi_(p), n_max_(n) {}
  double gamma_;
  double delay_;
  double phi_;
  int n_max_;
};

/// c(t) for c(0) = 1 from the echo series
///   c(t) = sum_n e^{i n phi} e^{-x_n/2} P_n(x_n),  x_n = gamma (t - n delay) >= 0,
/// where P_0 = 1 and P_n(x) = sum_{m=1}^{n} C(n-1,m-1) (-x)^m / m! = -(x/n) L^{(1)}_{n-1}(x).
/// The Laguerre factor is evaluated by its three-term recurrence with the
/// e^{-x/2} weight folded in, so no intermediate overflows.
///
/// Throws std::invalid_argument for t < 0 and SolverError if t needs more
/// echo orders than p.n_max().
cplx series_solution(const SeriesParams& p, double t);

/// Exact jump of dc/dt at the N-th echo arrival: -gamma e^{i N phi} c0.
cplx jump_formula(int n, double gamma, double phi, cplx c0);

/// Population-derivative jump at the N-th arrival given c at that instant:
/// -2 gamma Re(e^{i N phi} conj(c_n) c0).
double population_jump_formula(int n, double gamma, double phi, cplx c0, cplx c_at_arrival);

// -- spectroscopy ------------------------------------------------------------

struct SpectrumOptions {
  /// Added to the Laplace variable, s = -i omega + broadening. Zero samples
  /// the pure (pole-bearing) spectrum.
  double broadening = 0.0;
};

struct SpectralResult {
  std::vector<double> eigenfrequencies;
  std::vector<double> omega;
  /// |A_out|^2 normalized to a global maximum of 1 over finite samples.
  std::vector<double> power;
  /// True where the sample sits exactly on a pole (power is +inf there).
  std::vector<bool> at_pole;
};

/// Residual lambda - Delta - (gamma/2) cot(theta(lambda)) with
/// theta = ((lambda - Delta) T_rt + Phi) / 2. For the two-ended round trip
/// theta reduces to lambda*tau.
double eigen_residual(const LinkParams& link, double lambda, RoundTrip rt);
double eigen_residual(const LinkParams& link, double lambda);

/// Real eigenfrequencies (lab frame) inside [lo, hi], strictly increasing.
/// One root per cot branch, bracketed strictly inside the branch and
/// bisected, then secant-polished. gamma0 == 0 returns Delta plus the bare
/// mode frequencies in the window. Throws std::invalid_argument if hi <= lo.
std::vector<double> eigenfrequencies(const LinkParams& link, double lo, double hi, RoundTrip rt);
std::vector<double> eigenfrequencies(const LinkParams& link, double lo, double hi);

/// Pole frequencies of the bare link (cot singularities) inside [lo, hi].
std::vector<double> bare_mode_frequencies(const LinkParams& link, double lo, double hi, RoundTrip rt);

/// A_out(s) = sqrt(gamma) / [(s + gamma/2)(1 - e^{i Phi - s T}) + gamma e^{i Phi - s T}],
/// at s = -i (omega - Delta) + broadening, for lab-frame omega.
cplx output_amplitude(const LinkParams& link, double omega, RoundTrip rt, double broadening = 0.0);

/// Samples |A_out|^2 over a sorted, finite lab-frame grid and attaches the
/// eigenfrequencies spanning it. Throws std::invalid_argument for unsorted
/// or non-finite grids.
SpectralResult output_spectrum(const LinkParams& link, std::span<const double> omega_grid,
                               SpectrumOptions opts = {});

struct SpectrumMap {
  std::vector<double> deltas;
  std::vector<double> omega;
  /// power[i * omega.size() + j] for deltas[i], omega[j]; max over the map is 1.
  std::vector<double> power;
  /// Eigenfrequencies inside the omega range for each delta.
  std::vector<std::vector<double>> eigen;
};

/// Heat map of the output power spectrum versus emitter frequency.
SpectrumMap spectrum_map(const LinkParams& link, std::span<const double> deltas, std::span<const double> omega_grid,
                         SpectrumOptions opts = {});

}  // namespace qlink
