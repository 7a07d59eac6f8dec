#pragma once

#include <span>
#include <string>
#include <vector>

#include "qlink/protocols.hpp"

namespace qlink {

/// One optimized (or rule-evaluated) protocol point. Times in units of tau.
struct ScanRecord {
  ProtocolKind protocol = ProtocolKind::Swap;
  double gamma0_tau = 0.0;
  double t_opt = 0.0;
  double infidelity = 1.0;
  /// int_0^T n dt (units of tau) and 1 - exp(-kappa tau * that).
  double photon_integral = 0.0;
  double loss = 0.0;
  /// False when the optimizer fell back to a bracket endpoint or found no valley.
  bool converged = true;
  std::string diagnostic;
  /// CZKM only: |czkm_exact_error - full DDE infidelity|.
  double cross_check = 0.0;
};

struct SweepOptions {
  int steps_per_tau = 200;
  double delta_fsr = 50.0;
  double kappa_tau = 0.0;
  /// SWAP coarse grid over [0.5, 1.5] pi/Omega.
  int swap_coarse_points = 101;
  /// Relative T resolution of the golden-section refinement.
  double rel_tol = 1e-4;
  /// STIRAP scan step in units of tau (at most 1/4).
  double stirap_step = 0.25;
  /// A STIRAP valley is accepted once log10(1-F) climbs back by this fraction
  /// of the valley's log depth.
  double valley_rise = 0.05;
};

/// Duration rule T = 9 / sqrt(gamma0 tau), in units of tau.
double resource_rule_duration(double gamma0_tau);

/// SWAP: one run with constant couplings to 1.5 pi/Omega (the dynamics up to T
/// does not depend on when the couplings switch off), coarse grid over
/// [0.5, 1.5] pi/Omega with Omega = sqrt(gamma0/tau), golden-section refinement.
ScanRecord optimal_swap(double gamma0_tau, const SweepOptions& opts = {});

/// STIRAP: scan T upward from 2 tau, stop at the first accepted valley, refine
/// by golden section. Gives up past T = 100 sqrt(tau/gamma0) (converged = false).
ScanRecord optimal_stirap(double gamma0_tau, const SweepOptions& opts = {});

/// CZKM at an explicit duration (units of tau): infidelity from czkm_exact_error,
/// cross-checked against the full two-emitter DDE.
ScanRecord czkm_at(double gamma0_tau, double duration_tau, const SweepOptions& opts = {});

/// STIRAP at an explicit duration (units of tau).
ScanRecord stirap_at(double gamma0_tau, double duration_tau, const SweepOptions& opts = {});

/// Records ordered by grid point, then by the order of `kinds`. SWAP and STIRAP
/// at their optimal T, CZKM at resource_rule_duration. Throws
/// std::invalid_argument for an empty or non-positive grid, or kind Shaped.
std::vector<ScanRecord> scan_protocols(std::span<const double> grid, std::span<const ProtocolKind> kinds,
                                       const SweepOptions& opts = {});

struct CrossoverPoint {
  double gamma0_tau = 0.0;
  double duration = 0.0;
  double stirap = 0.0;
  double czkm = 0.0;
};

struct CrossoverReport {
  std::vector<CrossoverPoint> points;
  /// Smallest grid value where CZKM beats STIRAP (NaN if none).
  double crossover = 0.0;
  /// True if STIRAP wins at every point below the crossover and CZKM at every point from it on.
  bool clean_split = false;
};

/// STIRAP and CZKM compared at identical (gamma0, T) with T = resource_rule_duration.
CrossoverReport crossover_scan(std::span<const double> grid, const SweepOptions& opts = {});

struct PowerLawFit {
  double a = 0.0;
  double b = 0.0;
  /// RMS residual in natural-log space.
  double residual = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;
};

/// Least squares on (log x, log y) for y = a x^b.
/// Throws std::invalid_argument for fewer than 3 points or nonpositive values.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope x + intercept (at least 2 points).
LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

/// Infidelity vs gamma0 tau for one protocol, excluding 1-F < 1e-9.
PowerLawFit fit_infidelity(std::span<const ScanRecord> records, ProtocolKind kind);

/// Loss error vs T*/tau for one protocol, excluding loss < 1e-9.
PowerLawFit fit_loss(std::span<const ScanRecord> records, ProtocolKind kind);

struct WWScanOptions {
  int n_modes = 201;
  /// Apply the calibrated Lamb-shift offset.
  bool lamb_correction = true;
};

/// Re-evaluates a DDE record in the multimode model at Delta = delta_fsr FSR.
/// The ladder is clipped at the first mode when it would reach omega <= 0.
ScanRecord ww_evaluate(const ScanRecord& dde_record, const SweepOptions& opts, const WWScanOptions& ww = {});

}  // namespace qlink
