#pragma once

#include <span>
#include <string>
#include <vector>

#include "qlink/dde.hpp"
#include "qlink/link.hpp"
#include "qlink/pulse.hpp"
#include "qlink/trajectory.hpp"

namespace qlink {

enum class ProtocolKind { Swap, Stirap, Czkm, Shaped };

std::string to_string(ProtocolKind kind);
/// Accepts "swap", "stirap", "czkm", "shaped" (case-insensitive).
ProtocolKind protocol_from_string(const std::string& name);

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::Swap;
  double gamma0 = 0.0;
  double duration = 0.0;

  /// Receiver tanh center for CZKM, T/2 + tau/2. The sender is centered one
  /// traversal earlier so the receiver sees the photon symmetrically.
  double t_c(double tau) const noexcept { return 0.5 * duration + 0.5 * tau; }
};

struct PulsePair {
  PulseProfile sender;
  PulseProfile receiver;
};

/// SWAP: constant gamma0 on [0, T] for both emitters.
/// STIRAP: sender gamma0 sin^2(pi t / 2T), receiver mirrored about T.
/// CZKM: sender gamma0/2 [1 + tanh(gamma0 (t - t_c + tau)/2)] on [0, T],
///       receiver mirrored about T (so its center is t_c).
/// Throws std::invalid_argument for T <= 0, CZKM with T <= tau, or kind Shaped
/// (use make_shaped_pulses).
PulsePair make_pulses(const ProtocolSpec& spec, const LinkParams& link);

/// Receiver is the sender reflected about T.
PulsePair make_shaped_pulses(const PulseProfile& sender, double duration);

struct ShapedPulseOptions {
  /// Coupling cap; samples above it are clamped and flagged.
  double gamma_max = 1e300;
};

struct ShapedPulseResult {
  PulseProfile pulse;
  bool saturated = false;
  std::size_t saturated_samples = 0;
};

/// gamma(t) = |psi(t)|^2 / (1 - int_{t0}^{t} |psi|^2), with the cumulative
/// integral by trapezoid on the sample grid (density taken as zero between
/// t0 and the first sample). The denominator is floored at 1e-12.
/// Throws std::invalid_argument for negative densities, t0 after the first
/// sample, or a density whose integral exceeds 1 + 1e-9.
ShapedPulseResult shaped_pulse(std::span<const double> times, std::span<const double> density, double t0,
                               ShapedPulseOptions opts = {});

/// F = |c_2(T)|^2, interpolating between nodes when T is not on the grid.
double fidelity(const Trajectory& traj, double duration);

/// Exact CZKM error 1 - |(1+u)/2 - (1-u)/2 beta(T_eff)|^2 with u = tanh(gamma0 T_eff / 4),
/// T_eff = T - tau, and beta the unit-start solution of the bright-state DDE
///   beta' = -(gamma0/2) beta - gamma0 sum_{n>=1} beta(t - 2 n tau)
/// integrated by the DDE engine. Throws std::invalid_argument for T <= tau.
double czkm_exact_error(double gamma0, double tau, double duration, int steps_per_tau = 200);

/// Leading-order form 2 e^{-gamma0 T_eff/2} [1 + Re beta(T_eff)].
double czkm_asymptotic_error(double gamma0, double tau, double duration, int steps_per_tau = 200);

/// exp(-gamma0 (T - tau)). Throws std::invalid_argument for T <= tau.
double czkm_bound(double gamma0, double tau, double duration);

struct DarkBrightState {
  std::vector<double> t;
  std::vector<cplx> d;
  std::vector<cplx> b;
  /// |c_1|^2 + |cbar_2|^2 at the same instants.
  std::vector<double> norm;
  double u = 0.0;
  double t_eff = 0.0;
};

/// Dark/bright decomposition of a CZKM run using cbar_2(t) = e^{i phi} c_2(t + tau)
/// (index shift on the aligned grid). Nodes whose t + tau leaves the
/// trajectory are omitted.
DarkBrightState dark_bright(const Trajectory& traj, const PulsePair& pulses, const LinkParams& link);

/// int_0^T n(t) dt with n = 1 - sum_l |c_l|^2, trapezoid on the nodes.
double photon_integral(const Trajectory& traj, double duration);

/// 1 - exp(-kappa int_0^T n dt). Throws std::invalid_argument for kappa < 0.
double loss_error(const Trajectory& traj, double kappa, double duration);

struct ProtocolRun {
  ProtocolSpec spec;
  double gamma0_tau = 0.0;
  double fidelity = 0.0;
  double infidelity = 0.0;
  double loss = 0.0;
  double photon_integral = 0.0;
  double kappa = 0.0;
};

struct RunOptions {
  int steps_per_tau = 200;
  double kappa = 0.0;
};

/// Builds the pulses, integrates the two-emitter DDE from c = (1, 0) over
/// [0, T] and reports fidelity and loss.
ProtocolRun run_protocol(const ProtocolSpec& spec, const LinkParams& link, const RunOptions& opts = {});

struct ProtocolResult {
  ProtocolRun run;
  PulsePair pulses;
  Trajectory traj;
};

/// Same, also returning the pulses and the trajectory.
ProtocolResult simulate_protocol(const ProtocolSpec& spec, const LinkParams& link, const RunOptions& opts = {});

}  // namespace qlink
