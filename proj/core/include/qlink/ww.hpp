#pragma once

#include <array>
#include <vector>

#include "qlink/grid.hpp"
#include "qlink/link.hpp"
#include "qlink/pulse.hpp"
#include "qlink/trajectory.hpp"

namespace qlink {

/// How build_modes treats a ladder that would reach omega <= 0.
enum class LadderPolicy {
  /// Throw std::invalid_argument.
  Reject,
  /// Keep the mode count but start the ladder at the first mode (omega = FSR).
  ClipAtCutoff,
};

/// Discrete standing-wave modes of the closed link, omega_k = k * FSR.
struct ModeSet {
  std::vector<long> index;
  std::vector<double> omegas;
  /// Sign of mode k at emitter 2 relative to emitter 1, (-1)^k.
  std::vector<int> parity;
  double fsr = 0.0;

  std::size_t size() const noexcept { return omegas.size(); }
};

/// Odd-sized ladder centered on the mode nearest Delta.
/// Throws std::invalid_argument for even or non-positive counts, and (under
/// LadderPolicy::Reject) if the ladder would include omega <= 0.
ModeSet build_modes(const LinkParams& link, int n_modes, LadderPolicy policy = LadderPolicy::Reject);

struct WWOptions {
  /// Shift applied to the emitter frequency inside the multimode model
  /// (Lamb-shift renormalization). Off by default.
  double detuning_offset = 0.0;
  /// Record mode amplitudes at these times (nearest node at or after each).
  std::vector<double> snapshot_times;
};

struct ModeSnapshot {
  double t = 0.0;
  std::vector<cplx> alpha;
};

struct WWResult {
  Trajectory traj;
  /// sum_k |alpha_k|^2 at every node.
  std::vector<double> photons;
  ModeSet modes;
  /// Mode amplitudes at the final node, followed by any requested snapshots.
  std::vector<ModeSnapshot> snapshots;
};

/// Wigner-Weisskopf single-excitation dynamics in the frame rotating at Delta:
///   dc_l/dt    = -i sum_k g_{k,l}(t) e^{-i(omega_k - Delta) t} alpha_k
///   dalpha_k/dt = -i sum_l g_{k,l}(t) e^{+i(omega_k - Delta) t} c_l
/// with g_{k,l} = s_k^{l-1} sqrt(gamma_l(t) / 2tau), RK4 on a fixed step.
///
/// Throws std::invalid_argument if h * max|omega_k - Delta| > 0.5.
WWResult evolve_ww(const LinkParams& link, const ModeSet& modes, std::array<const PulseProfile*, 2> pulses,
                   std::array<cplx, 2> c0, const TimeGrid& grid, const WWOptions& opts = {});

/// Single-emitter convenience: emitter 2 is uncoupled.
WWResult evolve_ww_single(const LinkParams& link, const ModeSet& modes, const PulseProfile& pulse, cplx c0,
                          const TimeGrid& grid, const WWOptions& opts = {});

/// Photon number at a grid node of a WW run.
double photon_number(const WWResult& ww, double t);

/// Smallest steps_per_tau that satisfies the step constraint for a ladder.
int min_steps_per_tau(const LinkParams& link, const ModeSet& modes, double max_phase_step = 0.25);

/// Calibrates WWOptions::detuning_offset so that the single-emitter WW
/// population best matches a reference population series (sampled on
/// `reference_grid`). Searches offsets within +-search_width by golden section.
double calibrate_lamb_shift(const LinkParams& link, int n_modes, LadderPolicy policy,
                            const std::vector<double>& reference_population, const TimeGrid& reference_grid,
                            double search_width);

}  // namespace qlink
