#pragma once

#include <array>
#include <vector>

#include "qlink/grid.hpp"
#include "qlink/link.hpp"
#include "qlink/pulse.hpp"
#include "qlink/trajectory.hpp"

namespace qlink {

/// Delay and per-echo phase of a single emitter's self-echo.
///
/// The two-ended link returns an emitter's own photon after 2*tau with phase
/// 2*phi (see two_ended_round_trip). The single-traversal convention
/// (delay tau, phase phi) is equally representable; which one describes a
/// given geometry is the caller's call.
struct RoundTrip {
  double delay;
  double phase;
};

inline RoundTrip two_ended_round_trip(const LinkParams& link) { return {2.0 * link.tau(), 2.0 * link.phi()}; }

/// Two emitters at opposite ends of the link:
///
///   dc_l/dt = -(gamma_l/2) c_l - sqrt(gamma_l) [e^{2i phi} b_l(t-2tau) + e^{i phi} b_{3-l}(t-tau)]
///
/// integrated with fixed-step RK4 by the method of steps. Delayed values at
/// RK half steps come from cubic Hermite interpolation inside a single past
/// step, which never straddles an echo arrival because h divides tau.
///
/// Throws std::invalid_argument if |c0|^2 exceeds 1 or the grid tau differs
/// from the link tau.
Trajectory evolve_pair(const LinkParams& link, const PulseProfile& pulse1, const PulseProfile& pulse2,
                       std::array<cplx, 2> c0, const TimeGrid& grid);

/// One emitter with self-echo only: dc/dt = -(gamma/2) c - sqrt(gamma) e^{i Phi} b(t - T_rt).
/// `round_trip.delay` must be a whole number of grid steps.
Trajectory evolve_single(const LinkParams& link, const PulseProfile& pulse, cplx c0, const TimeGrid& grid,
                         RoundTrip round_trip);

/// Echo sum b_l^out at a grid node, via the buffer recursion. Zero for t < 0.
/// Throws std::out_of_range beyond the trajectory or off-grid.
cplx output_field(const Trajectory& traj, int l, double t);

/// b_l^out at every node of the trajectory.
std::vector<cplx> output_field_series(const Trajectory& traj, int l);

struct Kink {
  int order;          ///< N: the N-th echo arrival
  double t;           ///< N * T_rt
  cplx jump;          ///< dc/dt(t+) - dc/dt(t-)
  double pop_jump;    ///< d|c|^2/dt(t+) - d|c|^2/dt(t-)
};

/// Derivative discontinuities of a single-emitter trajectory at each echo
/// arrival, measured from second-order one-sided finite differences of the
/// node values. Empty when no arrival falls strictly inside the trajectory.
std::vector<Kink> derivative_kinks(const Trajectory& traj, const LinkParams& link);

}  // namespace qlink
