#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qlink/grid.hpp"
#include "qlink/link.hpp"

namespace qlink {

/// Self-echo recursion of the output field:
/// b(t) = sqrt(gamma(t)) c(t) + e^{i phase} b(t - steps*h), b(t<0) = 0.
struct EchoRecursion {
  int steps = 0;
  double phase = 0.0;
};

/// Emitter amplitudes on a TimeGrid, with the one-sided derivatives needed
/// for Hermite interpolation between nodes.
class Trajectory {
 public:
  struct Emitter {
    std::vector<cplx> c;
    std::vector<double> gamma;
    /// dc/dt at each node as the limit from above (last node: from below).
    std::vector<cplx> d_right;
    /// dc/dt at each node as the limit from below (first node: from above).
    std::vector<cplx> d_left;
  };

  Trajectory(TimeGrid grid, std::vector<Emitter> emitters, EchoRecursion echo);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }
  int n_emitters() const noexcept { return static_cast<int>(emitters_.size()); }
  double time(std::size_t i) const noexcept { return grid_.time(i); }
  const EchoRecursion& echo() const noexcept { return echo_; }

  std::span<const cplx> c(int l) const { return emitters_.at(static_cast<std::size_t>(l)).c; }
  std::span<const double> gamma(int l) const { return emitters_.at(static_cast<std::size_t>(l)).gamma; }
  const Emitter& emitter(int l) const { return emitters_.at(static_cast<std::size_t>(l)); }

  double population(int l, std::size_t i) const { return std::norm(c(l)[i]); }
  /// Photon number in the link from single-excitation unitarity, 1 - sum_l |c_l|^2.
  double photon_number(std::size_t i) const;

  /// Cubic Hermite interpolation of c_l at arbitrary t in [0, t_end].
  cplx c_at(int l, double t) const;
  /// c_l at a node time; throws std::out_of_range if t is not a node.
  cplx c_node(int l, double t) const { return c(l)[grid_.index_of(t)]; }

 private:
  TimeGrid grid_;
  std::vector<Emitter> emitters_;
  EchoRecursion echo_;
};

}  // namespace qlink
