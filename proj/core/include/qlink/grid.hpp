#pragma once

#include <cstddef>

namespace qlink {

/// Fixed-step time grid aligned to the traversal time.
///
/// Nodes sit at i*h with h = tau/steps_per_tau, followed by t_end itself if
/// t_end is not a multiple of h (the final step is then shorter). Keeping h a
/// divisor of tau places every echo arrival on a node.
class TimeGrid {
 public:
  static TimeGrid make(double tau, int steps_per_tau, double t_end);

  double tau() const noexcept { return tau_; }
  int steps_per_tau() const noexcept { return steps_per_tau_; }
  double h() const noexcept { return tau_ / steps_per_tau_; }
  double t_end() const noexcept { return t_end_; }

  /// Number of full-length steps.
  std::size_t full_steps() const noexcept { return full_steps_; }
  bool has_partial_step() const noexcept { return partial_; }
  std::size_t size() const noexcept { return full_steps_ + 1 + (partial_ ? 1 : 0); }
  double time(std::size_t i) const noexcept;

  /// Index of the node at exactly t (within 1e-9 h); throws std::out_of_range otherwise.
  std::size_t index_of(double t) const;
  /// True iff t coincides with a node.
  bool is_node(double t) const noexcept;

 private:
  TimeGrid(double tau, int m, double t_end, std::size_t full, bool partial)
      : tau_(tau), steps_per_tau_(m), t_end_(t_end), full_steps_(full), partial_(partial) {}

  double tau_;
  int steps_per_tau_;
  double t_end_;
  std::size_t full_steps_;
  bool partial_;
};

}  // namespace qlink
