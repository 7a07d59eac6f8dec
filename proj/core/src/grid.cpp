#include "qlink/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace qlink {
namespace {
constexpr double kNodeTol = 1e-9;
}

TimeGrid TimeGrid::make(double tau, int steps_per_tau, double t_end) {
  if (!std::isfinite(tau) || tau <= 0.0) throw std::invalid_argument("grid: tau must be positive and finite");
  if (steps_per_tau < 1) throw std::invalid_argument("grid: steps_per_tau must be >= 1");
  if (!std::isfinite(t_end) || t_end < 0.0) throw std::invalid_argument("grid: t_end must be finite and >= 0");
  const double h = tau / steps_per_tau;
  const double ratio = t_end / h;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= kNodeTol * std::max(1.0, nearest)) {
    return TimeGrid(tau, steps_per_tau, t_end, static_cast<std::size_t>(nearest), false);
  }
  return TimeGrid(tau, steps_per_tau, t_end, static_cast<std::size_t>(std::floor(ratio)), true);
}

double TimeGrid::time(std::size_t i) const noexcept {
  if (i >= full_steps_) return i == full_steps_ && partial_ ? static_cast<double>(i) * h() : t_end_;
  return static_cast<double>(i) * h();
}

bool TimeGrid::is_node(double t) const noexcept {
  if (t < 0.0 || t > t_end_ * (1.0 + kNodeTol) + kNodeTol * h()) return false;
  if (std::abs(t - t_end_) <= kNodeTol * h()) return true;
  const double r = t / h();
  return std::abs(r - std::round(r)) <= kNodeTol * std::max(1.0, std::round(r));
}

std::size_t TimeGrid::index_of(double t) const {
  if (!is_node(t)) throw std::out_of_range("time is not a grid node");
  if (std::abs(t - t_end_) <= kNodeTol * h()) return size() - 1;
  return static_cast<std::size_t>(std::round(t / h()));
}

}  // namespace qlink
