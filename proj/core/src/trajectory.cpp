#include "qlink/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlink {

Trajectory::Trajectory(TimeGrid grid, std::vector<Emitter> emitters, EchoRecursion echo)
    : grid_(grid), emitters_(std::move(emitters)), echo_(echo) {
  for (const auto& e : emitters_) {
    if (e.c.size() != grid_.size() || e.gamma.size() != grid_.size() || e.d_right.size() != grid_.size() ||
        e.d_left.size() != grid_.size()) {
      throw std::invalid_argument("trajectory arrays do not match the grid");
    }
  }
}

double Trajectory::photon_number(std::size_t i) const {
  double p = 0.0;
  for (const auto& e : emitters_) p += std::norm(e.c[i]);
  return 1.0 - p;
}

cplx Trajectory::c_at(int l, double t) const {
  const auto& e = emitter(l);
  const double t_end = grid_.t_end();
  if (t < 0.0 || t > t_end * (1.0 + 1e-12) + 1e-15) throw std::out_of_range("time outside trajectory");
  t = std::min(t, t_end);
  if (grid_.size() == 1) return e.c[0];
  const double h = grid_.h();
  std::size_t j = static_cast<std::size_t>(std::floor(t / h));
  j = std::min(j, grid_.size() - 2);
  const double t0 = grid_.time(j);
  const double t1 = grid_.time(j + 1);
  const double dt = t1 - t0;
  const double s = std::clamp((t - t0) / dt, 0.0, 1.0);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * e.c[j] + h10 * dt * e.d_right[j] + h01 * e.c[j + 1] + h11 * dt * e.d_left[j + 1];
}

}  // namespace qlink
