#include "qlink/dde.hpp"

#include <cmath>
#include <stdexcept>

namespace qlink {
namespace {

/// One delayed source feeding an emitter: -sqrt(gamma_l) * phase * b_source(t - delay*h).
struct Drive {
  int source;
  int delay;
  cplx phase;
};

struct EngineSpec {
  std::vector<const PulseProfile*> pulses;
  std::vector<cplx> c0;
  std::vector<std::vector<Drive>> drives;
  EchoRecursion echo;
};

double safe_sqrt(double g) { return g > 0.0 ? std::sqrt(g) : 0.0; }

/// Output-field samples of one emitter on every completed full step:
/// left end (limit from above), midpoint, right end (limit from below).
struct EchoBuffer {
  std::vector<cplx> left, mid, right;

  explicit EchoBuffer(std::size_t n) : left(n), mid(n), right(n) {}
};

class Engine {
 public:
  Engine(const EngineSpec& spec, const TimeGrid& grid)
      : spec_(spec), grid_(grid), h_(grid.h()), n_(spec.pulses.size()),
        rec_phase_(phase_factor(1.0, spec.echo.phase)) {}

  Trajectory run() {
    const std::size_t nodes = grid_.size();
    const std::size_t full = grid_.full_steps();
    std::vector<Trajectory::Emitter> em(n_);
    buffers_.reserve(n_);
    for (std::size_t l = 0; l < n_; ++l) {
      em[l].c.assign(nodes, cplx{});
      em[l].gamma.assign(nodes, 0.0);
      em[l].d_right.assign(nodes, cplx{});
      em[l].d_left.assign(nodes, cplx{});
      em[l].c[0] = spec_.c0[l];
      buffers_.emplace_back(full);
    }
    em_ = &em;

    std::vector<cplx> forcing_l(n_), forcing_m(n_), forcing_r(n_);
    for (std::size_t j = 0; j < full; ++j) {
      const double t0 = static_cast<double>(j) * h_;
      const double tm = t0 + 0.5 * h_;
      const double t1 = t0 + h_;
      for (std::size_t l = 0; l < n_; ++l) {
        forcing_l[l] = forcing_m[l] = forcing_r[l] = cplx{};
        for (const Drive& d : spec_.drives[l]) {
          const long k = static_cast<long>(j) - d.delay;
          if (k < 0) continue;
          const auto& b = buffers_[static_cast<std::size_t>(d.source)];
          forcing_l[l] += d.phase * b.left[static_cast<std::size_t>(k)];
          forcing_m[l] += d.phase * b.mid[static_cast<std::size_t>(k)];
          forcing_r[l] += d.phase * b.right[static_cast<std::size_t>(k)];
        }
      }
      for (std::size_t l = 0; l < n_; ++l) {
        const PulseProfile& p = *spec_.pulses[l];
        const double gl = p.value(t0, Side::Right);
        const double gm = p.value(tm);
        const double gr = p.value(t1, Side::Left);
        const double sl = safe_sqrt(gl), sm = safe_sqrt(gm), sr = safe_sqrt(gr);
        auto& e = em[l];
        const cplx c = e.c[j];
        const cplx k1 = -0.5 * gl * c - sl * forcing_l[l];
        const cplx k2 = -0.5 * gm * (c + 0.5 * h_ * k1) - sm * forcing_m[l];
        const cplx k3 = -0.5 * gm * (c + 0.5 * h_ * k2) - sm * forcing_m[l];
        const cplx k4 = -0.5 * gr * (c + h_ * k3) - sr * forcing_r[l];
        const cplx c1 = c + (h_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const cplx d1 = -0.5 * gr * c1 - sr * forcing_r[l];
        const cplx cm = 0.5 * (c + c1) + 0.125 * h_ * (k1 - d1);

        e.c[j + 1] = c1;
        e.d_right[j] = k1;
        e.d_left[j + 1] = d1;
        e.gamma[j] = p.value(t0);

        auto& b = buffers_[l];
        const long back = static_cast<long>(j) - spec_.echo.steps;
        const cplx el = back >= 0 ? b.left[static_cast<std::size_t>(back)] : cplx{};
        const cplx emid = back >= 0 ? b.mid[static_cast<std::size_t>(back)] : cplx{};
        const cplx er = back >= 0 ? b.right[static_cast<std::size_t>(back)] : cplx{};
        b.left[j] = sl * c + rec_phase_ * el;
        b.mid[j] = sm * cm + rec_phase_ * emid;
        b.right[j] = sr * c1 + rec_phase_ * er;
      }
    }

    if (grid_.has_partial_step()) partial_step(full);

    for (std::size_t l = 0; l < n_; ++l) {
      auto& e = em[l];
      e.gamma[nodes - 1] = spec_.pulses[l]->value(grid_.time(nodes - 1));
      e.d_right[nodes - 1] = e.d_left[nodes - 1];
      e.d_left[0] = e.d_right[0];
      if (nodes == 1) {
        // No step taken: derivative from the local term only.
        const double g = spec_.pulses[l]->value(0.0, Side::Right);
        e.d_right[0] = e.d_left[0] = -0.5 * g * e.c[0];
      }
    }
    return Trajectory(grid_, std::move(em), spec_.echo);
  }

 private:
  cplx hermite(std::size_t l, std::size_t j, double theta) const {
    const auto& e = (*em_)[l];
    const double s = theta, s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * e.c[j] + (s3 - 2 * s2 + s) * h_ * e.d_right[j] + (-2 * s3 + 3 * s2) * e.c[j + 1] +
           (s3 - s2) * h_ * e.d_left[j + 1];
  }

  /// b_source at fraction theta of full step j, summed explicitly over echoes.
  cplx b_at(std::size_t src, long j, double theta, Side side) const {
    cplx acc{};
    cplx w{1.0, 0.0};
    const PulseProfile& p = *spec_.pulses[src];
    for (long jj = j; jj >= 0; jj -= spec_.echo.steps) {
      const double t = (static_cast<double>(jj) + theta) * h_;
      acc += w * safe_sqrt(p.value(t, side)) * hermite(src, static_cast<std::size_t>(jj), theta);
      w *= rec_phase_;
      if (spec_.echo.steps <= 0) break;
    }
    return acc;
  }

  void partial_step(std::size_t n) {
    auto& em = *em_;
    const double t0 = static_cast<double>(n) * h_;
    const double t_end = grid_.t_end();
    const double dt = t_end - t0;
    const double th_m = 0.5 * dt / h_;
    const double th_r = dt / h_;
    std::vector<cplx> fl(n_), fm(n_), fr(n_);
    for (std::size_t l = 0; l < n_; ++l) {
      for (const Drive& d : spec_.drives[l]) {
        const long k = static_cast<long>(n) - d.delay;
        if (k < 0) continue;
        const auto src = static_cast<std::size_t>(d.source);
        fl[l] += d.phase * buffers_[src].left[static_cast<std::size_t>(k)];
        fm[l] += d.phase * b_at(src, k, th_m, Side::Exact);
        fr[l] += d.phase * b_at(src, k, th_r, Side::Exact);
      }
    }
    for (std::size_t l = 0; l < n_; ++l) {
      const PulseProfile& p = *spec_.pulses[l];
      const double gl = p.value(t0, Side::Right);
      const double gm = p.value(t0 + 0.5 * dt);
      const double gr = p.value(t_end, Side::Left);
      const double sl = safe_sqrt(gl), sm = safe_sqrt(gm), sr = safe_sqrt(gr);
      auto& e = em[l];
      const cplx c = e.c[n];
      const cplx k1 = -0.5 * gl * c - sl * fl[l];
      const cplx k2 = -0.5 * gm * (c + 0.5 * dt * k1) - sm * fm[l];
      const cplx k3 = -0.5 * gm * (c + 0.5 * dt * k2) - sm * fm[l];
      const cplx k4 = -0.5 * gr * (c + dt * k3) - sr * fr[l];
      const cplx c1 = c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      e.c[n + 1] = c1;
      e.d_right[n] = k1;
      e.d_left[n + 1] = -0.5 * gr * c1 - sr * fr[l];
      e.gamma[n] = p.value(t0);
    }
  }

  const EngineSpec& spec_;
  const TimeGrid& grid_;
  double h_;
  std::size_t n_;
  cplx rec_phase_;
  std::vector<EchoBuffer> buffers_;
  std::vector<Trajectory::Emitter>* em_ = nullptr;
};

void check_grid(const LinkParams& link, const TimeGrid& grid) {
  if (std::abs(grid.tau() - link.tau()) > 1e-12 * link.tau()) {
    throw std::invalid_argument("grid is not aligned to the link traversal time");
  }
}

int whole_steps(double delay, double h) {
  const double r = delay / h;
  const double k = std::round(r);
  if (k < 1.0 || std::abs(r - k) > 1e-9 * k) {
    throw std::invalid_argument("echo delay must be a whole, positive number of grid steps");
  }
  return static_cast<int>(k);
}

}  // namespace

Trajectory evolve_pair(const LinkParams& link, const PulseProfile& pulse1, const PulseProfile& pulse2,
                       std::array<cplx, 2> c0, const TimeGrid& grid) {
  check_grid(link, grid);
  if (std::norm(c0[0]) + std::norm(c0[1]) > 1.0 + 1e-12) {
    throw std::invalid_argument("initial amplitudes exceed the single-excitation norm");
  }
  const int m = grid.steps_per_tau();
  const cplx self = phase_factor(2.0, link.phi());
  const cplx cross = phase_factor(1.0, link.phi());
  EngineSpec spec;
  spec.pulses = {&pulse1, &pulse2};
  spec.c0 = {c0[0], c0[1]};
  spec.drives = {{{0, 2 * m, self}, {1, m, cross}}, {{1, 2 * m, self}, {0, m, cross}}};
  spec.echo = {2 * m, 2.0 * link.phi()};
  return Engine(spec, grid).run();
}

Trajectory evolve_single(const LinkParams& link, const PulseProfile& pulse, cplx c0, const TimeGrid& grid,
                         RoundTrip round_trip) {
  check_grid(link, grid);
  if (std::norm(c0) > 1.0 + 1e-12) throw std::invalid_argument("initial amplitude exceeds unit norm");
  if (!std::isfinite(round_trip.phase)) throw std::invalid_argument("round-trip phase must be finite");
  const int k = whole_steps(round_trip.delay, grid.h());
  EngineSpec spec;
  spec.pulses = {&pulse};
  spec.c0 = {c0};
  spec.drives = {{{0, k, phase_factor(1.0, round_trip.phase)}}};
  spec.echo = {k, round_trip.phase};
  return Engine(spec, grid).run();
}

cplx output_field(const Trajectory& traj, int l, double t) {
  if (t < 0.0) return {};
  const auto& grid = traj.grid();
  const std::size_t i = grid.index_of(t);
  if (grid.has_partial_step() && i == grid.size() - 1) {
    throw std::out_of_range("output_field is defined on full-step nodes only");
  }
  const auto c = traj.c(l);
  const auto g = traj.gamma(l);
  const auto k = static_cast<long>(traj.echo().steps);
  cplx acc{};
  long idx = static_cast<long>(i);
  for (double n = 0.0; idx >= 0; idx -= k, n += 1.0) {
    acc += phase_factor(n, traj.echo().phase) * safe_sqrt(g[static_cast<std::size_t>(idx)]) *
           c[static_cast<std::size_t>(idx)];
    if (k <= 0) break;
  }
  return acc;
}

std::vector<cplx> output_field_series(const Trajectory& traj, int l) {
  const auto c = traj.c(l);
  const auto g = traj.gamma(l);
  const std::size_t n = traj.grid().full_steps() + 1;
  const auto k = static_cast<std::size_t>(traj.echo().steps);
  const cplx rp = phase_factor(1.0, traj.echo().phase);
  std::vector<cplx> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = safe_sqrt(g[i]) * c[i];
    if (k > 0 && i >= k) b[i] += rp * b[i - k];
  }
  return b;
}

std::vector<Kink> derivative_kinks(const Trajectory& traj, const LinkParams& link) {
  (void)link;
  std::vector<Kink> out;
  if (traj.n_emitters() != 1) throw std::invalid_argument("derivative_kinks expects a single-emitter trajectory");
  const auto& grid = traj.grid();
  const auto c = traj.c(0);
  const double h = grid.h();
  const std::size_t k = static_cast<std::size_t>(traj.echo().steps);
  const std::size_t last = grid.full_steps();
  if (k == 0) return out;
  for (std::size_t n = 1;; ++n) {
    const std::size_t i = n * k;
    if (i + 2 > last) break;
    if (i < 2) continue;
    const cplx right = (-3.0 * c[i] + 4.0 * c[i + 1] - c[i + 2]) / (2.0 * h);
    const cplx left = (3.0 * c[i] - 4.0 * c[i - 1] + c[i - 2]) / (2.0 * h);
    auto pop = [&](std::size_t j) { return std::norm(c[j]); };
    const double pr = (-3.0 * pop(i) + 4.0 * pop(i + 1) - pop(i + 2)) / (2.0 * h);
    const double pl = (3.0 * pop(i) - 4.0 * pop(i - 1) + pop(i - 2)) / (2.0 * h);
    out.push_back({static_cast<int>(n), static_cast<double>(i) * h, right - left, pr - pl});
  }
  return out;
}

}  // namespace qlink
