#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace qlink {

/// Which one-sided limit to take when evaluating at a support boundary.
/// `Right` is the limit from above (t -> t0+), `Left` from below.
enum class Side { Exact, Left, Right };

namespace shape {

struct Constant {
  double gamma0;
};

/// gamma0 * sin^2(pi t / 2T)
struct SinSq {
  double gamma0;
  double duration;
};

/// gamma0/2 * [1 + tanh(gamma0 (t - center) / 2)]
struct TanhCZKM {
  double gamma0;
  double center;
};

/// Piecewise-linear coupling through (times, values). Times strictly increasing.
struct Sampled {
  std::vector<double> times;
  std::vector<double> values;
};

/// Coupling derived from a target wavepacket density; carries the density it
/// came from so it can be serialized and audited.
struct Shaped {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> density;
  double t0 = 0.0;
  double gamma_max = 0.0;
  bool saturated = false;
};

}  // namespace shape

/// Time-dependent coupling rate gamma_l(t) of one emitter.
///
/// Outside its closed support the profile is zero. A profile may be mirrored
/// about a point R, in which case value(t) is the base shape evaluated at R - t;
/// this is how receiver pulses are built so that gamma_2(t) == gamma_1(R - t)
/// holds bit-for-bit.
class PulseProfile {
 public:
  using Shape = std::variant<shape::Constant, shape::SinSq, shape::TanhCZKM, shape::Sampled, shape::Shaped>;

  static PulseProfile constant(double gamma0, double t_start, double t_end);
  static PulseProfile sin_sq(double gamma0, double duration);
  static PulseProfile tanh_czkm(double gamma0, double center, double t_start, double t_end);
  /// Throws std::invalid_argument unless times are strictly increasing and
  /// the two vectors have equal length >= 2.
  static PulseProfile sampled(std::vector<double> times, std::vector<double> values);
  static PulseProfile shaped(shape::Shaped data);
  /// Always-off coupling.
  static PulseProfile off();

  /// Copy of `base` reflected about `pivot`: result(t) = base(pivot - t).
  static PulseProfile mirrored(const PulseProfile& base, double pivot);

  double value(double t, Side side = Side::Exact) const;
  double operator()(double t) const { return value(t); }

  /// Upper bound on value(t): gamma0 for analytic shapes, the largest sample otherwise.
  double cap() const noexcept;

  double support_start() const noexcept { return support_start_; }
  double support_end() const noexcept { return support_end_; }
  std::optional<double> mirror_pivot() const noexcept { return mirror_; }
  const Shape& shape() const noexcept { return shape_; }
  std::string shape_name() const;

  bool is_off() const noexcept { return off_; }

 private:
  PulseProfile(Shape s, double a, double b) : shape_(std::move(s)), support_start_(a), support_end_(b) {}

  double base_value(double s) const;

  Shape shape_;
  double support_start_;
  double support_end_;
  std::optional<double> mirror_;
  bool off_ = false;
};

void to_json(nlohmann::json& j, const PulseProfile& p);
/// Throws std::invalid_argument on unknown shapes or malformed parameters.
PulseProfile pulse_from_json(const nlohmann::json& j);

}  // namespace qlink
