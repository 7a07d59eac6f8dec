#include "qlink/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qlink/link.hpp"

namespace qlink {
namespace {

constexpr double kEdgeTol = 1e-12;

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

void check_support(double a, double b) {
  check_finite(a, "support start");
  check_finite(b, "support end");
  if (b < a) throw std::invalid_argument("pulse support end precedes start");
}

void check_samples(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw std::invalid_argument("sampled pulse: times/values length mismatch");
  if (times.size() < 2) throw std::invalid_argument("sampled pulse needs at least two samples");
  for (std::size_t i = 0; i < times.size(); ++i) {
    check_finite(times[i], "sample time");
    check_finite(values[i], "sample value");
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("sampled pulse: time axis must be strictly increasing");
    }
  }
}

double interpolate(const std::vector<double>& times, const std::vector<double>& values, double s) {
  if (s <= times.front()) return values.front();
  if (s >= times.back()) return values.back();
  auto it = std::upper_bound(times.begin(), times.end(), s);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const double w = (s - times[lo]) / (times[hi] - times[lo]);
  return values[lo] + w * (values[hi] - values[lo]);
}

}  // namespace

PulseProfile PulseProfile::constant(double gamma0, double t_start, double t_end) {
  check_finite(gamma0, "gamma0");
  if (gamma0 < 0.0) throw std::invalid_argument("gamma0 must be nonnegative");
  check_support(t_start, t_end);
  return PulseProfile(shape::Constant{gamma0}, t_start, t_end);
}

PulseProfile PulseProfile::sin_sq(double gamma0, double duration) {
  check_finite(gamma0, "gamma0");
  check_finite(duration, "duration");
  if (gamma0 < 0.0) throw std::invalid_argument("gamma0 must be nonnegative");
  if (duration <= 0.0) throw std::invalid_argument("sin^2 pulse duration must be positive");
  return PulseProfile(shape::SinSq{gamma0, duration}, 0.0, duration);
}

PulseProfile PulseProfile::tanh_czkm(double gamma0, double center, double t_start, double t_end) {
  check_finite(gamma0, "gamma0");
  check_finite(center, "center");
  if (gamma0 < 0.0) throw std::invalid_argument("gamma0 must be nonnegative");
  check_support(t_start, t_end);
  return PulseProfile(shape::TanhCZKM{gamma0, center}, t_start, t_end);
}

PulseProfile PulseProfile::sampled(std::vector<double> times, std::vector<double> values) {
  check_samples(times, values);
  const double a = times.front();
  const double b = times.back();
  return PulseProfile(shape::Sampled{std::move(times), std::move(values)}, a, b);
}

PulseProfile PulseProfile::shaped(shape::Shaped data) {
  check_samples(data.times, data.values);
  if (data.density.size() != data.times.size()) throw std::invalid_argument("shaped pulse: density length mismatch");
  const double a = data.times.front();
  const double b = data.times.back();
  return PulseProfile(std::move(data), a, b);
}

PulseProfile PulseProfile::off() {
  PulseProfile p(shape::Constant{0.0}, 0.0, 0.0);
  p.off_ = true;
  return p;
}

PulseProfile PulseProfile::mirrored(const PulseProfile& base, double pivot) {
  check_finite(pivot, "mirror pivot");
  PulseProfile p = base;
  // Composition of two reflections is a translation; only single mirrors are supported.
  if (base.mirror_) throw std::invalid_argument("pulse is already mirrored");
  p.mirror_ = pivot;
  p.support_start_ = pivot - base.support_end_;
  p.support_end_ = pivot - base.support_start_;
  return p;
}

double PulseProfile::base_value(double s) const {
  return std::visit(
      [s](const auto& sh) -> double {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, shape::Constant>) {
          return sh.gamma0;
        } else if constexpr (std::is_same_v<T, shape::SinSq>) {
          const double x = std::sin(kPi * s / (2.0 * sh.duration));
          return sh.gamma0 * x * x;
        } else if constexpr (std::is_same_v<T, shape::TanhCZKM>) {
          return 0.5 * sh.gamma0 * (1.0 + std::tanh(0.5 * sh.gamma0 * (s - sh.center)));
        } else {
          return interpolate(sh.times, sh.values, s);
        }
      },
      shape_);
}

double PulseProfile::value(double t, Side side) const {
  if (off_) return 0.0;
  // Grid times i*h can land a few ulps off a support edge; snap them onto it.
  const double tol = kEdgeTol * std::max({1.0, std::abs(support_start_), std::abs(support_end_)});
  if (std::abs(t - support_start_) <= tol) t = support_start_;
  if (std::abs(t - support_end_) <= tol) t = support_end_;
  bool inside = false;
  switch (side) {
    case Side::Exact: inside = t >= support_start_ && t <= support_end_; break;
    case Side::Right: inside = t >= support_start_ && t < support_end_; break;
    case Side::Left: inside = t > support_start_ && t <= support_end_; break;
  }
  if (!inside) return 0.0;
  const double s = mirror_ ? *mirror_ - t : t;
  return std::max(0.0, base_value(s));
}

double PulseProfile::cap() const noexcept {
  if (off_) return 0.0;
  return std::visit(
      [](const auto& sh) -> double {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, shape::Sampled> || std::is_same_v<T, shape::Shaped>) {
          return std::max(0.0, *std::max_element(sh.values.begin(), sh.values.end()));
        } else {
          return sh.gamma0;
        }
      },
      shape_);
}

std::string PulseProfile::shape_name() const {
  if (off_) return "off";
  return std::visit(
      [](const auto& sh) -> std::string {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, shape::Constant>) return "constant";
        else if constexpr (std::is_same_v<T, shape::SinSq>) return "sin_sq";
        else if constexpr (std::is_same_v<T, shape::TanhCZKM>) return "tanh_czkm";
        else if constexpr (std::is_same_v<T, shape::Sampled>) return "sampled";
        else return "shaped";
      },
      shape_);
}

void to_json(nlohmann::json& j, const PulseProfile& p) {
  j = nlohmann::json::object();
  j["shape"] = p.shape_name();
  nlohmann::json params = nlohmann::json::object();
  if (!p.is_off()) {
    std::visit(
        [&params](const auto& sh) {
          using T = std::decay_t<decltype(sh)>;
          if constexpr (std::is_same_v<T, shape::Constant>) {
            params["gamma0"] = sh.gamma0;
          } else if constexpr (std::is_same_v<T, shape::SinSq>) {
            params["gamma0"] = sh.gamma0;
            params["duration"] = sh.duration;
          } else if constexpr (std::is_same_v<T, shape::TanhCZKM>) {
            params["gamma0"] = sh.gamma0;
            params["center"] = sh.center;
          } else if constexpr (std::is_same_v<T, shape::Sampled>) {
            params["times"] = sh.times;
            params["values"] = sh.values;
          } else {
            params["times"] = sh.times;
            params["values"] = sh.values;
            params["density"] = sh.density;
            params["t0"] = sh.t0;
            params["gamma_max"] = sh.gamma_max;
            params["saturated"] = sh.saturated;
          }
        },
        p.shape());
  }
  j["params"] = std::move(params);
  // Support is stored in the base (unmirrored) coordinate so that the
  // document reads the same as the constructor call that produced it.
  if (auto pivot = p.mirror_pivot()) {
    j["support"] = {*pivot - p.support_end(), *pivot - p.support_start()};
    j["mirror"] = *pivot;
  } else {
    j["support"] = {p.support_start(), p.support_end()};
  }
}

PulseProfile pulse_from_json(const nlohmann::json& j) {
  try {
    const std::string name = j.at("shape").get<std::string>();
    const auto& params = j.contains("params") ? j.at("params") : nlohmann::json::object();
    auto support = [&](double def_a, double def_b) -> std::pair<double, double> {
      if (!j.contains("support")) return {def_a, def_b};
      const auto& s = j.at("support");
      if (!s.is_array() || s.size() != 2) throw std::invalid_argument("support must be [start, end]");
      return {s[0].get<double>(), s[1].get<double>()};
    };
    PulseProfile base = PulseProfile::off();
    if (name == "off") {
      return base;
    } else if (name == "constant") {
      auto [a, b] = support(0.0, 0.0);
      base = PulseProfile::constant(params.at("gamma0").get<double>(), a, b);
    } else if (name == "sin_sq") {
      base = PulseProfile::sin_sq(params.at("gamma0").get<double>(), params.at("duration").get<double>());
      if (j.contains("support")) {
        auto [a, b] = support(0.0, 0.0);
        if (a != base.support_start() || b != base.support_end()) {
          throw std::invalid_argument("sin_sq support is fixed to [0, duration]");
        }
      }
    } else if (name == "tanh_czkm") {
      auto [a, b] = support(0.0, 0.0);
      base = PulseProfile::tanh_czkm(params.at("gamma0").get<double>(), params.at("center").get<double>(), a, b);
    } else if (name == "sampled") {
      base = PulseProfile::sampled(params.at("times").get<std::vector<double>>(),
                                   params.at("values").get<std::vector<double>>());
    } else if (name == "shaped") {
      shape::Shaped data;
      data.times = params.at("times").get<std::vector<double>>();
      data.values = params.at("values").get<std::vector<double>>();
      data.density = params.at("density").get<std::vector<double>>();
      data.t0 = params.value("t0", data.times.empty() ? 0.0 : data.times.front());
      data.gamma_max = params.value("gamma_max", 0.0);
      data.saturated = params.value("saturated", false);
      base = PulseProfile::shaped(std::move(data));
    } else {
      throw std::invalid_argument("unknown pulse shape '" + name + "'");
    }
    if (j.contains("mirror")) return PulseProfile::mirrored(base, j.at("mirror").get<double>());
    return base;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed pulse document: ") + e.what());
  }
}

}  // namespace qlink
