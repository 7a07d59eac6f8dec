#include "qlink/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qlink {
namespace {

void write_meta(std::ostream& os, const Metadata& meta) {
  os << "# qlink " << kVersion << '\n';
  for (const auto& [k, v] : meta) os << "# " << k << ": " << v << '\n';
}

std::string fmt(double v) { return format_number(v); }

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Metadata& meta, const WWResult* ww) {
  if (ww != nullptr && ww->traj.size() != traj.size()) {
    throw std::invalid_argument("write_trajectory_csv: WW overlay is on a different grid");
  }
  write_meta(os, meta);
  const int n = traj.n_emitters();
  const int n_ww = ww != nullptr ? std::min(n, ww->traj.n_emitters()) : 0;
  os << 't';
  for (int l = 1; l <= n; ++l) os << ",re_c" << l << ",im_c" << l;
  for (int l = 1; l <= n; ++l) os << ",pop" << l;
  os << ",n_photon";
  for (int l = 1; l <= n; ++l) os << ",dpop" << l << "_dt";
  if (ww != nullptr) {
    for (int l = 1; l <= n_ww; ++l) os << ",ww_pop" << l;
    os << ",ww_n_photon";
  }
  os << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << fmt(traj.time(i));
    for (int l = 0; l < n; ++l) os << ',' << fmt(traj.c(l)[i].real()) << ',' << fmt(traj.c(l)[i].imag());
    for (int l = 0; l < n; ++l) os << ',' << fmt(traj.population(l, i));
    os << ',' << fmt(traj.photon_number(i));
    for (int l = 0; l < n; ++l) {
      os << ',' << fmt(2.0 * std::real(std::conj(traj.c(l)[i]) * traj.emitter(l).d_right[i]));
    }
    if (ww != nullptr) {
      for (int l = 0; l < n_ww; ++l) os << ',' << fmt(ww->traj.population(l, i));
      os << ',' << fmt(ww->photons[i]);
    }
    os << '\n';
  }
}

void write_spectrum_csv(std::ostream& os, const SpectralResult& spec, const Metadata& meta) {
  write_meta(os, meta);
  os << "omega,power,at_pole\n";
  for (std::size_t i = 0; i < spec.omega.size(); ++i) {
    os << fmt(spec.omega[i]) << ',' << fmt(spec.power[i]) << ',' << (spec.at_pole[i] ? 1 : 0) << '\n';
  }
}

void write_heatmap_csv(std::ostream& os, const SpectrumMap& map, const Metadata& meta) {
  write_meta(os, meta);
  os << "delta,omega,power\n";
  const std::size_t nw = map.omega.size();
  for (std::size_t i = 0; i < map.deltas.size(); ++i) {
    for (std::size_t j = 0; j < nw; ++j) {
      os << fmt(map.deltas[i]) << ',' << fmt(map.omega[j]) << ',' << fmt(map.power[i * nw + j]) << '\n';
    }
  }
}

void write_eigen_csv(std::ostream& os, const SpectrumMap& map, const Metadata& meta) {
  write_meta(os, meta);
  os << "delta,lambda\n";
  for (std::size_t i = 0; i < map.deltas.size(); ++i) {
    for (double lam : map.eigen[i]) os << fmt(map.deltas[i]) << ',' << fmt(lam) << '\n';
  }
}

void write_modes_csv(std::ostream& os, const ModeSet& modes, const ModeSnapshot& snap, const Metadata& meta) {
  if (snap.alpha.size() != modes.size()) throw std::invalid_argument("write_modes_csv: snapshot/mode size mismatch");
  write_meta(os, meta);
  os << "# t: " << fmt(snap.t) << '\n';
  os << "k,omega,re_alpha,im_alpha\n";
  for (std::size_t i = 0; i < modes.size(); ++i) {
    os << modes.index[i] << ',' << fmt(modes.omegas[i]) << ',' << fmt(snap.alpha[i].real()) << ','
       << fmt(snap.alpha[i].imag()) << '\n';
  }
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRecord>& records, const Metadata& meta) {
  write_meta(os, meta);
  os << "protocol,gamma0_tau,t_opt,infidelity,loss,photon_integral,converged,diagnostic\n";
  for (const auto& r : records) {
    os << to_string(r.protocol) << ',' << fmt(r.gamma0_tau) << ',' << fmt(r.t_opt) << ',' << fmt(r.infidelity) << ','
       << fmt(r.loss) << ',' << fmt(r.photon_integral) << ',' << (r.converged ? 1 : 0) << ",\"" << r.diagnostic
       << "\"\n";
  }
}

void write_dark_bright_csv(std::ostream& os, const DarkBrightState& s, const Metadata& meta) {
  write_meta(os, meta);
  os << "# u: " << fmt(s.u) << "\n# t_eff: " << fmt(s.t_eff) << '\n';
  os << "t,re_d,im_d,re_b,im_b,norm\n";
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    os << fmt(s.t[i]) << ',' << fmt(s.d[i].real()) << ',' << fmt(s.d[i].imag()) << ',' << fmt(s.b[i].real()) << ','
       << fmt(s.b[i].imag()) << ',' << fmt(s.norm[i]) << '\n';
  }
}

nlohmann::json to_json(const ScanRecord& r) {
  nlohmann::json j{{"protocol", to_string(r.protocol)},
                   {"gamma0_tau", number(r.gamma0_tau)},
                   {"t_opt", number(r.t_opt)},
                   {"infidelity", number(r.infidelity)},
                   {"loss", number(r.loss)},
                   {"photon_integral", number(r.photon_integral)},
                   {"converged", r.converged}};
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  if (r.protocol == ProtocolKind::Czkm) j["cross_check"] = number(r.cross_check);
  return j;
}

nlohmann::json to_json(const ProtocolRun& r) {
  return nlohmann::json{{"spec",
                         {{"kind", to_string(r.spec.kind)},
                          {"gamma0", number(r.spec.gamma0)},
                          {"duration", number(r.spec.duration)}}},
                        {"gamma0_tau", number(r.gamma0_tau)},
                        {"T", number(r.spec.duration)},
                        {"F", number(r.fidelity)},
                        {"epsilon", number(r.infidelity)},
                        {"epsilon_loss", number(r.loss)},
                        {"kappa", number(r.kappa)},
                        {"photon_integral", number(r.photon_integral)}};
}

nlohmann::json to_json(const PowerLawFit& f) {
  return nlohmann::json{{"a", number(f.a)},
                        {"b", number(f.b)},
                        {"residual", number(f.residual)},
                        {"used", f.used},
                        {"excluded", f.excluded}};
}

nlohmann::json to_json(const DarkBrightState& s) {
  nlohmann::json j{{"u", number(s.u)}, {"t_eff", number(s.t_eff)}};
  auto& t = j["t"] = nlohmann::json::array();
  auto& d = j["d"] = nlohmann::json::array();
  auto& b = j["b"] = nlohmann::json::array();
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    t.push_back(s.t[i]);
    d.push_back({s.d[i].real(), s.d[i].imag()});
    b.push_back({s.b[i].real(), s.b[i].imag()});
  }
  return j;
}

}  // namespace qlink
