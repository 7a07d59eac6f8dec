#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qlink/analytic.hpp"
#include "qlink/protocols.hpp"
#include "qlink/sweep.hpp"
#include "qlink/trajectory.hpp"
#include "qlink/ww.hpp"

namespace qlink {

inline constexpr const char* kVersion = "0.1.0";

/// Fixed 12-significant-digit formatting used by every writer.
std::string format_number(double v);

/// Ordered key/value pairs written as `# key: value` lines above the header.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Columns: t, re_c1, im_c1[, re_c2, im_c2], pop1[, pop2], n_photon, dpop_dt per emitter
/// (right-sided derivative).
/// With `ww`, adds ww_pop for each emitter in `traj` and ww_n_photon (same grid required).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Metadata& meta,
                          const WWResult* ww = nullptr);

/// Columns: omega, power, at_pole.
void write_spectrum_csv(std::ostream& os, const SpectralResult& spec, const Metadata& meta);

/// Heatmap rows (delta, omega, power).
void write_heatmap_csv(std::ostream& os, const SpectrumMap& map, const Metadata& meta);

/// Eigenfrequency overlay rows (delta, lambda).
void write_eigen_csv(std::ostream& os, const SpectrumMap& map, const Metadata& meta);

/// Columns: k, omega, re_alpha, im_alpha.
void write_modes_csv(std::ostream& os, const ModeSet& modes, const ModeSnapshot& snap, const Metadata& meta);

/// Columns: protocol, gamma0_tau, t_opt, infidelity, loss, photon_integral, converged, diagnostic.
void write_scan_csv(std::ostream& os, const std::vector<ScanRecord>& records, const Metadata& meta);

/// Columns: t, re_d, im_d, re_b, im_b, norm.
void write_dark_bright_csv(std::ostream& os, const DarkBrightState& s, const Metadata& meta);

nlohmann::json to_json(const ScanRecord& r);
nlohmann::json to_json(const ProtocolRun& r);
nlohmann::json to_json(const PowerLawFit& f);
nlohmann::json to_json(const DarkBrightState& s);

}  // namespace qlink
