#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include <dnlw/pde.hpp>
#include <dnlw/phase_plane.hpp>
#include <dnlw/wave.hpp>

namespace dnlw {

/// Shortest round-trip decimal representation, locale-independent.
std::string format_double(double v);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_profile_csv(const std::string& path, const WaveProfile& profile);
void write_snapshot_csv(const std::string& path, const Grid& grid, const std::vector<double>& u);
void write_trace_csv(const std::string& path, const FrontTrace& trace);
void write_isocline_csv(const std::string& path, const Params& params, const Reaction& reaction,
                        double c, int n_points);

nlohmann::json wave_result_to_json(const WaveResult& result);
nlohmann::json saturation_report_to_json(const SaturationReport& report);

}  // namespace dnlw
