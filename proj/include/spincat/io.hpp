#pragma once

// Text serialization: pulse schedules (JSON, omega in Hz), size series and
// Husimi grids (CSV with a '#' header line), and generic CSV tables.

#include "spincat/control.hpp"
#include "spincat/observables.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace spincat::io {

using json = nlohmann::ordered_json;

json schedule_to_json(const PulseSchedule& schedule);
PulseSchedule schedule_from_json(const json& doc);

void write_schedule(const std::filesystem::path& path, const PulseSchedule& schedule);
PulseSchedule read_schedule(const std::filesystem::path& path);

/// "# operator=<tag>" then "t,N_eff".
void write_size_series(const std::filesystem::path& path, const SizeSeries& series);
SizeSeries read_size_series(const std::filesystem::path& path);

/// "# spin=<I> convention=<tag> n_theta=<n> n_phi=<n>" then "theta,phi,Q".
void write_husimi(const std::filesystem::path& path, const HusimiGrid& grid);
HusimiGrid read_husimi(const std::filesystem::path& path);

void write_table(const std::filesystem::path& path, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows, const std::string& comment = {});

void write_json(const std::filesystem::path& path, const json& doc);
json read_json(const std::filesystem::path& path);

/// Library version string.
const char* version();

/// "7/2" style label.
std::string spin_label(int twice_I);

}  // namespace spincat::io
