#pragma once

// Scenario files (YAML), trajectory CSV and metrics JSON.
//
// Angles may be given as `<key>_deg` or `<key>_rad`; the serializer always
// writes radians so that load -> serialize -> load is exact.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ptbore/dynamics.hpp"
#include "ptbore/scenario.hpp"

namespace ptbore {

/// Parses scenario text without validating it. Throws ParseError.
Scenario parse_scenario(std::string_view text);

/// Reads, parses and validates. Throws IoError, ParseError or ValidationError.
Scenario load_scenario(const std::filesystem::path& path);

std::string serialize_scenario(const Scenario& sc);

/// A list of initial boresights: either a bare sequence of 3-vectors or a
/// mapping with an `initials` sequence of `{label, boresight}` entries.
struct LabelledInitial {
  std::string label;
  UnitVec3 boresight;
};
std::vector<LabelledInitial> parse_initials(std::string_view text);
std::vector<LabelledInitial> load_initials(const std::filesystem::path& path);

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

std::vector<std::string> csv_columns(std::size_t zone_count);
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

nlohmann::json metrics_to_json(const MetricsSummary& m);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace ptbore
