#pragma once

// CSV trajectory files and JSON reports.
//
// CSV layout: '#'-prefixed comment lines (config hash, disturbance seed,
// optional timestamp, warnings, at most one '#fault:' line), one header row,
// then one row per logged sample with 17 significant digits.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "igc/range_igc.hpp"
#include "igc/relative_kinematics.hpp"
#include "igc/sim_engine.hpp"

namespace igc {

struct CsvOptions {
  std::string timestamp;  // written as a comment when non-empty
};

/// UTC time as ISO 8601, for CsvOptions::timestamp.
std::string utc_timestamp();

std::string write_trajectory(const TrajectoryLog& log, const CsvOptions& options = {});

/// Inverse of write_trajectory; throws Error(Parse) with the line number.
TrajectoryLog read_trajectory(std::string_view text);

std::string metrics_json(const ScenarioConfig& config, const TrajectoryLog& log,
                         const MetricsReport& metrics);

std::string gain_report_json(const ScenarioConfig& config, const GainReport& range,
                             const GainReport& bearing, const FeasibilityReport& feasibility);

/// Human-readable gain report, one condition per line.
std::string gain_report_text(const GainReport& report);

/// Writes the whole file or throws Error(Io).
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

std::string hex64(std::uint64_t value);

}  // namespace igc
