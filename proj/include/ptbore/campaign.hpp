#pragma once

// Single runs with file output, multi-start batches and the critical-point
// report. Batches and the residual scan come in a serial reference form and
// an OpenMP form that must agree with it exactly.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptbore/dynamics.hpp"
#include "ptbore/scenario.hpp"

namespace ptbore {

/// Simulates, then writes trajectory.csv and metrics.json into out_dir
/// (created if needed). Simulation failures end up in the metrics; only I/O
/// problems throw (IoError).
MetricsSummary run(const Scenario& sc, const std::filesystem::path& out_dir);

/// Uniform samples on S^2 (normalized Gaussian triples), rejected when outside
/// the margin-augmented free space or closer than start_buffer (rad) to any
/// augmented zone. Deterministic in the seed.
std::vector<UnitVec3> sample_initials(const GuidanceConfig& cfg, std::size_t count,
                                      std::uint64_t seed, double start_buffer = 0.0);

struct BatchEntry {
  std::size_t index = 0;
  std::string label;
  UnitVec3 initial;
  double initial_error = 0.0;  // geodesic angle to the goal, rad
  MetricsSummary metrics;
};

/// The scenario with x(0) replaced and any explicit R(0), omega(0) dropped.
Scenario with_initial(const Scenario& sc, const UnitVec3& x0);

std::vector<BatchEntry> batch_serial(const Scenario& sc, const std::vector<UnitVec3>& initials,
                                     const std::vector<std::string>& labels = {});
std::vector<BatchEntry> batch_parallel(const Scenario& sc, const std::vector<UnitVec3>& initials,
                                       const std::vector<std::string>& labels = {});

nlohmann::json batch_to_json(const std::vector<BatchEntry>& entries);

struct CriticalPointEntry {
  std::size_t zone = 0;
  std::optional<UnitVec3> point;
  double residual = 0.0;
  double distance_to_goal = 0.0;  // rad
  std::string error;              // set when no point exists
};

/// One entry per real zone.
std::vector<CriticalPointEntry> critical_points_report(const GuidanceConfig& cfg);
nlohmann::json critical_points_to_json(const std::vector<CriticalPointEntry>& report);

/// Balance residual sampled at n interior points of the annulus offset range.
std::vector<double> residual_scan_serial(const CriticalPointProblem& problem, std::size_t n);
std::vector<double> residual_scan_parallel(const CriticalPointProblem& problem, std::size_t n);

/// Strict sign changes between consecutive samples.
std::size_t count_sign_changes(const std::vector<double>& values);

}  // namespace ptbore
