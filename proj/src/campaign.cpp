#include "ptbore/campaign.hpp"

#include <fstream>
#include <random>

#include "ptbore/errors.hpp"
#include "ptbore/scenario_io.hpp"

namespace ptbore {

MetricsSummary run(const Scenario& sc, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  const SimulationOutcome outcome = simulate_recording(sc);

  const auto csv_path = out_dir / "trajectory.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot open '" + csv_path.string() + "' for writing");
  write_trajectory_csv(csv, outcome.trajectory);
  csv.flush();
  if (!csv) throw IoError("failed writing '" + csv_path.string() + "'");

  nlohmann::json j = metrics_to_json(outcome.trajectory.metrics);
  j["scenario"] = sc.name;
  j["controller"] = std::string(to_string(sc.controller));
  write_text_file(out_dir / "metrics.json", j.dump(2) + "\n");
  return outcome.trajectory.metrics;
}

std::vector<UnitVec3> sample_initials(const GuidanceConfig& cfg, std::size_t count,
                                      std::uint64_t seed, double start_buffer) {
  if (!(start_buffer >= 0.0)) throw DomainError("start buffer must be non-negative");
  auto clear_enough = [&](const UnitVec3& x) {
    for (std::size_t i = 0; i < cfg.zone_count(); ++i) {
      const auto& z = cfg.zone(i);
      if (geodesic_distance(x, z.axis) - z.half_angle - cfg.margin() < start_buffer) return false;
    }
    return true;
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<UnitVec3> out;
  out.reserve(count);
  std::size_t draws = 0;
  while (out.size() < count) {
    if (++draws > 1000 * (count + 1)) {
      throw DomainError("free space is too small to sample initial orientations");
    }
    const Vec3 v(normal(rng), normal(rng), normal(rng));
    if (v.norm() < 1e-12) continue;
    const UnitVec3 x(v);
    if (in_free_space(x, cfg) && clear_enough(x)) out.push_back(x);
  }
  return out;
}

Scenario with_initial(const Scenario& sc, const UnitVec3& x0) {
  Scenario out = sc;
  out.initial_boresight = x0;
  out.initial_attitude.reset();
  out.initial_omega.reset();
  return out;
}

namespace {

BatchEntry run_one(const Scenario& sc, const std::vector<UnitVec3>& initials,
                   const std::vector<std::string>& labels, std::size_t i) {
  BatchEntry e;
  e.index = i;
  e.label = i < labels.size() ? labels[i] : "#" + std::to_string(i);
  e.initial = initials[i];
  e.initial_error = geodesic_distance(initials[i], sc.guidance.goal());
  if (!in_free_space(initials[i], sc.guidance)) {
    e.metrics.convergence_threshold = sc.convergence_threshold;
    e.metrics.failure =
        SimulationFailure{"invalid_initial", 0.0, "initial boresight outside the free space"};
    return e;
  }
  try {
    e.metrics = simulate_recording(with_initial(sc, initials[i])).trajectory.metrics;
  } catch (const std::exception& ex) {
    e.metrics.convergence_threshold = sc.convergence_threshold;
    e.metrics.failure = SimulationFailure{"other", 0.0, ex.what()};
  }
  return e;
}

}  // namespace

std::vector<BatchEntry> batch_serial(const Scenario& sc, const std::vector<UnitVec3>& initials,
                                     const std::vector<std::string>& labels) {
  std::vector<BatchEntry> out;
  out.reserve(initials.size());
  for (std::size_t i = 0; i < initials.size(); ++i) out.push_back(run_one(sc, initials, labels, i));
  return out;
}

std::vector<BatchEntry> batch_parallel(const Scenario& sc, const std::vector<UnitVec3>& initials,
                                       const std::vector<std::string>& labels) {
  std::vector<BatchEntry> out(initials.size());
  const long n = static_cast<long>(initials.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = run_one(sc, initials, labels, static_cast<std::size_t>(i));
  }
  return out;
}

nlohmann::json batch_to_json(const std::vector<BatchEntry>& entries) {
  nlohmann::json runs = nlohmann::json::array();
  std::size_t converged = 0;
  std::size_t failed = 0;
  for (const auto& e : entries) {
    nlohmann::json j;
    j["index"] = e.index;
    j["label"] = e.label;
    j["initial"] = {e.initial[0], e.initial[1], e.initial[2]};
    j["initial_error"] = e.initial_error;
    j["metrics"] = metrics_to_json(e.metrics);
    runs.push_back(std::move(j));
    if (e.metrics.failure) {
      ++failed;
    } else if (e.metrics.converged) {
      ++converged;
    }
  }
  return {{"runs", runs},
          {"summary", {{"count", entries.size()}, {"converged", converged}, {"failed", failed}}}};
}

std::vector<CriticalPointEntry> critical_points_report(const GuidanceConfig& cfg) {
  std::vector<CriticalPointEntry> out;
  for (std::size_t i = 0; i < cfg.zone_count(); ++i) {
    if (cfg.zone(i).is_virtual) continue;
    CriticalPointEntry e;
    e.zone = i;
    try {
      const UnitVec3 c = find_critical_point(i, cfg);
      e.point = c;
      e.residual = critical_point_residual(c, i, cfg);
      e.distance_to_goal = geodesic_distance(c, cfg.goal());
    } catch (const NoSolution& ex) {
      e.error = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

nlohmann::json critical_points_to_json(const std::vector<CriticalPointEntry>& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : report) {
    nlohmann::json j;
    j["zone"] = e.zone;
    if (e.point) {
      j["point"] = {(*e.point)[0], (*e.point)[1], (*e.point)[2]};
      j["residual"] = e.residual;
      j["distance_to_goal"] = e.distance_to_goal;
    } else {
      j["point"] = nullptr;
      j["error"] = e.error;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

namespace {

double scan_offset(const CriticalPointProblem& p, std::size_t k, std::size_t n) {
  return p.lower() + (p.upper() - p.lower()) * static_cast<double>(k + 1) /
                         static_cast<double>(n + 1);
}

}  // namespace

std::vector<double> residual_scan_serial(const CriticalPointProblem& problem, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = problem.residual(scan_offset(problem, k, n));
  return out;
}

std::vector<double> residual_scan_parallel(const CriticalPointProblem& problem, std::size_t n) {
  std::vector<double> out(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < count; ++k) {
    out[static_cast<std::size_t>(k)] =
        problem.residual(scan_offset(problem, static_cast<std::size_t>(k), n));
  }
  return out;
}

std::size_t count_sign_changes(const std::vector<double>& values) {
  std::size_t changes = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if ((values[k - 1] < 0.0 && values[k] > 0.0) || (values[k - 1] > 0.0 && values[k] < 0.0)) {
      ++changes;
    }
  }
  return changes;
}

}  // namespace ptbore
