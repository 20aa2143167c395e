#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ptbore {

struct SimulationFailure {
  std::string kind;  // tube_breach | boundary_violation | non_finite_state | other
  double t = 0.0;
  std::string message;
};

/// Run-level figures accumulated over every integration step, not only the
/// emitted samples.
struct MetricsSummary {
  double convergence_threshold = 0.0;       // rad
  std::optional<double> convergence_time;   // s; last entry into the threshold cone
  double final_time = 0.0;
  double final_error = 0.0;                 // 1 - x.x* at the last step
  std::optional<double> error_at_tg_star;   // 1 - x.x* at T_g*
  std::optional<double> reference_error_at_tg_star;  // 1 - x_r.x* at T_g*
  std::vector<double> min_zone_clearance;   // min_t d(x, f_i) - theta_i, per zone
  double min_reference_margin = 0.0;        // min_t,i d(x_r, f_i) - theta_i - margin
  double max_u_inf = 0.0;
  double max_xi = 0.0;
  std::optional<double> max_d_tilde_after_tc_star;
  std::optional<double> sigma_e_at_tc_star;
  std::optional<double> d_tilde_at_tc_star;
  bool tube_breached = false;
  bool converged = false;  // final geodesic error below the threshold
  std::optional<SimulationFailure> failure;
};

}  // namespace ptbore
