#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "oracle.hpp"
#include "ptbore/campaign.hpp"
#include "ptbore/dynamics.hpp"
#include "ptbore/errors.hpp"
#include "ptbore/observer.hpp"
#include "ptbore/plant.hpp"
#include "ptbore/scenario.hpp"

using namespace ptbore;

namespace {

Scenario sec4_every_step(double dt = 0.01) {
  Scenario sc = paper_sec4_scenario();
  sc.dt = dt;
  sc.output_decimation = 1;
  return sc;
}

const Trajectory& full_run() {
  static const Trajectory tr = simulate(sec4_every_step());
  return tr;
}

// Angular momentum in the inertial frame.
Vec3 momentum(const Mat3& R, const Mat3& J, const Vec3& w) { return R * (J * w); }

}  // namespace

TEST_CASE("disturbance model") {
  const auto d0 = disturbance(0.0);
  CHECK((d0.d - Vec3(2e-3, 4.5e-3, 1.5e-3)).norm() < 1e-18);

  const Vec3 amp = 1e-3 * Vec3(8.0, 6.0, 12.5);
  double max_rate = 0.0;
  for (double t = 0.0; t <= 2000.0; t += 0.05) {
    const auto s = disturbance(t);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(s.d[i]) <= amp[i]);
    max_rate = std::max(max_rate, s.d_dot.norm());
  }
  CHECK(max_rate <= disturbance_rate_bound());

  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    const double t = oracle::uniform(rng, 0.0, 500.0);
    const double h = 1e-4;
    const Vec3 fd = (disturbance(t + h).d - disturbance(t - h).d) / (2 * h);
    CHECK((fd - disturbance(t).d_dot).norm() < 1e-8);
  }
}

TEST_CASE("inertia uncertainty") {
  CHECK((inertia_uncertainty(0.0) - Vec3(-1.0, 3.0, 4.0).asDiagonal().toDenseMatrix())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK(inertia_uncertainty(1e4)(0, 0) == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(inertia_uncertainty(3.0)(0, 1) == 0.0);

  PlantParams p = paper_sec4_scenario().plant;
  CHECK(plant_inertia(10.0, p) == p.J0);
  p.delta_j_enabled = true;
  for (double t = 0.0; t <= 150.0; t += 0.1) {
    const Mat3 J = plant_inertia(t, p);
    Eigen::SelfAdjointEigenSolver<Mat3> es(J);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK(!inertia_defect(J));
  }
  CHECK(inertia_defect(-Mat3::Identity()));
  Mat3 asym = Mat3::Identity();
  asym(0, 1) = 0.1;
  CHECK(inertia_defect(asym));
}

TEST_CASE("angular momentum is conserved with u = 0 and d = 0") {
  Scenario sc = paper_sec4_scenario();
  sc.controller = ControllerKind::None;
  sc.plant.disturbance_enabled = false;
  sc.initial_omega = Vec3(0.1, -0.05, 0.08);
  sc.output_decimation = 100;
  const auto tr = simulate(sc);
  REQUIRE(!tr.metrics.failure);
  const Mat3 J = sc.plant.J0;
  const Vec3 L0 = momentum(tr.samples.front().state.R.matrix(), J, *sc.initial_omega);
  double worst = 0.0;
  for (const auto& s : tr.samples) {
    CHECK(s.signals.u.norm() == 0.0);
    worst = std::max(worst, (momentum(s.state.R.matrix(), J, s.state.omega) - L0).norm());
  }
  CHECK(worst / L0.norm() < 1e-8);
  CHECK(tr.samples.back().state.t == 150.0);
}

TEST_CASE("free body: additive and exponential rotation stepping") {
  std::mt19937_64 rng(42);
  const Mat3 J = paper_sec4_scenario().plant.J0;
  const Rotation R0 = Rotation::from_matrix(oracle::random_rotation(rng));
  const Vec3 w0(0.2, -0.1, 0.15);
  const Vec3 L0 = momentum(R0.matrix(), J, w0);
  const double E0 = 0.5 * w0.dot(J * w0);
  for (auto mode : {RotationStepping::Additive, RotationStepping::Exponential}) {
    const auto end = propagate_free_body(R0, w0, J, 0.01, 150.0, mode);
    CHECK(orthogonality_error(end.R.matrix()) < 1e-9);
    CHECK((momentum(end.R.matrix(), J, end.omega) - L0).norm() / L0.norm() < 1e-8);
    CHECK(std::abs(0.5 * end.omega.dot(J * end.omega) - E0) / E0 < 1e-8);
  }
  const auto a = propagate_free_body(R0, w0, J, 0.01, 150.0, RotationStepping::Additive);
  const auto e = propagate_free_body(R0, w0, J, 0.01, 150.0, RotationStepping::Exponential);
  CHECK((a.R.matrix() - e.R.matrix()).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((a.omega - e.omega).norm() < 1e-8);

  // Spin about a principal axis is steady.
  Eigen::SelfAdjointEigenSolver<Mat3> es(J);
  const Vec3 axis = es.eigenvectors().col(0);
  const auto spin = propagate_free_body(Rotation(), 0.3 * axis, J, 0.01, 50.0,
                                        RotationStepping::Exponential);
  CHECK((spin.omega - 0.3 * axis).norm() < 1e-10);
}

TEST_CASE("equilibrium at the goal") {
  Scenario sc = with_initial(paper_sec4_scenario(), paper_sec4_scenario().guidance.goal());
  sc.plant.disturbance_enabled = false;
  const SimState s = initial_state(sc);
  CHECK(s.omega.norm() < 1e-15);
  const auto ev = closed_loop_rate(s, sc);
  CHECK(ev.rate.omega_dot.norm() < 1e-13);
  CHECK(ev.rate.x_r_dot.norm() < 1e-15);
  CHECK(ev.rate.p_dot.norm() < 1e-13);
  CHECK(ev.rate.R_dot.cwiseAbs().maxCoeff() < 1e-15);
  CHECK(ev.signals.u.norm() < 1e-13);
}

TEST_CASE("initialization and u(0) hand assembly") {
  const Scenario sc = paper_sec4_scenario();
  const SimState s = initial_state(sc);
  const Mat3 R0 = s.R.matrix();
  const Vec3 b = sc.gains.b_body.vec();
  const Vec3 x0 = sc.initial_boresight.vec();
  CHECK((R0 * b - x0).norm() < 1e-15);
  CHECK(s.x_r == sc.initial_boresight);
  CHECK(s.p.norm() == 0.0);

  // R(0) omega(0) = Omega_r(0): omega_e(0) = 0, sigma(0) = b, z(0) = 0, so
  // u(0) = w x J w + J R0^T Omega_r'(0) with w = R0^T Omega_r(0).
  const Vec3 Wr = pt_guidance_law(x0, 0.0, sc.guidance);
  const Vec3 Wr_dot = guidance_law_dot(x0, 0.0, sc.guidance);
  CHECK((R0 * s.omega - Wr).norm() < 1e-15);
  const Mat3 J = sc.plant.J0;
  const Vec3 w = R0.transpose() * Wr;
  const Vec3 u0 = w.cross(J * w) + J * (R0.transpose() * Wr_dot);
  const auto ev = closed_loop_rate(s, sc);
  CHECK(ev.signals.errors.sigma_e < 1e-15);
  CHECK(ev.signals.errors.omega_e.norm() < 1e-15);
  CHECK((ev.signals.u - u0).norm() < 1e-12 * std::max(1.0, u0.norm()));
  CHECK((ev.signals.d_hat - sc.c1 * J * ev.signals.errors.omega_e).norm() < 1e-16);
  CHECK(full_run().samples.front().signals.u == ev.signals.u);
}

TEST_CASE("nominal run: tube, manifold drift, torque size") {
  const auto& tr = full_run();
  const Scenario sc = sec4_every_step();
  REQUIRE(!tr.metrics.failure);
  CHECK(tr.samples.size() == 15001);
  CHECK(!tr.metrics.tube_breached);
  CHECK(tr.metrics.max_xi < 1.0);
  CHECK(tr.metrics.max_u_inf < 0.4);
  for (const auto& s : tr.samples) {
    const Mat3& R = s.state.R.matrix();
    CHECK((R.transpose() * R - Mat3::Identity()).norm() < 1e-9);
    CHECK(std::abs(s.state.x_r.vec().norm() - 1.0) < 1e-12);
    CHECK(s.signals.errors.sigma_e < sc.gains.rho);
    for (std::size_t i = 1; i < s.clearance.size(); ++i) CHECK(s.clearance[i] > 0.0);
  }
  const auto& at149 = tr.samples[14900];
  CHECK(at149.state.t == doctest::Approx(149.0));
  CHECK(1.0 - at149.x.dot(sc.guidance.goal()) < 2e-3);
}

TEST_CASE("observer error stays inside its ultimate bound") {
  const auto& s = full_run().samples;
  const double c1 = paper_sec4_scenario().c1;
  const double dm = disturbance_rate_bound();
  const double bound = std::max(dm / c1, s.front().d_tilde_norm) + 1e-6;
  for (const auto& x : s) CHECK(x.d_tilde_norm <= bound);

  // Discrete form of V' <= -c1 V + dm^2 / (2 c1) with V = |d~|^2 / 2.
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double h = s[k + 1].state.t - s[k].state.t;
    const double v0 = 0.5 * s[k].d_tilde_norm * s[k].d_tilde_norm;
    const double v1 = 0.5 * s[k + 1].d_tilde_norm * s[k + 1].d_tilde_norm;
    CHECK((v1 - v0) / h <= -c1 * std::min(v0, v1) + dm * dm / (2 * c1) + 1e-12);
  }
}

namespace {

// 20 s at dt = 1e-3, every step kept, starting half-way to the tube edge.
const Trajectory& tilted_run() {
  static const Trajectory tr = [] {
    Scenario sc = sec4_every_step(1e-3);
    sc.t_end = 20.0;
    const Rotation base = initial_attitude(sc);
    const double tilt = std::acos(1.0 - 0.5 * sc.gains.rho);
    sc.initial_attitude = base * exp_so3(tilt * Vec3::UnitX());
    return simulate(sc);
  }();
  return tr;
}

}  // namespace

TEST_CASE("sigma_e kinematics") {
  const auto& tr = tilted_run();
  REQUIRE(!tr.metrics.failure);
  const auto& s = tr.samples;
  const Scenario sc = paper_sec4_scenario();
  CHECK(s.front().signals.errors.sigma_e == doctest::Approx(0.5 * sc.gains.rho).epsilon(1e-9));
  const Vec3 b = sc.gains.b_body.vec();
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double fd = (s[k + 1].signals.errors.sigma_e - s[k - 1].signals.errors.sigma_e) /
                      (s[k + 1].state.t - s[k - 1].state.t);
    const auto& e = s[k].signals.errors;
    const double an = -b.dot(e.sigma.vec().cross(e.omega_e));
    worst = std::max(worst, std::abs(fd - an));
    scale = std::max(scale, std::abs(an));
  }
  CHECK(scale > 1e-5);
  CHECK(worst < 1e-4 * scale);
}

TEST_CASE("estimation error dynamics along a run") {
  // With the inertia mismatch off, d~' = d' - c1 mu d~.
  const auto& s = tilted_run().samples;
  const Scenario sc = paper_sec4_scenario();
  double worst = 0.0, scale = 0.0;
  auto d_tilde = [](const TrajectorySample& x) { return Vec3(x.signals.d_lumped - x.signals.d_hat); };
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double t = s[k].state.t;
    if (std::abs(t - 14.0) < 2e-3 || std::abs(t - 15.0) < 2e-3) continue;
    const Vec3 fd = (d_tilde(s[k + 1]) - d_tilde(s[k - 1])) / (s[k + 1].state.t - s[k - 1].state.t);
    const Vec3 rhs = disturbance(t).d_dot - sc.c1 * mu(t, sc.gains.sched) * d_tilde(s[k]);
    worst = std::max(worst, (fd - rhs).norm());
    scale = std::max(scale, rhs.norm());
  }
  CHECK(worst < 1e-4 * scale);
}

TEST_CASE("determinism and step halving") {
  Scenario sc = paper_sec4_scenario();
  const auto a = simulate(sc);
  const auto b = simulate(sc);
  REQUIRE(a.samples.size() == b.samples.size());
  bool same = true;
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    same = same && a.samples[k].state.R == b.samples[k].state.R &&
           a.samples[k].state.omega == b.samples[k].state.omega &&
           a.samples[k].state.p == b.samples[k].state.p &&
           a.samples[k].signals.u == b.samples[k].signals.u;
  }
  CHECK(same);

  sc.dt = 0.005;
  sc.output_decimation = 20;
  const auto half = simulate(sc);
  CHECK(half.samples.back().state.t == 150.0);
  CHECK((half.samples.back().x.vec() - a.samples.back().x.vec()).norm() < 1e-6);
}

TEST_CASE("zero-length run echoes the initial state") {
  Scenario sc = paper_sec4_scenario();
  sc.t_end = 0.0;
  const auto tr = simulate(sc);
  REQUIRE(tr.samples.size() == 1);
  const SimState s0 = initial_state(sc);
  CHECK(tr.samples[0].state.t == 0.0);
  CHECK(tr.samples[0].state.R == s0.R);
  CHECK(tr.samples[0].state.omega == s0.omega);
  CHECK(tr.samples[0].state.x_r == s0.x_r);
  CHECK(tr.metrics.final_time == 0.0);
}

TEST_CASE("optional torque clamp") {
  Scenario sc = paper_sec4_scenario();
  sc.plant.torque_limit = 0.1;
  sc.t_end = 30.0;
  sc.output_decimation = 1;
  const auto out = simulate_recording(sc);
  for (const auto& s : out.trajectory.samples) {
    CHECK(s.signals.u.cwiseAbs().maxCoeff() <= 0.1);
    CHECK(s.signals.u == s.signals.u_raw.cwiseMax(-0.1).cwiseMin(0.1));
  }
  CHECK(out.trajectory.metrics.max_u_inf <= 0.1);
}

TEST_CASE("fatal conditions carry time and kind") {
  Scenario sc = paper_sec4_scenario();
  // Far too coarse a step for the barrier controller.
  sc.dt = 2.0;
  sc.t_end = 40.0;
  const auto out = simulate_recording(sc);
  if (out.failure) {
    CHECK(out.failure->t >= 0.0);
    CHECK(out.failure->t <= 40.0);
    CHECK(!out.failure->kind.empty());
    CHECK_THROWS_AS(simulate(sc), SimulationError);
    try {
      simulate(sc);
    } catch (const SimulationError& e) {
      CHECK(e.time() == out.failure->t);
      CHECK(to_string(e.kind()) == out.failure->kind);
    }
  }
  CHECK(to_string(FailureKind::TubeBreach) == "tube_breach");
  CHECK(to_string(FailureKind::BoundaryViolation) == "boundary_violation");
}
