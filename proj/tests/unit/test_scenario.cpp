#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracle.hpp"
#include "ptbore/campaign.hpp"
#include "ptbore/errors.hpp"
#include "ptbore/scenario.hpp"
#include "ptbore/scenario_io.hpp"

using namespace ptbore;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = PTBORE_SCENARIO_DIR;

std::string bundled_text(const char* file) { return read_text_file(kScenarios / file); }

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ptbore_test_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

double first_field(const std::string& line) {
  double v = 0.0;
  std::from_chars(line.data(), line.data() + line.find(','), v);
  return v;
}

}  // namespace

TEST_CASE("bundled scenarios load and match the built-in ones") {
  const Scenario s4 = load_scenario(kScenarios / "paper_sec4.yaml");
  CHECK(s4 == paper_sec4_scenario());
  CHECK(s4.guidance.zone_count() == 6);
  CHECK(s4.gains.rho == doctest::Approx(1.0 - std::cos(oracle::kPi / 30)).epsilon(1e-14));
  CHECK(s4.gains.rho == doctest::Approx(5.48e-3).epsilon(1e-3));
  CHECK(s4.apf == PdGains{5.0, 2.0});
  CHECK(s4.pd == PdGains{0.05, 2.0});

  const Scenario s5 = load_scenario(kScenarios / "paper_sec5.yaml");
  CHECK(s5 == paper_sec5_scenario());
  CHECK(s5.plant.delta_j_enabled);
  CHECK((s5.initial_boresight.vec() - Vec3(0.809, 0.587, 0.0308).normalized()).norm() < 1e-15);
}

TEST_CASE("load -> serialize -> load is exact") {
  std::vector<Scenario> cases{paper_sec4_scenario(), paper_sec5_scenario()};
  Scenario odd = paper_sec4_scenario();
  odd.name = "odd: \"quoted\" name";
  odd.guidance_mode = GuidanceMode::Baseline;
  odd.controller = ControllerKind::Pd;
  odd.plant.torque_limit = 0.1;
  odd.plant.disturbance_enabled = false;
  std::mt19937_64 rng(51);
  odd.initial_attitude = Rotation::from_matrix(oracle::random_rotation(rng));
  odd.initial_omega = oracle::random_vec(rng, 0.1);
  odd.dt = 0.1 / 3.0;
  odd.seed = 18446744073709551615ull;
  cases.push_back(odd);

  for (const auto& sc : cases) {
    const std::string text = serialize_scenario(sc);
    const Scenario back = parse_scenario(text);
    CHECK(back == sc);
    CHECK(serialize_scenario(back) == text);
  }
}

TEST_CASE("validation and parse errors") {
  const std::string base = bundled_text("paper_sec4.yaml");
  CHECK_NOTHROW(validate_scenario(parse_scenario(base)));

  // Controller horizon past the guidance one.
  const std::string late = replace_once(base, "  T: 15\n  T_star: 14\n", "  T: 150\n  T_star: 149.5\n");
  const Scenario bad = parse_scenario(late);
  CHECK_THROWS_AS(validate_scenario(bad), ValidationError);
  CHECK(!scenario_violations(bad).empty());

  const std::string no_axis =
      replace_once(base, "    - axis: [0, -0.453, -0.8915]\n      half_angle_deg: 25\n",
                   "    - half_angle_deg: 25\n");
  try {
    parse_scenario(no_axis);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field() == "guidance.zones[0].axis");
    CHECK(std::string(e.what()).find("guidance.zones[0].axis") != std::string::npos);
    CHECK(e.line() >= 0);
  }

  CHECK_THROWS_AS(parse_scenario(replace_once(base, "  k_a: 0.01", "  k_a: 0.01\n  k_b: 1")),
                  ParseError);
  CHECK_THROWS_AS(parse_scenario(replace_once(base, "  c1: 0.2", "  c1: fast")), ParseError);
  CHECK_THROWS_AS(parse_scenario(replace_once(base, "controller: ibgc", "controller: lqr")),
                  ParseError);
  CHECK_THROWS_AS(parse_scenario("guidance: [1, 2"), ParseError);
  CHECK_THROWS_AS(load_scenario(kScenarios / "does_not_exist.yaml"), IoError);

  // Degrees and radians are interchangeable.
  const std::string rad = replace_once(base, "margin_deg: 6 ", "margin_rad: 0.10471975511965977 ");
  CHECK(parse_scenario(rad).guidance.margin() ==
        doctest::Approx(parse_scenario(base).guidance.margin()).epsilon(1e-15));
}

TEST_CASE("initials files") {
  const auto ini = load_initials(kScenarios / "study_initials.yaml");
  REQUIRE(ini.size() == 4);
  const auto study = study_initials();
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(ini[i].label == "Ini " + std::to_string(i + 1));
    CHECK(ini[i].boresight == study[i]);
  }
  const auto bare = parse_initials("- [1, 0, 0]\n- [0, 0, 2]\n");
  REQUIRE(bare.size() == 2);
  CHECK(bare[1].boresight == UnitVec3::e3());
  CHECK(parse_initials("[]").empty());
  CHECK_THROWS_AS(parse_initials("initials:\n  - {label: a}\n"), ParseError);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(52);
  for (int i = 0; i < 1000; ++i) {
    const double v = oracle::uniform(rng, -1.0, 1.0) * std::pow(10.0, oracle::uniform(rng, -20, 20));
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
    CHECK(s.find(',') == std::string::npos);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("run writes trajectory CSV and metrics JSON") {
  Scenario sc = paper_sec4_scenario();
  sc.t_end = 5.0;
  sc.output_decimation = 7;  // 500 steps: the last one is not a multiple
  const fs::path dir = scratch_dir("run");
  const auto m = run(sc, dir);
  CHECK(!m.failure);

  const auto lines = lines_of(dir / "trajectory.csv");
  const auto cols = csv_columns(sc.guidance.zone_count());
  CHECK(cols.size() == 1 + 3 + 3 + 2 + 3 + 3 + 3 + 3 + 3 + 1 + 6);
  std::string header;
  for (const auto& c : cols) header += (header.empty() ? "" : ",") + c;
  REQUIRE(lines.size() == 2 + 500 / 7 + 1);
  CHECK(lines.front() == header);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(static_cast<std::size_t>(std::count(lines[i].begin(), lines[i].end(), ',')) ==
          cols.size() - 1);
  }
  CHECK(first_field(lines[1]) == 0.0);
  CHECK(first_field(lines.back()) == 5.0);

  std::ifstream js(dir / "metrics.json");
  const auto j = nlohmann::json::parse(js);
  CHECK(j["scenario"] == "paper_sec4");
  CHECK(j["controller"] == "ibgc");
  CHECK(j["failure"].is_null());
  CHECK(j["final_time"] == 5.0);

  // Header is stable across runs.
  const fs::path dir2 = scratch_dir("run2");
  sc.dt = 0.02;
  run(sc, dir2);
  CHECK(lines_of(dir2 / "trajectory.csv").front() == header);

  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("run reports I/O problems") {
  const fs::path file = scratch_dir("blocker");
  write_text_file(file, "x");
  Scenario sc = paper_sec4_scenario();
  sc.t_end = 0.1;
  CHECK_THROWS_AS(run(sc, file / "sub"), IoError);
  fs::remove_all(file);
}

TEST_CASE("goal start without disturbance converges at t = 0") {
  Scenario sc = with_initial(paper_sec4_scenario(), paper_sec4_scenario().guidance.goal());
  sc.plant.disturbance_enabled = false;
  sc.t_end = 10.0;
  const auto tr = simulate(sc);
  REQUIRE(tr.metrics.convergence_time);
  CHECK(*tr.metrics.convergence_time == 0.0);
  CHECK(tr.metrics.converged);
}

TEST_CASE("comparison controllers on the uncertain-inertia study") {
  Scenario sc = paper_sec5_scenario();
  sc.controller = ControllerKind::Pd;
  const auto pd = simulate_recording(sc).trajectory.metrics;
  const auto& c = pd.min_zone_clearance;
  CHECK(std::any_of(c.begin() + 1, c.end(), [](double v) { return v < 0.0; }));

  sc.controller = ControllerKind::Ibgc;
  const auto ibgc = simulate_recording(sc).trajectory.metrics;
  CHECK(!ibgc.failure);
  CHECK(!ibgc.tube_breached);
  for (std::size_t i = 1; i < ibgc.min_zone_clearance.size(); ++i) {
    CHECK(ibgc.min_zone_clearance[i] > 0.0);
  }
}

TEST_CASE("batch over the four study initials") {
  const auto entries = batch_serial(paper_sec4_scenario(), study_initials(),
                                    {"Ini 1", "Ini 2", "Ini 3", "Ini 4"});
  REQUIRE(entries.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(entries[i].index == i);
    CHECK(!entries[i].metrics.failure);
    CHECK(entries[i].metrics.converged);
    REQUIRE(entries[i].metrics.error_at_tg_star);
    CHECK(*entries[i].metrics.error_at_tg_star < 2e-3);
  }
  CHECK(entries[1].label == "Ini 2");
  const auto j = batch_to_json(entries);
  CHECK(j["summary"]["count"] == 4);
  CHECK(j["summary"]["converged"] == 4);

  CHECK(batch_serial(paper_sec4_scenario(), {}).empty());
  CHECK(batch_parallel(paper_sec4_scenario(), {}).empty());
  CHECK(batch_to_json({})["summary"]["count"] == 0);
}

TEST_CASE("with_initial and invalid initials") {
  Scenario sc = paper_sec4_scenario();
  sc.initial_attitude = Rotation();
  sc.initial_omega = Vec3(0.1, 0, 0);
  const Scenario moved = with_initial(sc, study_initials()[1]);
  CHECK(!moved.initial_attitude);
  CHECK(!moved.initial_omega);
  CHECK(moved.initial_boresight == study_initials()[1]);

  const auto e = batch_serial(sc, {UnitVec3(sc.guidance.zone(1).axis)});
  REQUIRE(e.size() == 1);
  REQUIRE(e[0].metrics.failure);
  CHECK(e[0].metrics.failure->kind == "invalid_initial");
}

TEST_CASE("a start right at a margin is too fast to track") {
  // Next to an augmented zone the reference rate grows without bound.
  const Scenario sc = paper_sec4_scenario();
  const auto& z = sc.guidance.zone(2);
  const Vec3 f = z.axis.vec();
  const Vec3 t = (sc.guidance.goal().vec() - sc.guidance.goal().dot(z.axis) * f).normalized();
  const double off = z.half_angle + sc.guidance.margin() + 6e-5;
  const UnitVec3 x(Vec3(std::cos(off) * f + std::sin(off) * t));
  REQUIRE(in_free_space(x, sc.guidance));
  CHECK(pt_guidance_law(x.vec(), 0.0, sc.guidance).norm() > 1.0);
  const auto e = batch_serial(sc, {x});
  REQUIRE(e[0].metrics.failure);
  CHECK(e[0].metrics.failure->kind == "tube_breach");
  CHECK(e[0].metrics.tube_breached);

  for (const auto& y : sample_initials(sc.guidance, 200, 3, 1.0 * oracle::kDeg)) {
    for (std::size_t i = 0; i < sc.guidance.zone_count(); ++i) {
      const auto& zi = sc.guidance.zone(i);
      CHECK(geodesic_distance(y, zi.axis) - zi.half_angle - sc.guidance.margin() >= oracle::kDeg);
    }
  }
  CHECK_THROWS_AS(sample_initials(sc.guidance, 1, 3, -1.0), DomainError);
}

TEST_CASE("100 seeded random initials all converge; parallel equals serial") {
  const Scenario sc = paper_sec4_scenario();
  const double buffer = 1.0 * oracle::kDeg;
  const auto a = sample_initials(sc.guidance, 100, 7, buffer);
  const auto b = sample_initials(sc.guidance, 100, 7, buffer);
  REQUIRE(a.size() == 100);
  CHECK(a == b);
  CHECK(sample_initials(sc.guidance, 100, 8, buffer) != a);
  for (const auto& x : a) CHECK(in_free_space(x, sc.guidance));

  const auto par = batch_parallel(sc, a);
  const auto ser = batch_serial(sc, a);
  REQUIRE(par.size() == 100);
  std::size_t converged = 0;
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].index == i);
    CHECK(par[i].initial == a[i]);
    CHECK(!par[i].metrics.failure);
    if (par[i].metrics.converged) ++converged;
    // Not parked on a saddle: the final boresight is near the goal.
    CHECK(par[i].metrics.final_error < 1e-3);
  }
  CHECK(converged == 100);
  CHECK(batch_to_json(par).dump() == batch_to_json(ser).dump());
}

TEST_CASE("critical-point report") {
  const auto& cfg = paper_sec4_scenario().guidance;
  const auto rep = critical_points_report(cfg);
  REQUIRE(rep.size() == 5);
  for (std::size_t k = 0; k < rep.size(); ++k) {
    CHECK(rep[k].zone == k + 1);
    REQUIRE(rep[k].point);
    CHECK(rep[k].error.empty());
    CHECK(std::abs(rep[k].residual) < 1e-10);
    CHECK(rep[k].distance_to_goal ==
          doctest::Approx(geodesic_distance(*rep[k].point, cfg.goal())).epsilon(1e-15));
  }
  const auto j = critical_points_to_json(rep);
  CHECK(j.size() == 5);

  const GuidanceConfig none({cfg.zone(0)}, cfg.goal(), cfg.margin(), cfg.influence(), cfg.iota(),
                            cfg.k_a(), cfg.k_r(), cfg.schedule());
  CHECK(critical_points_report(none).empty());

  const GuidanceConfig degenerate({cfg.zone(0), {UnitVec3(Vec3(-cfg.goal().vec())), 0.3, false}},
                                  cfg.goal(), cfg.margin(), cfg.influence(), cfg.iota(),
                                  cfg.k_a(), cfg.k_r(), cfg.schedule());
  const auto dr = critical_points_report(degenerate);
  REQUIRE(dr.size() == 1);
  CHECK(!dr[0].point);
  CHECK(!dr[0].error.empty());
}

TEST_CASE("residual scan: parallel equals serial, one sign change per zone") {
  const auto& cfg = paper_sec4_scenario().guidance;
  for (std::size_t i = 1; i < cfg.zone_count(); ++i) {
    const CriticalPointProblem prob(i, cfg);
    const auto ser = residual_scan_serial(prob, 10000);
    const auto par = residual_scan_parallel(prob, 10000);
    REQUIRE(ser.size() == 10000);
    CHECK(ser == par);
    CHECK(count_sign_changes(ser) == 1);
  }
  CHECK(count_sign_changes({1.0, 0.0, -1.0}) == 0);
  CHECK(count_sign_changes({1.0, -1.0, 1.0}) == 2);
  CHECK(count_sign_changes({}) == 0);
}
