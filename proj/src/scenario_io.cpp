#include "ptbore/scenario_io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ptbore/errors.hpp"

namespace ptbore {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

int line_of(const YAML::Node& n) { return n.IsDefined() ? n.Mark().line : -1; }

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& field, const std::string& detail) {
  throw ParseError(field, line_of(n), detail);
}

void expect_map(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) fail(n, path, "expected a mapping");
}

void check_keys(const YAML::Node& n, const std::string& path, const std::set<std::string>& allowed) {
  expect_map(n, path);
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, child(path, key), "unknown field");
  }
}

YAML::Node require(const YAML::Node& parent, const std::string& key, const std::string& path) {
  YAML::Node n = parent[key];
  if (!n) fail(parent, child(path, key), "missing required field");
  return n;
}

double as_double(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) fail(n, field, "expected a number");
  const std::string& s = n.Scalar();
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(n, field, "expected a number, got '" + s + "'");
  return v;
}

bool as_bool(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) fail(n, field, "expected true or false");
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    fail(n, field, "expected true or false, got '" + n.Scalar() + "'");
  }
}

std::string as_string(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) fail(n, field, "expected a string");
  return n.Scalar();
}

template <class Int = long long>
Int as_integer(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) fail(n, field, "expected an integer");
  const std::string& s = n.Scalar();
  Int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(n, field, "expected an integer, got '" + s + "'");
  }
  return v;
}

double number(const YAML::Node& parent, const std::string& key, const std::string& path) {
  return as_double(require(parent, key, path), child(path, key));
}

double number_or(const YAML::Node& parent, const std::string& key, const std::string& path,
                 double fallback) {
  const YAML::Node n = parent[key];
  return n ? as_double(n, child(path, key)) : fallback;
}

Vec3 as_vec3(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence() || n.size() != 3) fail(n, field, "expected a list of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = as_double(n[i], field + "[" + std::to_string(i) + "]");
  return v;
}

UnitVec3 as_direction(const YAML::Node& n, const std::string& field) {
  const Vec3 v = as_vec3(n, field);
  try {
    return UnitVec3(v);
  } catch (const Error& e) {
    fail(n, field, e.what());
  }
}

Mat3 as_mat3(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence() || n.size() != 3) fail(n, field, "expected 3 rows of 3 numbers");
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    m.row(i) = as_vec3(n[i], field + "[" + std::to_string(i) + "]").transpose();
  }
  return m;
}

std::optional<double> angle_opt(const YAML::Node& parent, const std::string& base,
                                const std::string& path) {
  const YAML::Node deg = parent[base + "_deg"];
  const YAML::Node rad = parent[base + "_rad"];
  if (deg && rad) fail(rad, child(path, base), "give either _deg or _rad, not both");
  if (deg) return as_double(deg, child(path, base + "_deg")) * kDeg;
  if (rad) return as_double(rad, child(path, base + "_rad"));
  return std::nullopt;
}

double angle(const YAML::Node& parent, const std::string& base, const std::string& path) {
  if (auto a = angle_opt(parent, base, path)) return *a;
  fail(parent, child(path, base + "_deg"), "missing required field");
}

PptaSchedule schedule(const YAML::Node& parent, const std::string& path) {
  const double T = number(parent, "T", path);
  const double T_star = number(parent, "T_star", path);
  try {
    return PptaSchedule(T, T_star);
  } catch (const Error& e) {
    fail(parent["T_star"], child(path, "T_star"), e.what());
  }
}

PdGains pd_gains(const YAML::Node& parent, const std::string& key, const std::string& path,
                 PdGains fallback) {
  const YAML::Node n = parent[key];
  if (!n) return fallback;
  const std::string p = child(path, key);
  check_keys(n, p, {"kp", "kd"});
  return {number(n, "kp", p), number(n, "kd", p)};
}

template <class F>
auto rethrow_as_parse(const YAML::Node& n, const std::string& field, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    fail(n, field, e.what());
  }
}

YAML::Node load_yaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError("", e.mark.line, e.msg);
  }
}

GuidanceConfig parse_guidance(const YAML::Node& g) {
  const std::string path = "guidance";
  check_keys(g, path,
             {"goal", "virtual_zone_deg", "virtual_zone_rad", "margin_deg", "margin_rad",
              "influence_deg", "influence_rad", "iota_deg", "iota_rad", "k_a", "k_r", "mode",
              "T", "T_star", "zones"});
  const UnitVec3 goal = as_direction(require(g, "goal", path), "guidance.goal");
  const double margin = angle(g, "margin", path);
  const double influence = angle(g, "influence", path);
  const double iota = angle_opt(g, "iota", path).value_or(influence);
  const double k_a = number(g, "k_a", path);
  const double k_r = number(g, "k_r", path);
  const PptaSchedule sched = schedule(g, path);

  const YAML::Node zn = require(g, "zones", path);
  if (!zn.IsSequence()) fail(zn, "guidance.zones", "expected a list of zones");
  std::vector<ForbiddenZone> zones;
  for (std::size_t i = 0; i < zn.size(); ++i) {
    const std::string zp = "guidance.zones[" + std::to_string(i) + "]";
    const YAML::Node z = zn[i];
    check_keys(z, zp, {"axis", "half_angle_deg", "half_angle_rad"});
    zones.push_back({as_direction(require(z, "axis", zp), zp + ".axis"),
                     angle(z, "half_angle", zp), false});
  }

  return rethrow_as_parse(g, path, [&] {
    if (auto theta0 = angle_opt(g, "virtual_zone", path)) {
      return GuidanceConfig::with_virtual_zone(goal, *theta0, zones, margin, influence, iota, k_a,
                                               k_r, sched);
    }
    return GuidanceConfig(zones, goal, margin, influence, iota, k_a, k_r, sched);
  });
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Scenario parse_scenario(std::string_view text) {
  const YAML::Node root = load_yaml(text);
  check_keys(root, "", {"name", "guidance", "control", "plant", "initial", "simulation"});

  const YAML::Node g = require(root, "guidance", "");
  GuidanceConfig guidance = parse_guidance(g);
  const GuidanceMode mode = g["mode"] ? rethrow_as_parse(g["mode"], "guidance.mode", [&] {
    return parse_guidance_mode(as_string(g["mode"], "guidance.mode"));
  })
                                      : GuidanceMode::PrescribedTime;

  const YAML::Node c = require(root, "control", "");
  check_keys(c, "control",
             {"controller", "c1", "c2", "c3", "rho", "T", "T_star", "boresight_body", "apf", "pd"});
  const ControllerKind kind =
      c["controller"] ? rethrow_as_parse(c["controller"], "control.controller", [&] {
        return parse_controller_kind(as_string(c["controller"], "control.controller"));
      })
                      : ControllerKind::Ibgc;
  ControlGains gains{number(c, "c2", "control"), number(c, "c3", "control"),
                     number_or(c, "rho", "control", tube_level(guidance.margin())),
                     c["boresight_body"] ? as_direction(c["boresight_body"], "control.boresight_body")
                                         : UnitVec3::e3(),
                     schedule(c, "control")};

  const YAML::Node p = require(root, "plant", "");
  check_keys(p, "plant", {"inertia", "disturbance", "delta_j", "torque_limit"});
  PlantParams plant;
  plant.J0 = as_mat3(require(p, "inertia", "plant"), "plant.inertia");
  if (p["disturbance"]) plant.disturbance_enabled = as_bool(p["disturbance"], "plant.disturbance");
  if (p["delta_j"]) plant.delta_j_enabled = as_bool(p["delta_j"], "plant.delta_j");
  if (p["torque_limit"] && !p["torque_limit"].IsNull()) {
    plant.torque_limit = as_double(p["torque_limit"], "plant.torque_limit");
  }

  const YAML::Node in = require(root, "initial", "");
  check_keys(in, "initial", {"boresight", "attitude", "omega"});
  const UnitVec3 x0 = as_direction(require(in, "boresight", "initial"), "initial.boresight");
  std::optional<Rotation> r0;
  if (in["attitude"]) {
    const Mat3 m = as_mat3(in["attitude"], "initial.attitude");
    r0 = rethrow_as_parse(in["attitude"], "initial.attitude", [&] { return Rotation::from_matrix(m); });
  }
  std::optional<Vec3> w0;
  if (in["omega"]) w0 = as_vec3(in["omega"], "initial.omega");

  const YAML::Node s = require(root, "simulation", "");
  check_keys(s, "simulation",
             {"t_end", "dt", "output_decimation", "convergence_threshold_deg",
              "convergence_threshold_rad", "seed"});
  const long long dec = s["output_decimation"]
                            ? as_integer(s["output_decimation"], "simulation.output_decimation")
                            : 1;
  const std::uint64_t seed =
      s["seed"] ? as_integer<std::uint64_t>(s["seed"], "simulation.seed") : 0;

  Scenario sc{
      .name = root["name"] ? as_string(root["name"], "name") : std::string("scenario"),
      .guidance = std::move(guidance),
      .guidance_mode = mode,
      .gains = gains,
      .c1 = number(c, "c1", "control"),
      .plant = plant,
      .initial_boresight = x0,
      .initial_attitude = r0,
      .initial_omega = w0,
      .t_end = number(s, "t_end", "simulation"),
      .dt = number(s, "dt", "simulation"),
      .output_decimation = static_cast<int>(std::clamp<long long>(dec, -1, 1 << 30)),
      .controller = kind,
      .apf = pd_gains(c, "apf", "control", {5.0, 2.0}),
      .pd = pd_gains(c, "pd", "control", {0.05, 2.0}),
      .convergence_threshold =
          angle_opt(s, "convergence_threshold", "simulation").value_or(2.0 * kDeg),
      .seed = seed,
  };
  return sc;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Scenario load_scenario(const std::filesystem::path& path) {
  Scenario sc = parse_scenario(read_text_file(path));
  validate_scenario(sc);
  return sc;
}

namespace {

std::string vec(const Vec3& v) {
  return "[" + format_double(v[0]) + ", " + format_double(v[1]) + ", " + format_double(v[2]) + "]";
}

std::string mat(const Mat3& m, const std::string& indent) {
  std::string out;
  for (int i = 0; i < 3; ++i) out += "\n" + indent + "- " + vec(m.row(i).transpose());
  return out;
}

}  // namespace

std::string serialize_scenario(const Scenario& sc) {
  const GuidanceConfig& g = sc.guidance;
  std::ostringstream os;
  YAML::Emitter name;
  name << YAML::DoubleQuoted << sc.name;
  os << "name: " << name.c_str() << "\n";
  os << "guidance:\n";
  os << "  goal: " << vec(g.goal().vec()) << "\n";
  std::size_t first_real = 0;
  if (g.zone_count() > 0 && g.zone(0).is_virtual) {
    os << "  virtual_zone_rad: " << format_double(g.zone(0).half_angle) << "\n";
    first_real = 1;
  }
  os << "  margin_rad: " << format_double(g.margin()) << "\n";
  os << "  influence_rad: " << format_double(g.influence()) << "\n";
  os << "  iota_rad: " << format_double(g.iota()) << "\n";
  os << "  k_a: " << format_double(g.k_a()) << "\n";
  os << "  k_r: " << format_double(g.k_r()) << "\n";
  os << "  mode: " << to_string(sc.guidance_mode) << "\n";
  os << "  T: " << format_double(g.schedule().horizon()) << "\n";
  os << "  T_star: " << format_double(g.schedule().saturation()) << "\n";
  os << "  zones:" << (first_real == g.zone_count() ? " []" : "") << "\n";
  for (std::size_t i = first_real; i < g.zone_count(); ++i) {
    os << "    - axis: " << vec(g.zone(i).axis.vec()) << "\n";
    os << "      half_angle_rad: " << format_double(g.zone(i).half_angle) << "\n";
  }
  os << "control:\n";
  os << "  controller: " << to_string(sc.controller) << "\n";
  os << "  c1: " << format_double(sc.c1) << "\n";
  os << "  c2: " << format_double(sc.gains.c2) << "\n";
  os << "  c3: " << format_double(sc.gains.c3) << "\n";
  os << "  rho: " << format_double(sc.gains.rho) << "\n";
  os << "  T: " << format_double(sc.gains.sched.horizon()) << "\n";
  os << "  T_star: " << format_double(sc.gains.sched.saturation()) << "\n";
  os << "  boresight_body: " << vec(sc.gains.b_body.vec()) << "\n";
  os << "  apf: {kp: " << format_double(sc.apf.kp) << ", kd: " << format_double(sc.apf.kd) << "}\n";
  os << "  pd: {kp: " << format_double(sc.pd.kp) << ", kd: " << format_double(sc.pd.kd) << "}\n";
  os << "plant:\n";
  os << "  inertia:" << mat(sc.plant.J0, "    ") << "\n";
  os << "  disturbance: " << (sc.plant.disturbance_enabled ? "true" : "false") << "\n";
  os << "  delta_j: " << (sc.plant.delta_j_enabled ? "true" : "false") << "\n";
  if (sc.plant.torque_limit) os << "  torque_limit: " << format_double(*sc.plant.torque_limit) << "\n";
  os << "initial:\n";
  os << "  boresight: " << vec(sc.initial_boresight.vec()) << "\n";
  if (sc.initial_attitude) os << "  attitude:" << mat(sc.initial_attitude->matrix(), "    ") << "\n";
  if (sc.initial_omega) os << "  omega: " << vec(*sc.initial_omega) << "\n";
  os << "simulation:\n";
  os << "  t_end: " << format_double(sc.t_end) << "\n";
  os << "  dt: " << format_double(sc.dt) << "\n";
  os << "  output_decimation: " << sc.output_decimation << "\n";
  os << "  convergence_threshold_rad: " << format_double(sc.convergence_threshold) << "\n";
  os << "  seed: " << sc.seed << "\n";
  return os.str();
}

std::vector<LabelledInitial> parse_initials(std::string_view text) {
  const YAML::Node root = load_yaml(text);
  YAML::Node list = root;
  if (root.IsMap()) {
    check_keys(root, "", {"initials"});
    list = require(root, "initials", "");
  }
  if (!list.IsSequence()) fail(list, "initials", "expected a list");
  std::vector<LabelledInitial> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string p = "initials[" + std::to_string(i) + "]";
    const YAML::Node e = list[i];
    if (e.IsSequence()) {
      out.push_back({"#" + std::to_string(i), as_direction(e, p)});
      continue;
    }
    check_keys(e, p, {"label", "boresight", "note"});
    out.push_back({e["label"] ? as_string(e["label"], p + ".label") : "#" + std::to_string(i),
                   as_direction(require(e, "boresight", p), p + ".boresight")});
  }
  return out;
}

std::vector<LabelledInitial> load_initials(const std::filesystem::path& path) {
  return parse_initials(read_text_file(path));
}

std::vector<std::string> csv_columns(std::size_t zone_count) {
  std::vector<std::string> cols{"t"};
  auto add3 = [&](const std::string& base) {
    for (int i = 1; i <= 3; ++i) cols.push_back(base + "_" + std::to_string(i));
  };
  add3("x");
  add3("x_r");
  cols.push_back("sigma_e");
  cols.push_back("xi");
  add3("omega");
  add3("omega_e");
  add3("u");
  add3("d");
  add3("d_hat");
  cols.push_back("d_tilde_norm");
  for (std::size_t i = 0; i < zone_count; ++i) cols.push_back("clearance_" + std::to_string(i));
  return cols;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t zones = traj.metrics.min_zone_clearance.size();
  const auto cols = csv_columns(zones);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  std::string line;
  for (const auto& s : traj.samples) {
    line.clear();
    auto put = [&](double v) {
      if (!line.empty()) line += ',';
      line += format_double(v);
    };
    auto put3 = [&](const Vec3& v) {
      for (int i = 0; i < 3; ++i) put(v[i]);
    };
    put(s.state.t);
    put3(s.x.vec());
    put3(s.state.x_r.vec());
    put(s.signals.errors.sigma_e);
    put(s.signals.errors.xi);
    put3(s.state.omega);
    put3(s.signals.errors.omega_e);
    put3(s.signals.u);
    put3(s.signals.d);
    put3(s.signals.d_hat);
    put(s.d_tilde_norm);
    for (double c : s.clearance) put(c);
    os << line << "\n";
  }
}

nlohmann::json metrics_to_json(const MetricsSummary& m) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) -> json { return v ? json(*v) : json(nullptr); };
  json j;
  j["convergence_threshold"] = m.convergence_threshold;
  j["convergence_time"] = opt(m.convergence_time);
  j["converged"] = m.converged;
  j["final_time"] = m.final_time;
  j["final_error"] = m.final_error;
  j["error_at_tg_star"] = opt(m.error_at_tg_star);
  j["reference_error_at_tg_star"] = opt(m.reference_error_at_tg_star);
  j["min_zone_clearance"] = m.min_zone_clearance;
  j["min_reference_margin"] = m.min_reference_margin;
  j["max_u_inf"] = m.max_u_inf;
  j["max_xi"] = m.max_xi;
  j["max_d_tilde_after_tc_star"] = opt(m.max_d_tilde_after_tc_star);
  j["sigma_e_at_tc_star"] = opt(m.sigma_e_at_tc_star);
  j["d_tilde_at_tc_star"] = opt(m.d_tilde_at_tc_star);
  j["tube_breached"] = m.tube_breached;
  if (m.failure) {
    j["failure"] = {{"kind", m.failure->kind}, {"t", m.failure->t}, {"message", m.failure->message}};
  } else {
    j["failure"] = nullptr;
  }
  return j;
}

}  // namespace ptbore
