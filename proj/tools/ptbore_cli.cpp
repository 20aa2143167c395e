// Command-line front end: validate, simulate, batch, critical-points, lemma-bounds.

#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ptbore/campaign.hpp"
#include "ptbore/errors.hpp"
#include "ptbore/ppta.hpp"
#include "ptbore/scenario_io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kSimulationFatal = 3;
constexpr int kIo = 4;

using ptbore::Scenario;

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ptbore::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ptbore::ValidationError& e) {
    std::cerr << "invalid scenario:" << e.what() << "\n";
    return kInvalid;
  } catch (const ptbore::HypothesisViolated& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ptbore::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ptbore::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSimulationFatal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prescribed-time boresight reorientation under keep-out cones"};
  app.require_subcommand(1);

  std::string file;

  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
  validate->add_option("file", file, "Scenario file")->required();

  auto* simulate = app.add_subcommand("simulate", "Run one closed-loop simulation");
  std::string out_dir;
  std::optional<std::string> controller;
  std::optional<double> dt;
  std::optional<double> clamp;
  simulate->add_option("file", file, "Scenario file")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--controller", controller, "ibgc | apf | pd | none");
  simulate->add_option("--dt", dt, "Integration step [s]");
  simulate->add_option("--clamp", clamp, "Per-axis torque limit [N m]");

  auto* batch = app.add_subcommand("batch", "Multi-start campaign over initial boresights");
  std::optional<std::size_t> count;
  std::optional<std::uint64_t> seed;
  double start_buffer_deg = 0.0;
  std::string initials_file;
  std::string batch_out;
  bool serial = false;
  batch->add_option("file", file, "Scenario file")->required();
  auto* n_opt = batch->add_option("--n", count, "Number of random initials");
  batch->add_option("--seed", seed, "Sampling seed (default: scenario seed)")->needs(n_opt);
  batch->add_option("--start-buffer-deg", start_buffer_deg,
                    "Keep random initials this far outside every augmented zone")
      ->needs(n_opt);
  auto* ini_opt = batch->add_option("--initials", initials_file, "File of initial boresights");
  n_opt->excludes(ini_opt);
  batch->add_option("--out", batch_out, "Output directory (default: JSON on stdout)");
  batch->add_flag("--serial", serial, "Run on one thread");

  auto* crit = app.add_subcommand("critical-points", "Undesired equilibria behind each zone");
  crit->add_option("file", file, "Scenario file")->required();

  auto* lemma = app.add_subcommand("lemma-bounds", "Ultimate bounds of V' = -alpha mu V + beta");
  double alpha = 0.0, beta = 0.0, T = 0.0, T_star = 0.0, v0 = 0.0;
  lemma->add_option("--alpha", alpha)->required();
  lemma->add_option("--beta", beta)->required();
  lemma->add_option("--T", T)->required();
  lemma->add_option("--Tstar", T_star)->required();
  lemma->add_option("--V0", v0)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  if (validate->parsed()) {
    return guarded([&] {
      const Scenario sc = ptbore::load_scenario(file);
      std::cout << "ok: " << sc.name << "\n";
      return kOk;
    });
  }

  if (simulate->parsed()) {
    return guarded([&] {
      Scenario sc = ptbore::load_scenario(file);
      if (controller) sc.controller = ptbore::parse_controller_kind(*controller);
      if (dt) sc.dt = *dt;
      if (clamp) sc.plant.torque_limit = *clamp;
      ptbore::validate_scenario(sc);
      const auto m = ptbore::run(sc, out_dir);
      std::cout << ptbore::metrics_to_json(m).dump(2) << "\n";
      return m.failure ? kSimulationFatal : kOk;
    });
  }

  if (batch->parsed()) {
    return guarded([&] {
      const Scenario sc = ptbore::load_scenario(file);
      std::vector<ptbore::UnitVec3> initials;
      std::vector<std::string> labels;
      if (!initials_file.empty()) {
        for (auto& e : ptbore::load_initials(initials_file)) {
          initials.push_back(e.boresight);
          labels.push_back(e.label);
        }
      } else if (count) {
        initials = ptbore::sample_initials(sc.guidance, *count, seed.value_or(sc.seed),
                                           start_buffer_deg * std::numbers::pi / 180.0);
      } else {
        throw ptbore::DomainError("batch needs --n or --initials");
      }
      const auto entries = serial ? ptbore::batch_serial(sc, initials, labels)
                                  : ptbore::batch_parallel(sc, initials, labels);
      const std::string text = ptbore::batch_to_json(entries).dump(2) + "\n";
      if (batch_out.empty()) {
        std::cout << text;
      } else {
        std::error_code ec;
        std::filesystem::create_directories(batch_out, ec);
        if (ec) throw ptbore::IoError("cannot create '" + batch_out + "': " + ec.message());
        ptbore::write_text_file(std::filesystem::path(batch_out) / "batch.json", text);
      }
      return kOk;
    });
  }

  if (crit->parsed()) {
    return guarded([&] {
      const Scenario sc = ptbore::load_scenario(file);
      std::cout << ptbore::critical_points_to_json(ptbore::critical_points_report(sc.guidance))
                       .dump(2)
                << "\n";
      return kOk;
    });
  }

  if (lemma->parsed()) {
    return guarded([&] {
      const auto b = ptbore::lemma1_bounds(alpha, beta, ptbore::PptaSchedule(T, T_star), v0);
      const nlohmann::json j{{"v1", b.v1}, {"v1_bar", b.v1_bar}, {"v2", b.v2}, {"v_max", b.v_max}};
      std::cout << j.dump(2) << "\n";
      return kOk;
    });
  }
  return kInvalid;
}
