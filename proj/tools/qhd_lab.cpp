#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <iostream>

#include "qhd/config.hpp"
#include "qhd/io.hpp"
#include "qhd/pipeline.hpp"

namespace {

int write_error(const std::filesystem::path& dir, const std::string& kind, const std::string& message,
                const qhd::json& extra = qhd::json::object()) {
  std::cerr << "qhd_lab: " << kind << " error: " << message << "\n";
  try {
    std::filesystem::create_directories(dir);
    qhd::json err = {{"kind", kind}, {"message", message}};
    err.update(extra);
    qhd::write_json(dir / "error.json", {{"error", err}});
  } catch (const std::exception& e) {
    std::cerr << "qhd_lab: could not write error.json: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscous-dispersive QHD shock profiles and their spectral stability checks"};
  std::string command, config_path, output;
  int jobs = 1;
  app.add_option("command", command, "endstates | profile | essential | point | energy | all | sweep")
      ->required()
      ->check(CLI::IsMember({"endstates", "profile", "essential", "point", "energy", "all", "sweep"}));
  app.add_option("--config", config_path, "key = value configuration file")->required();
  app.add_option("--output", output, "output directory (overrides QHD_LAB_OUTPUT and output_dir)");
  app.add_option("--jobs", jobs, "concurrent sweep members")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::string forced = output;
  if (const char* env = std::getenv("QHD_LAB_OUTPUT"); forced.empty() && env && *env) forced = env;
  std::filesystem::path out = forced.empty() ? "qhd_out" : forced;
  qhd::RunConfig cfg;
  try {
    cfg = qhd::parse_config(qhd::read_file(config_path));
  } catch (const qhd::ParseError& e) {
    return write_error(out, "parse", e.what(), {{"line", e.line}});
  } catch (const std::exception& e) {
    return write_error(out, "io", e.what());
  }
  if (forced.empty()) out = cfg.output_dir;

  auto t0 = std::chrono::steady_clock::now();
  int status = 0;
  try {
    if (command == "sweep") {
      auto r = qhd::run_sweep(cfg, out, jobs);
      status = r.any_error ? 1 : (r.all_pass ? 0 : 2);
    } else {
      qhd::Run run(cfg, out);
      if (command == "endstates") run.endstates();
      else if (command == "profile") run.profile_stage();
      else if (command == "essential") run.essential_stage();
      else if (command == "point") run.point_stage();
      else if (command == "energy") run.energy_stage();
      else run.all();
      for (const auto& v : run.verdicts()) std::cout << v.name << ": " << (v.pass ? "PASS" : "FAIL") << "\n";
      status = run.all_pass() ? 0 : 2;
    }
  } catch (const qhd::SolverError& e) {
    return write_error(out, "solver", e.what(), {{"last_residual", qhd::jnum(e.last_residual)}});
  } catch (const qhd::DomainError& e) {
    return write_error(out, "domain", e.what());
  } catch (const std::exception& e) {
    return write_error(out, "runtime", e.what());
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "qhd_lab: " << command << " finished in " << dt << " s, artifacts in " << out.string() << "\n";
  return status;
}
