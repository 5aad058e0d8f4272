// Command-line driver: `tnst run <config>` and `tnst compare <csv>...`.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tnst/experiment.hpp"

namespace {

int do_run(const std::string& config_path, const std::vector<std::string>& overrides, const std::string& out_override,
           bool parallel) {
  tnst::ExperimentConfig cfg = tnst::load_config(config_path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!out_override.empty()) cfg.out = out_override;

  const auto rows = tnst::run_experiment(cfg, parallel);
  tnst::write_csv(std::cout, rows);
  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out);
    if (!out) throw std::runtime_error("cannot write " + cfg.out);
    tnst::write_csv(out, rows);
    std::filesystem::path trace(cfg.out);
    trace.replace_extension(".eps.csv");
    std::ofstream tr(trace);
    if (tr) tnst::write_eps_trace(tr, rows);
  }
  for (const auto& r : rows) {
    if (!r.ok()) return 2;
  }
  return 0;
}

int do_compare(const std::vector<std::string>& paths) {
  std::vector<std::vector<tnst::ResultRow>> tables;
  for (const auto& p : paths) tables.push_back(tnst::read_csv(std::filesystem::path(p)));
  const auto report = tnst::compare_report(tables);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  tnst::write_compare(std::cout, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-time spectral collocation solvers in full-grid and tensor-train form"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the experiment described by a key=value config file");
  std::string positional_config, flag_config, out_path;
  std::vector<std::string> overrides;
  bool parallel = false;
  run->add_option("config_file", positional_config, "Config file");
  run->add_option("--config", flag_config, "Config file (alternative to the positional argument)");
  run->add_option("--set", overrides, "Override a config key, key=value (repeatable)");
  run->add_option("--out", out_path, "CSV output path (overrides the config's out key)");
  run->add_flag("--parallel", parallel, "Run independent (N, solver) cells concurrently");

  auto* compare = app.add_subcommand("compare", "Join result tables on (experiment, N) and report speedups");
  std::vector<std::string> csvs;
  compare->add_option("csv", csvs, "Result tables; the first is the baseline")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const std::string path = !flag_config.empty() ? flag_config : positional_config;
      if (path.empty()) {
        std::cerr << "run: a config file is required (positional or --config)\n";
        return 1;
      }
      return do_run(path, overrides, out_path, parallel);
    }
    return do_compare(csvs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
