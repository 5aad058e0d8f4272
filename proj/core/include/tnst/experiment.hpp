#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tnst {

/// Flat key=value run description. Keys: experiment, solver, N, eps_tt,
/// eps_cross, tol_res, tol_update, max_newton, seed, out. `solver` and `N`
/// take comma-separated lists.
struct ExperimentConfig {
  std::string experiment = "burgers";  ///< exp1 | manufactured | burgers | heat
  std::vector<std::string> solvers{"fullgrid"};  ///< fullgrid | tt-fixed-eps | tt-step-trunc
  std::vector<int> n_values{8};
  double eps_tt = 1e-5;
  std::optional<double> eps_cross;  ///< defaults to eps_tt
  double tol_res = 1e-6;
  double tol_update = 1e-6;
  int max_newton = 30;
  std::uint64_t seed = 1;
  std::string out;                  ///< CSV path; empty writes nothing

  /// Sets one key from its text value. Throws std::invalid_argument on an
  /// unknown key or malformed value.
  void set(const std::string& key, const std::string& value);
  double cross_eps() const { return eps_cross.value_or(eps_tt); }
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ResultRow {
  std::string experiment;
  std::string solver;
  int n = 0;
  std::optional<double> rel_error;
  double resid_final = 0.0;  ///< ||G|| / ||G_0|| at exit
  int newton_iters = 0;
  double wall_s = 0.0;
  std::optional<long> max_rank;
  std::optional<double> cr;
  std::string status;  ///< ok | failed:<criterion> | error:<message>
  std::vector<double> eps_trace;

  bool ok() const { return status == "ok"; }
};

/// Starting truncation tolerance of the tt-step-trunc solver.
inline constexpr double kStepTruncationEps0 = 1e-1;

inline constexpr const char* kCsvHeader =
    "experiment,solver,N,rel_error,resid_final,newton_iters,wall_s,max_rank,cr,status";

/// Runs a single (experiment, solver, N) cell. Never throws for solver
/// failures; they are reported in `status`.
ResultRow run_cell(const ExperimentConfig& config, const std::string& solver, int n);

/// Every (N, solver) cell of the config, in config order. With parallel set,
/// cells run concurrently.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, bool parallel = false);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// Per-iteration eps_k trace: experiment,solver,N,iteration,eps.
void write_eps_trace(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& in);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

struct CompareRow {
  std::string experiment;
  int n = 0;
  std::string baseline_solver;
  std::string solver;
  double speedup = 0.0;                ///< baseline wall time / solver wall time
  std::optional<double> error_ratio;   ///< solver error / baseline error
};

struct CompareReport {
  std::vector<CompareRow> rows;
  std::vector<std::string> warnings;
};

/// With one table, rows of each (experiment, N) are compared against the
/// fullgrid row of the same key. With several, the first table is the
/// baseline: matching solvers pair one-to-one and solvers absent from the
/// baseline pair with every baseline row of the key.
CompareReport compare_report(const std::vector<std::vector<ResultRow>>& tables);
void write_compare(std::ostream& out, const CompareReport& report);

}  // namespace tnst
