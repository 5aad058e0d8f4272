#include "tnst/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include "tnst/fullgrid.hpp"
#include "tnst/problems.hpp"
#include "tnst/tt_newton.hpp"

namespace tnst {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

const std::vector<std::string> kExperiments{"exp1", "manufactured", "burgers", "heat"};
const std::vector<std::string> kSolvers{"fullgrid", "tt-fixed-eps", "tt-step-trunc"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

ProblemSpec pde_problem(const std::string& name) {
  if (name == "manufactured") return manufactured_ncd();
  if (name == "burgers") return burgers3d();
  if (name == "heat") return heat_problem();
  throw std::invalid_argument("unknown PDE experiment '" + name + "'");
}

}  // namespace

void ExperimentConfig::set(const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in), value = trim(value_in);
  if (key == "experiment") {
    if (!contains(kExperiments, value)) throw std::invalid_argument("config: unknown experiment '" + value + "'");
    experiment = value;
  } else if (key == "solver") {
    solvers = split(value, ',');
    if (solvers.empty()) throw std::invalid_argument("config: empty solver list");
    for (const auto& s : solvers) {
      if (!contains(kSolvers, s)) throw std::invalid_argument("config: unknown solver '" + s + "'");
    }
  } else if (key == "N") {
    n_values.clear();
    for (const auto& s : split(value, ',')) {
      const long long n = parse_int(key, s);
      if (n < 2 || n > 64) throw std::invalid_argument("config: N values must lie in [2, 64]");
      n_values.push_back(static_cast<int>(n));
    }
    if (n_values.empty()) throw std::invalid_argument("config: empty N list");
  } else if (key == "eps_tt") {
    eps_tt = parse_double(key, value);
    if (!(eps_tt > 0.0)) throw std::invalid_argument("config: eps_tt must be positive");
  } else if (key == "eps_cross") {
    eps_cross = parse_double(key, value);
    if (!(*eps_cross > 0.0)) throw std::invalid_argument("config: eps_cross must be positive");
  } else if (key == "tol_res") {
    tol_res = parse_double(key, value);
    if (!(tol_res > 0.0)) throw std::invalid_argument("config: tol_res must be positive");
  } else if (key == "tol_update") {
    tol_update = parse_double(key, value);
    if (!(tol_update > 0.0)) throw std::invalid_argument("config: tol_update must be positive");
  } else if (key == "max_newton") {
    const long long v = parse_int(key, value);
    if (v < 1) throw std::invalid_argument("config: max_newton must be at least 1");
    max_newton = static_cast<int>(v);
  } else if (key == "seed") {
    const long long v = parse_int(key, value);
    if (v < 0) throw std::invalid_argument("config: seed must be non-negative");
    seed = static_cast<std::uint64_t>(v);
  } else if (key == "out") {
    out = value;
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    cfg.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_config(in);
}

ResultRow run_cell(const ExperimentConfig& config, const std::string& solver, int n) {
  ResultRow row;
  row.experiment = config.experiment;
  row.solver = solver;
  row.n = n;
  const auto start = std::chrono::steady_clock::now();
  try {
    // tt-fixed-eps rounds at eps_tt throughout; tt-step-trunc starts from
    // kStepTruncationEps0 and uses eps_tt as its floor.
    StepTruncationOptions st;
    st.adaptive = solver == "tt-step-trunc";
    st.eps0 = st.adaptive ? std::max(kStepTruncationEps0, config.eps_tt) : config.eps_tt;
    st.eps_floor = config.eps_tt;
    st.tol_res = config.tol_res;
    st.tol_update = config.tol_update;
    st.max_iter = config.max_newton;
    TTSystemOptions tto;
    tto.eps_cross = config.cross_eps();
    tto.seed = config.seed;

    NewtonOptions nopt;
    nopt.tol_res = config.tol_res;
    nopt.tol_update = config.tol_update;
    nopt.max_iter = config.max_newton;

    auto record_tt = [&](const StepTruncationState& s) {
      row.resid_final = s.relative_residual();
      row.newton_iters = s.iterations;
      row.max_rank = static_cast<long>(s.max_rank());
      row.cr = compression_ratio(s.iterate);
      row.eps_trace = s.eps_trace();
      row.status = s.converged ? "ok" : "failed:" + s.criterion;
    };
    auto record_dense = [&](const NewtonReport& r) {
      row.resid_final = r.relative_residual();
      row.newton_iters = r.iterations;
      row.status = r.converged ? "ok" : "failed:" + r.criterion;
    };

    if (config.experiment == "exp1") {
      const auto m = static_cast<std::size_t>(n);
      const RootFindProblem problem = experiment1_rootfind(config.seed, {m, m, m, m});
      const double exact_norm = tt_norm(problem.exact);
      if (solver == "fullgrid") {
        DenseRootFindSystem sys(problem);
        NewtonResult r = newton_solve(sys, DenseField(problem.mode_sizes()), nopt);
        DenseField diff = r.u - tt_to_dense(problem.exact);
        row.rel_error = diff.norm() / exact_norm;
        record_dense(r.report);
      } else {
        TTRootFindSystem sys(problem, tto);
        const StepTruncationState s = step_truncation_newton(sys, TTTensor::zeros(problem.mode_sizes()), st);
        row.rel_error = tt_norm(tt_axpby(1.0, s.iterate, -1.0, problem.exact)) / exact_norm;
        record_tt(s);
      }
    } else {
      const ProblemSpec problem = pde_problem(config.experiment);
      const SpaceTimeGrid grid = SpaceTimeGrid::cube(static_cast<std::size_t>(n) + 1, problem.time, problem.space);
      if (solver == "fullgrid") {
        FullGridSystem sys(problem, grid);
        NewtonResult r = newton_solve(sys, initial_guess(problem, grid), nopt);
        if (problem.exact) row.rel_error = relative_error(sys.assemble(r.u), *problem.exact, grid);
        record_dense(r.report);
      } else {
        TTSpaceTimeSystem sys(problem, grid, tto);
        const StepTruncationState s = step_truncation_newton(sys, sys.initial_guess(config.eps_tt), st);
        if (problem.exact) row.rel_error = relative_error(sys.assemble_dense(s.iterate), *problem.exact, grid);
        record_tt(s);
      }
    }
  } catch (const std::exception& e) {
    row.status = "error:" + sanitize(e.what());
  }
  row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, bool parallel) {
  std::vector<std::pair<std::string, int>> cells;
  for (int n : config.n_values)
    for (const auto& s : config.solvers) cells.emplace_back(s, n);
  std::vector<ResultRow> rows;
  if (parallel) {
    std::vector<std::future<ResultRow>> jobs;
    for (const auto& [s, n] : cells) {
      jobs.push_back(std::async(std::launch::async, [&config, s = s, n = n] { return run_cell(config, s, n); }));
    }
    for (auto& j : jobs) rows.push_back(j.get());
  } else {
    for (const auto& [s, n] : cells) rows.push_back(run_cell(config, s, n));
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.solver << ',' << r.n << ',' << (r.rel_error ? fmt(*r.rel_error) : "") << ','
        << fmt(r.resid_final) << ',' << r.newton_iters << ',' << fmt(r.wall_s) << ','
        << (r.max_rank ? std::to_string(*r.max_rank) : "") << ',' << (r.cr ? fmt(*r.cr) : "") << ','
        << sanitize(r.status) << '\n';
  }
}

void write_eps_trace(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "experiment,solver,N,iteration,eps\n";
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.eps_trace.size(); ++k) {
      out << r.experiment << ',' << r.solver << ',' << r.n << ',' << k << ',' << fmt(r.eps_trace[k]) << '\n';
    }
  }
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    throw std::invalid_argument("read_csv: schema mismatch, expected header '" + std::string(kCsvHeader) + "'");
  }
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    // Keep empty trailing fields.
    std::vector<std::string> f;
    std::size_t pos = 0;
    while (true) {
      const auto c = line.find(',', pos);
      f.push_back(trim(line.substr(pos, c == std::string::npos ? std::string::npos : c - pos)));
      if (c == std::string::npos) break;
      pos = c + 1;
    }
    if (f.size() != 10) throw std::invalid_argument("read_csv: line " + std::to_string(lineno) + " has wrong field count");
    ResultRow r;
    r.experiment = f[0];
    r.solver = f[1];
    r.n = static_cast<int>(parse_int("N", f[2]));
    if (!f[3].empty()) r.rel_error = parse_double("rel_error", f[3]);
    r.resid_final = parse_double("resid_final", f[4]);
    r.newton_iters = static_cast<int>(parse_int("newton_iters", f[5]));
    r.wall_s = parse_double("wall_s", f[6]);
    if (!f[7].empty()) r.max_rank = static_cast<long>(parse_int("max_rank", f[7]));
    if (!f[8].empty()) r.cr = parse_double("cr", f[8]);
    r.status = f[9];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv(in);
}

namespace {

CompareRow make_pair_row(const ResultRow& base, const ResultRow& cand) {
  CompareRow c;
  c.experiment = base.experiment;
  c.n = base.n;
  c.baseline_solver = base.solver;
  c.solver = cand.solver;
  c.speedup = cand.wall_s > 0.0 ? base.wall_s / cand.wall_s : 0.0;
  if (base.rel_error && cand.rel_error && *base.rel_error > 0.0) c.error_ratio = *cand.rel_error / *base.rel_error;
  return c;
}

}  // namespace

CompareReport compare_report(const std::vector<std::vector<ResultRow>>& tables) {
  CompareReport report;
  if (tables.empty()) {
    report.warnings.push_back("no input tables");
    return report;
  }
  auto same_key = [](const ResultRow& a, const ResultRow& b) { return a.experiment == b.experiment && a.n == b.n; };
  if (tables.size() == 1) {
    const auto& t = tables[0];
    for (const auto& base : t) {
      if (base.solver != "fullgrid") continue;
      for (const auto& cand : t) {
        if (&cand != &base && same_key(base, cand) && cand.solver != "fullgrid") {
          report.rows.push_back(make_pair_row(base, cand));
        }
      }
    }
  } else {
    const auto& baseline = tables[0];
    for (std::size_t q = 1; q < tables.size(); ++q) {
      for (const auto& cand : tables[q]) {
        bool matched = false;
        for (const auto& base : baseline) {
          if (same_key(base, cand) && base.solver == cand.solver) {
            report.rows.push_back(make_pair_row(base, cand));
            matched = true;
          }
        }
        if (matched) continue;
        for (const auto& base : baseline) {
          if (same_key(base, cand)) report.rows.push_back(make_pair_row(base, cand));
        }
      }
    }
  }
  if (report.rows.empty()) report.warnings.push_back("no (experiment, N) pairs in common; comparison table is empty");
  return report;
}

void write_compare(std::ostream& out, const CompareReport& report) {
  out << "experiment,N,baseline,solver,speedup,error_ratio\n";
  for (const auto& r : report.rows) {
    out << r.experiment << ',' << r.n << ',' << r.baseline_solver << ',' << r.solver << ',' << fmt(r.speedup) << ','
        << (r.error_ratio ? fmt(*r.error_ratio) : "") << '\n';
  }
}

}  // namespace tnst
