#include "vrtpp/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "vrtpp/arc_solver.hpp"
#include "vrtpp/path_solver.hpp"

namespace vrtpp {

namespace {

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

struct Stats {
  int n = 0;
  double sum = 0, sum2 = 0;
  void add(double v) {
    ++n;
    sum += v;
    sum2 += v * v;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double stdev() const {
    if (n < 2) return 0.0;
    double m = mean();
    return std::sqrt(std::max(0.0, (sum2 - n * m * m) / (n - 1)));
  }
};

}  // namespace

double gap_to_ideal(double J, const std::vector<double>& profits) {
  double ideal = 0;
  for (double p : profits) ideal += p;
  if (ideal <= 0) throw ZeroIdealProfit();
  return 100.0 * (ideal - J) / ideal;
}

RunRecord record_from(const std::string& id, const MissionSolution& sol, const Scenario& scn) {
  RunRecord r;
  r.instance = id;
  r.method = sol.method;
  r.objective = sol.objective;
  r.profit = sol.profit;
  r.propellant_kg = sol.initial_propellant_kg;
  r.refuel_kg = sol.refuel_kg;
  r.vehicles = sol.vehicles_used;
  r.targets = sol.targets_visited;
  r.wall_s = sol.wall_time_s;
  r.trivial = sol.targets_visited == 0;
  r.converged = sol.converged;
  r.g_ideal = gap_to_ideal(sol.objective, scn.profit);
  return r;
}

std::string runs_csv(const std::vector<RunRecord>& runs) {
  std::ostringstream os;
  os << "instance,method,objective,profit,propellant_kg,refuel_kg,vehicles,targets,"
        "wall_s,trivial,converged,g_ideal_pct\n";
  for (const RunRecord& r : runs)
    os << r.instance << "," << r.method << "," << fmt(r.objective) << "," << fmt(r.profit) << ","
       << fmt(r.propellant_kg) << "," << fmt(r.refuel_kg) << "," << r.vehicles << "," << r.targets
       << "," << fmt(r.wall_s, 3) << "," << (r.trivial ? 1 : 0) << "," << (r.converged ? 1 : 0)
       << "," << fmt(r.g_ideal) << "\n";
  return os.str();
}

CaseStudyReport run_case_study() {
  Scenario scn = case_study_scenario();
  CaseStudyReport rep;
  rep.arc = solve_arc(scn);
  rep.path = solve_path(scn);
  rep.records.push_back(record_from("case_study", rep.arc, scn));
  rep.records.push_back(record_from("case_study", rep.path, scn));

  std::ostringstream os;
  os << "metric                        arc          path\n";
  auto row = [&](const char* name, double a, double p, int prec) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-26s%10.*f    %10.*f\n", name, prec, a, prec, p);
    os << buf;
  };
  row("profit", rep.arc.profit, rep.path.profit, 3);
  row("objective", rep.arc.objective, rep.path.objective, 4);
  row("initial propellant [kg]", rep.arc.initial_propellant_kg, rep.path.initial_propellant_kg, 2);
  row("refuel [kg]", rep.arc.refuel_kg, rep.path.refuel_kg, 2);
  row("vehicles used", rep.arc.vehicles_used, rep.path.vehicles_used, 0);
  row("targets visited", rep.arc.targets_visited, rep.path.targets_visited, 0);
  row("gap to ideal [%]", rep.records[0].g_ideal, rep.records[1].g_ideal, 3);
  row("wall time [s]", rep.arc.wall_time_s, rep.path.wall_time_s, 1);
  rep.comparison = os.str();
  return rep;
}

BenchResult run_benchmark(const std::vector<int>& n_r_list, const std::vector<int>& n_t_list,
                          int per_cell, std::uint64_t seed_base, int workers) {
  BenchResult out;
  for (int nr : n_r_list)
    for (int nt : n_t_list)
      for (int i = 0; i < per_cell; ++i) {
        BenchRun run;
        run.n_r = nr;
        run.n_t = nt;
        run.seed = seed_base + 1000 * (static_cast<std::uint64_t>(nr) * 100 + nt) + i;
        char id[64];
        std::snprintf(id, sizeof(id), "r%d_t%d_i%02d", nr, nt, i);
        run.instance = id;
        out.runs.push_back(std::move(run));
      }

  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t idx; (idx = next.fetch_add(1)) < out.runs.size();) {
      BenchRun& run = out.runs[idx];
      Scenario scn = generate_instance(run.seed, run.n_r, run.n_t);
      run.arc_sol = solve_arc(scn);
      run.path_sol = solve_path(scn);
      run.arc = record_from(run.instance, run.arc_sol, scn);
      run.path = record_from(run.instance, run.path_sol, scn);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return out;
}

std::vector<RunRecord> flatten(const BenchResult& b) {
  std::vector<RunRecord> rs;
  for (const BenchRun& run : b.runs) {
    rs.push_back(run.arc);
    rs.push_back(run.path);
  }
  return rs;
}

std::string summary_csv(const BenchResult& b) {
  std::ostringstream os;
  os << "n_r,n_t,method,runs,mean_wall_s,std_wall_s,mean_g_ideal_pct,std_g_ideal_pct,"
        "trivial,non_converged\n";
  // cells in first-appearance order; runs are already cell-sorted
  std::vector<std::pair<int, int>> cells;
  for (const BenchRun& run : b.runs) {
    std::pair<int, int> c{run.n_r, run.n_t};
    if (cells.empty() || cells.back() != c) cells.push_back(c);
  }
  for (auto [nr, nt] : cells)
    for (const char* method : {"arc", "path"}) {
      Stats time, gap;
      int trivial = 0, noconv = 0;
      for (const BenchRun& run : b.runs) {
        if (run.n_r != nr || run.n_t != nt) continue;
        const RunRecord& r = method[0] == 'a' ? run.arc : run.path;
        time.add(r.wall_s);
        gap.add(r.g_ideal);
        trivial += r.trivial;
        noconv += !r.converged;
      }
      os << nr << "," << nt << "," << method << "," << time.n << "," << fmt(time.mean(), 3) << ","
         << fmt(time.stdev(), 3) << "," << fmt(gap.mean()) << "," << fmt(gap.stdev()) << ","
         << trivial << "," << noconv << "\n";
    }
  return os.str();
}

std::string parity_csv(const BenchResult& b) {
  std::ostringstream os;
  os << "instance,n_r,n_t,g_ideal_arc_pct,g_ideal_path_pct\n";
  for (const BenchRun& run : b.runs) {
    if (run.arc.trivial || run.path.trivial || !run.arc.converged || !run.path.converged) continue;
    os << run.instance << "," << run.n_r << "," << run.n_t << "," << fmt(run.arc.g_ideal) << ","
       << fmt(run.path.g_ideal) << "\n";
  }
  return os.str();
}

}  // namespace vrtpp
