#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vrtpp/arc_solver.hpp"
#include "vrtpp/harness.hpp"
#include "vrtpp/path_solver.hpp"

namespace fs = std::filesystem;
using namespace vrtpp;

namespace {

void apply_override(Scenario& scn, const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos) throw SchemaError("override must be key=value: " + kv);
  std::string key = kv.substr(0, eq);
  double val = std::stod(kv.substr(eq + 1));
  if (key == "isp_s")
    scn.isp_s = val;
  else if (key == "m_dry")
    scn.m_dry = val;
  else if (key == "m_max")
    scn.m_max = val;
  else if (key == "q_max")
    scn.q_max = val;
  else if (key == "r_max")
    scn.r_max = val;
  else if (key == "t_svc_tu")
    scn.t_svc_tu = val;
  else if (key == "lambda")
    scn.lambda = val;
  else if (key == "t_max_tu")
    scn.t_max_tu = val;
  else if (key == "l_max")
    scn.l_max = static_cast<int>(val);
  else if (key == "eps_c_kms")
    scn.eps_c_kms = val;
  else if (key == "milp_time_limit_s")
    scn.milp_time_limit_s = val;
  else
    throw SchemaError("unknown override key: " + key);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

void write_mission(const MissionSolution& sol, const fs::path& dir, const std::string& stem) {
  write_file(dir / (stem + ".json"), mission_to_json(sol));
  write_file(dir / (stem + ".csv"), mission_to_csv(sol));
  write_file(dir / (stem + ".txt"), mission_to_text(sol));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vehicle routing and trajectory solver with profits and partial refueling"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<std::string> overrides;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "RNG seed / seed base");
  app.add_option("--workers", workers, "concurrent instances for bench");
  app.add_option("--override", overrides, "scenario parameter override key=value");

  auto* solve = app.add_subcommand("solve", "solve one scenario");
  std::string scenario_path, method = "both";
  solve->add_option("--scenario", scenario_path, "scenario JSON")->required();
  solve->add_option("--method", method, "arc | path | both")
      ->check(CLI::IsMember({"arc", "path", "both"}));

  auto* gen = app.add_subcommand("gen", "generate random instances");
  int nr = 2, nt = 5, count = 1;
  gen->add_option("--nr", nr, "refueling stations");
  gen->add_option("--nt", nt, "target satellites");
  gen->add_option("--count", count, "number of instances");

  auto* contour = app.add_subcommand("contour", "dv grid over departure x transfer time");
  std::string c_scenario;
  int c_from = 0, c_to = 0, n_dep = 200, n_tof = 200;
  double dep_lo = 0.0, dep_hi = -1.0, tof_lo = kMinTransferTu, tof_hi = -1.0;
  contour->add_option("--scenario", c_scenario, "scenario JSON")->required();
  contour->add_option("--from", c_from, "from node index")->required();
  contour->add_option("--to", c_to, "to node index")->required();
  contour->add_option("--dep-lo", dep_lo);
  contour->add_option("--dep-hi", dep_hi, "default t_max");
  contour->add_option("--tof-lo", tof_lo);
  contour->add_option("--tof-hi", tof_hi, "default t_max");
  contour->add_option("--n-dep", n_dep);
  contour->add_option("--n-tof", n_tof);

  auto* bench = app.add_subcommand("bench", "batch benchmark over generated instances");
  bool full = false;
  int per_cell = 5;
  std::vector<int> nr_list{1, 2}, nt_list{4, 6};
  bench->add_flag("--full", full, "paper-scale protocol: 50/cell, n_r 1-3, n_t 4-10");
  bench->add_option("--per-cell", per_cell, "instances per cell");
  bench->add_option("--nr", nr_list, "station counts");
  bench->add_option("--nt", nt_list, "target counts");

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);

    if (*solve) {
      Scenario scn = load_scenario(scenario_path);
      for (const auto& kv : overrides) apply_override(scn, kv);
      scn.validate();
      bool all_feasible = true;
      for (const std::string& m : {std::string("arc"), std::string("path")}) {
        if (method != "both" && method != m) continue;
        MissionSolution sol = m == "arc" ? solve_arc(scn) : solve_path(scn);
        write_mission(sol, out_dir, "mission_" + m);
        std::cout << mission_to_text(sol) << "\n";
        if (!sol.feasible) all_feasible = false;
      }
      return all_feasible ? 0 : 2;
    }

    if (*gen) {
      for (int i = 0; i < count; ++i) {
        Scenario scn = generate_instance(seed + i, nr, nt);
        for (const auto& kv : overrides) apply_override(scn, kv);
        scn.validate();
        char name[64];
        std::snprintf(name, sizeof(name), "instance_r%d_t%d_s%llu.json", nr, nt,
                      static_cast<unsigned long long>(seed + i));
        save_scenario(scn, (fs::path(out_dir) / name).string());
        std::cout << name << "\n";
      }
      return 0;
    }

    if (*contour) {
      Scenario scn = load_scenario(c_scenario);
      for (const auto& kv : overrides) apply_override(scn, kv);
      scn.validate();
      if (dep_hi < 0) dep_hi = scn.t_max_tu;
      if (tof_hi < 0) tof_hi = scn.t_max_tu;
      DvGrid g = dv_grid(scn.elements_of(c_from), scn.elements_of(c_to), dep_lo, dep_hi, tof_lo,
                         tof_hi, n_dep, n_tof, scn.units);
      fs::path out = fs::path(out_dir) / "contour.csv";
      write_file(out, dv_grid_csv(g));
      std::cout << out.string() << "\n";
      return 0;
    }

    if (*bench) {
      if (full) {
        per_cell = 50;
        nr_list = {1, 2, 3};
        nt_list = {4, 6, 8, 10};
      }
      BenchResult res = run_benchmark(nr_list, nt_list, per_cell, seed, workers);
      fs::path dir(out_dir);
      write_file(dir / "runs.csv", runs_csv(flatten(res)));
      write_file(dir / "summary.csv", summary_csv(res));
      write_file(dir / "parity.csv", parity_csv(res));
      for (const BenchRun& run : res.runs) {
        write_file(dir / ("mission_" + run.instance + "_arc.json"), mission_to_json(run.arc_sol));
        write_file(dir / ("mission_" + run.instance + "_path.json"),
                   mission_to_json(run.path_sol));
      }
      std::cout << (dir / "summary.csv").string() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
