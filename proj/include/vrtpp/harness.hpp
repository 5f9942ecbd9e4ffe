#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrtpp/solution.hpp"

namespace vrtpp {

struct ZeroIdealProfit : std::runtime_error {
  ZeroIdealProfit() : std::runtime_error("ideal profit is zero") {}
};

// 100 * (P_ideal - J) / P_ideal with P_ideal = sum of profits.
double gap_to_ideal(double J, const std::vector<double>& profits);

struct RunRecord {
  std::string instance;
  std::string method;  // "arc" or "path"
  double objective = 0;
  double profit = 0;
  double propellant_kg = 0;
  double refuel_kg = 0;
  int vehicles = 0;
  int targets = 0;
  double wall_s = 0;
  bool trivial = false;    // zero targets visited
  bool converged = false;  // refinement loop reached its fixed point
  double g_ideal = 0;      // percent
};

RunRecord record_from(const std::string& id, const MissionSolution& sol, const Scenario& scn);

std::string runs_csv(const std::vector<RunRecord>& runs);

struct CaseStudyReport {
  MissionSolution arc;
  MissionSolution path;
  std::vector<RunRecord> records;  // arc then path
  std::string comparison;          // side-by-side metric table
};

CaseStudyReport run_case_study();

struct BenchRun {
  std::string instance;
  int n_r = 0, n_t = 0;
  std::uint64_t seed = 0;
  RunRecord arc, path;
  MissionSolution arc_sol, path_sol;
};

struct BenchResult {
  std::vector<BenchRun> runs;  // ordered by (n_r, n_t, seed)
};

// Per cell: `per_cell` generated instances, both methods each. Instances run
// concurrently across `workers` threads; results are merged back in instance
// order so the output is independent of scheduling.
BenchResult run_benchmark(const std::vector<int>& n_r_list, const std::vector<int>& n_t_list,
                          int per_cell, std::uint64_t seed_base, int workers = 1);

std::vector<RunRecord> flatten(const BenchResult& b);
std::string summary_csv(const BenchResult& b);  // per-cell stats per method
std::string parity_csv(const BenchResult& b);   // gap pairs, both converged non-trivial

}  // namespace vrtpp
