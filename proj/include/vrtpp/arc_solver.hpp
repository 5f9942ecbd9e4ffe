#pragma once

#include <map>
#include <tuple>
#include <vector>

#include "vrtpp/legs.hpp"
#include "vrtpp/linmodel.hpp"
#include "vrtpp/scenario.hpp"
#include "vrtpp/solution.hpp"

namespace vrtpp {

// Arc-based MILP over the duplicated node graph with linearized rocket rows.
// Options restrict it to the pricing variant (single vehicle, a fixed target
// subset visited with equality, minimum-propellant objective).
struct ArcModelOptions {
  bool single_vehicle = false;
  bool min_fuel_objective = false;
  std::vector<int> required_targets;  // visited exactly once; others excluded
};

struct ArcModel {
  LinearModel model;
  // variable indices
  std::map<std::tuple<int, int, int>, int> x;  // (vehicle, from, to) -> binary
  std::vector<int> u;                          // per node, -1 where absent
  std::vector<int> q;                          // per node, -1 where absent
  std::vector<int> r;                          // per node, -1 where absent
  std::map<std::pair<int, int>, int> y;        // (vehicle, first node) -> q*x product
  std::vector<int> z;                          // per node visit binary, -1 where absent
  std::vector<int> w;                          // per vehicle usage binary
  int n_vehicles = 0;
};

ArcModel build_Pl(const Scenario& scn, const CostMatrix& cost, const ArcModelOptions& opts = {});

// One vehicle plan read off a MILP solution.
struct VehiclePlan {
  int vehicle = 0;
  std::vector<int> sequence;                    // start depot ... ending depot
  std::vector<std::pair<int, double>> refuels;  // (station node, kg)
};

struct PlanStatus {
  bool ok = false;
  bool broken_flow = false;
  std::vector<VehiclePlan> plans;  // used vehicles only
};

PlanStatus extract_plan(const ArcModel& am, const SolveOutcome& out, const Scenario& scn);

// Largest |dv| change over the arcs refined in both matrices.
double matrix_delta(const CostMatrix& a, const CostMatrix& b,
                    const std::vector<std::pair<int, int>>& arcs);

// Iterative MILP / trajectory-refinement loop.
MissionSolution solve_arc(const Scenario& scn);
MissionSolution solve_arc(const Scenario& scn, CostMatrix& cost);

}  // namespace vrtpp
