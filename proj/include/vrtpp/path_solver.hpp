#pragma once

#include <optional>
#include <set>
#include <vector>

#include "vrtpp/legs.hpp"
#include "vrtpp/linmodel.hpp"
#include "vrtpp/scenario.hpp"
#include "vrtpp/solution.hpp"

namespace vrtpp {

// One priced-out route: a column of the set-packing master.
struct Column {
  RouteId omega;                                // serviced target set
  std::vector<int> sequence;                    // depot 0 ... end depot
  std::vector<LegTimes> legs;                   // refined, one per arc
  std::vector<std::pair<int, double>> refuels;  // (station node, kg)
  double profit = 0;
  double propellant = 0;  // initial propellant m^p [kg]
  double refuel = 0;      // total refueled [kg]

  double cost(double lambda) const { return profit - lambda * (propellant + refuel); }
};

// Master duals: target rows, station visit rows, the fleet row, capacity rows.
struct MasterDuals {
  std::vector<double> w1;  // per target
  std::vector<double> w2;  // per original station
  double w3 = 0;
  std::vector<double> w4;  // per original station
};

// Row order: n_t target rows, n_r visit rows, 1 fleet row, n_r capacity rows.
LinearModel build_master(const std::vector<Column>& cols, const Scenario& scn, bool integer);
MasterDuals master_duals(const SolveOutcome& out, const Scenario& scn);

// Backward replay along a fixed sequence applying the depletion refueling
// rule: each station tops up the downstream propellant requirement, capped by
// the remaining budget of its original station.
struct RuleReplay {
  bool ok = false;
  double propellant = 0;
  double refuel = 0;
  std::vector<std::pair<int, double>> refuels;
};

RuleReplay replay_deplete(const std::vector<int>& seq, const std::vector<LegTimes>& legs,
                          const Scenario& scn);

// Exact backward labeling over a frozen cost matrix; returns the route with
// the largest positive reduced cost not in `banned`, or nothing.
struct PricedRoute {
  std::vector<int> sequence;
  std::vector<std::pair<int, double>> refuels;
  double reduced_cost = 0;
  double propellant = 0;
  RouteId omega;
};

std::optional<PricedRoute> label_search(const Scenario& scn, const CostMatrix& cost,
                                        const MasterDuals& duals,
                                        const std::set<std::uint64_t>& banned);

// Labeling plus trajectory refinement until the priced route is stable;
// infeasible routes are added to `banned`. Returns the column and its true
// reduced cost under the refined legs.
std::optional<Column> price_and_refine(const Scenario& scn, CostMatrix& cost,
                                       const MasterDuals& duals, std::set<std::uint64_t>& banned,
                                       double& reduced_cost);

// Minimum-propellant route for a fixed target set (single-vehicle MILP with
// the same refinement loop).
std::optional<Column> solve_Pr(const Scenario& scn, RouteId omega, CostMatrix& cost);

// Column generation with a final integer master.
MissionSolution solve_path(const Scenario& scn);
MissionSolution solve_path(const Scenario& scn, CostMatrix& cost);

}  // namespace vrtpp
