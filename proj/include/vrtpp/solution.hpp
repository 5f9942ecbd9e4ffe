#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vrtpp/legs.hpp"
#include "vrtpp/scenario.hpp"

namespace vrtpp {

struct MissionLeg {
  int from = 0, to = 0;
  double t_dep = 0, t_tr = 0, dv_kms = 0, m0_kg = 0, mf_kg = 0;
};

struct VehicleRoute {
  int vehicle = 0;                             // starting depot index
  std::vector<int> sequence;                   // start depot ... ending depot
  std::vector<MissionLeg> legs;                // one per consecutive arc
  std::vector<std::pair<int, double>> refuels; // (station node, kg)
  double profit = 0;
  double initial_propellant_kg = 0;
  double refuel_kg = 0;
};

struct MissionSolution {
  std::string method;
  bool feasible = false;
  bool converged = false;
  int iterations = 0;
  double wall_time_s = 0;
  std::vector<VehicleRoute> routes;
  double profit = 0;
  double initial_propellant_kg = 0;
  double refuel_kg = 0;
  double objective = 0;  // profit - lambda * (initial propellant + refuel)
  int targets_visited = 0;
  int vehicles_used = 0;
};

// Backward mass replay of one route: the vehicle ends empty (m_dry), payloads
// are dropped at targets, refuels added at stations.
struct ReplayResult {
  bool ok = false;
  std::vector<double> arrive;  // per sequence node, arrival mass [kg]
  std::vector<double> depart;  // per sequence node, departure mass [kg]
  double initial_mass = 0;     // mass leaving the depot [kg]
  std::string violation;       // first violated constraint, when !ok
};

ReplayResult replay_route(const std::vector<int>& seq, const std::vector<LegTimes>& legs,
                          const std::vector<double>& refuel_by_node, const Scenario& scn);

// Fills route masses/totals and the solution aggregates from sequences,
// refined legs, and refuel amounts.
void finalize_solution(MissionSolution& sol, const Scenario& scn);

std::string mission_to_json(const MissionSolution& sol);
std::string mission_to_csv(const MissionSolution& sol);
std::string mission_to_text(const MissionSolution& sol);

}  // namespace vrtpp
