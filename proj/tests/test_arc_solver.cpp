#include <cmath>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "vrtpp/arc_solver.hpp"
#include "vrtpp/path_solver.hpp"

using namespace vrtpp;

namespace {

Scenario tiny_scenario(int n_dv, int n_rv, int n_r, int n_t, std::uint64_t seed = 3) {
  Scenario scn = generate_instance(seed, std::max(n_r, 1), n_t);
  scn.sets = build_index_sets(n_dv, n_rv, n_r, n_t);
  if (n_r == 0) scn.stations.clear();
  scn.validate();
  return scn;
}

// forward rocket-equation replay of a finished route
void check_route_masses(const VehicleRoute& rt, const Scenario& scn) {
  REQUIRE(rt.legs.size() + 1 == rt.sequence.size());
  double vex = scn.exhaust_velocity_kms();
  std::vector<double> refuel(scn.sets.n_total(), 0.0);
  for (auto& [node, kg] : rt.refuels) {
    CHECK(kg >= -1e-9);
    refuel[node] += kg;
  }
  double m = rt.legs.front().m0_kg;
  CHECK(m == doctest::Approx(scn.m_dry + rt.initial_propellant_kg +
                             [&] {
                               double p = 0;
                               for (int n : rt.sequence)
                                 if (scn.sets.is_target(n)) p += scn.payload_of(n);
                               return p;
                             }())
                 .epsilon(1e-9));
  for (size_t i = 0; i < rt.legs.size(); ++i) {
    const MissionLeg& leg = rt.legs[i];
    CHECK(leg.m0_kg == doctest::Approx(m).epsilon(1e-9));
    CHECK(leg.m0_kg <= scn.m_max + 1e-6);
    double mf = m * std::exp(-leg.dv_kms / vex);
    CHECK(leg.mf_kg == doctest::Approx(mf).epsilon(1e-9));
    m = mf;
    int next = rt.sequence[i + 1];
    CHECK(m >= scn.m_dry - 1e-6);
    if (scn.sets.is_target(next))
      m -= scn.payload_of(next);
    else if (scn.sets.is_station(next))
      m += refuel[next];
  }
  CHECK(m == doctest::Approx(scn.m_dry).epsilon(1e-9));  // arrives empty
  // chained, ordered times
  double t = 0.0;
  for (const MissionLeg& leg : rt.legs) {
    CHECK(leg.t_dep >= t - 1e-9);
    CHECK(leg.t_tr >= kMinTransferTu - 1e-12);
    t = leg.t_dep + leg.t_tr + scn.service_time(leg.to);
    CHECK(t <= scn.t_max_tu + 1e-9);
  }
}

void check_solution(const MissionSolution& sol, const Scenario& scn) {
  double profit = 0, prop = 0, refuel = 0;
  std::set<int> targets;
  for (const VehicleRoute& rt : sol.routes) {
    check_route_masses(rt, scn);
    profit += rt.profit;
    prop += rt.initial_propellant_kg;
    refuel += rt.refuel_kg;
    for (int n : rt.sequence)
      if (scn.sets.is_target(n)) CHECK(targets.insert(n).second);  // at most once
  }
  CHECK(sol.profit == doctest::Approx(profit).epsilon(1e-12));
  CHECK(sol.initial_propellant_kg == doctest::Approx(prop).epsilon(1e-12));
  CHECK(sol.refuel_kg == doctest::Approx(refuel).epsilon(1e-12));
  CHECK(sol.objective ==
        doctest::Approx(sol.profit - scn.lambda * (prop + refuel)).epsilon(1e-12));
  CHECK(sol.targets_visited == (int)targets.size());
  CHECK((int)sol.routes.size() <= scn.sets.n_dv);
  // per-original-station budgets
  std::vector<double> used(scn.sets.n_r, 0.0);
  for (const VehicleRoute& rt : sol.routes)
    for (auto& [node, kg] : rt.refuels)
      used[scn.sets.orig_station_of(node) - scn.sets.station_begin()] += kg;
  for (double u : used) CHECK(u <= scn.r_max + 1e-6);
}

}  // namespace

TEST_CASE("model census on the one-target graph") {
  Scenario scn = tiny_scenario(1, 1, 0, 1);
  CostMatrix cost = init_cost_matrix(scn);
  ArcModel am = build_Pl(scn, cost);
  // u0, x(0,0,T), x(0,T,1), y(0,T), uT, qT, oT, zT, w0
  CHECK(am.model.vars.size() == 9);
  int bins = 0;
  for (const Var& v : am.model.vars) bins += v.is_binary;
  CHECK(bins == 4);
  // departure, visit, flow, 2x2 big-M mass, q floor, 2 payload, 3 linearization
  CHECK(am.model.rows.size() == 13);
  CHECK(am.x.size() == 2);
  CHECK(am.y.size() == 1);
}

TEST_CASE("census scales with duplicated stations and vehicles") {
  Scenario scn = tiny_scenario(2, 2, 1, 2);
  CostMatrix cost = init_cost_matrix(scn);
  ArcModel am = build_Pl(scn, cost);
  // inner nodes: 2 station copies + 2 targets
  int n_inner = 4, K = 2;
  int n_x = K * (2 * n_inner + n_inner * (n_inner - 1));
  int bins = 0;
  for (const Var& v : am.model.vars) bins += v.is_binary;
  CHECK(bins == n_x + n_inner + K);
  CHECK((int)am.x.size() == n_x);
  // u: K depots + 4 inner; q: 4; r: 2; y: K*4; o: 4; z: 4; w: K
  CHECK((int)am.model.vars.size() ==
        n_x + K + n_inner + n_inner + 2 + K * n_inner + n_inner + n_inner + K);
}

TEST_CASE("pricing variant restricts targets and flips the objective") {
  Scenario scn = tiny_scenario(2, 1, 1, 3);
  CostMatrix cost = init_cost_matrix(scn);
  ArcModelOptions opts;
  opts.single_vehicle = true;
  opts.min_fuel_objective = true;
  opts.required_targets = {scn.sets.target_begin() + 1};
  ArcModel am = build_Pl(scn, cost, opts);
  CHECK(am.n_vehicles == 1);
  // inner nodes: 1 station + 1 admitted target only
  for (const auto& [key, idx] : am.x) {
    auto [k, from, to] = key;
    CHECK(k == 0);
    CHECK(from != scn.sets.target_begin());
    CHECK(to != scn.sets.target_begin() + 2);
  }
  // objective rewards nothing and charges propellant mass
  for (const Var& v : am.model.vars)
    if (v.name == "u_0") CHECK(v.obj == -1.0);
}

TEST_CASE("huge lambda leaves the fleet grounded") {
  Scenario scn = tiny_scenario(1, 2, 1, 2);
  scn.lambda = 1.0;
  MissionSolution sol = solve_arc(scn);
  CHECK(sol.feasible);
  CHECK(sol.routes.empty());
  CHECK(sol.profit == 0.0);
  CHECK(sol.objective == 0.0);
  CHECK(sol.converged);
}

TEST_CASE("single-target mission replays by hand") {
  Scenario scn = tiny_scenario(1, 1, 0, 1);
  MissionSolution sol = solve_arc(scn);
  REQUIRE(sol.feasible);
  REQUIRE(sol.routes.size() == 1);
  const VehicleRoute& rt = sol.routes[0];
  CHECK(rt.sequence == std::vector<int>{0, 2, 1});
  CHECK(sol.profit == doctest::Approx(scn.profit[0]));
  double vex = scn.exhaust_velocity_kms();
  // backward: arrive home dry, climb the rocket equation
  double dep_t = scn.m_dry * std::exp(rt.legs[1].dv_kms / vex);
  double arr_t = dep_t + scn.payload_kg[0];
  double m0 = arr_t * std::exp(rt.legs[0].dv_kms / vex);
  CHECK(rt.legs[1].m0_kg == doctest::Approx(dep_t).epsilon(1e-9));
  CHECK(rt.legs[0].mf_kg == doctest::Approx(arr_t).epsilon(1e-9));
  CHECK(rt.legs[0].m0_kg == doctest::Approx(m0).epsilon(1e-9));
  CHECK(sol.initial_propellant_kg ==
        doctest::Approx(m0 - scn.m_dry - scn.payload_kg[0]).epsilon(1e-9));
  check_solution(sol, scn);
}

TEST_CASE("subtours and split flows are rejected by plan extraction") {
  Scenario scn = tiny_scenario(1, 1, 1, 2);
  CostMatrix cost = init_cost_matrix(scn);
  ArcModel am = build_Pl(scn, cost);
  SolveOutcome out;
  out.status = SolveStatus::Optimal;
  out.x.assign(am.model.vars.size(), 0.0);
  int t0 = scn.sets.target_begin(), t1 = t0 + 1;
  out.x[am.x[{0, t0, t1}]] = 1.0;  // cycle detached from the depot
  out.x[am.x[{0, t1, t0}]] = 1.0;
  PlanStatus ps = extract_plan(am, out, scn);
  CHECK(!ps.ok);
  CHECK(ps.broken_flow);
}

TEST_CASE("matrix delta reads only the listed arcs") {
  CostMatrix a, b;
  a.resize(3);
  b.resize(3);
  a.at(0, 1).dv_kms = 1.0;
  b.at(0, 1).dv_kms = 1.25;
  a.at(1, 2).dv_kms = 4.0;
  b.at(1, 2).dv_kms = 9.0;
  CHECK(matrix_delta(a, b, {{0, 1}}) == doctest::Approx(0.25));
  CHECK(matrix_delta(a, b, {{0, 1}, {1, 2}}) == doctest::Approx(5.0));
  CHECK(matrix_delta(a, b, {}) == 0.0);
}

TEST_CASE("random instances solve with consistent bookkeeping") {
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    Scenario scn = generate_instance(seed, 1, 2);
    scn.sets = build_index_sets(1, 2, 1, 2);
    MissionSolution sol = solve_arc(scn);
    CHECK(sol.iterations >= 1);
    if (sol.feasible) check_solution(sol, scn);
  }
}

TEST_CASE("arc solve is deterministic") {
  Scenario scn = tiny_scenario(1, 2, 1, 2, 7);
  MissionSolution a = solve_arc(scn);
  MissionSolution b = solve_arc(scn);
  CHECK(a.feasible == b.feasible);
  CHECK(a.objective == b.objective);
  CHECK(a.iterations == b.iterations);
  REQUIRE(a.routes.size() == b.routes.size());
  for (size_t i = 0; i < a.routes.size(); ++i) CHECK(a.routes[i].sequence == b.routes[i].sequence);
}

TEST_CASE("solution serialization round-trips the totals") {
  Scenario scn = tiny_scenario(1, 2, 1, 2, 7);
  MissionSolution sol = solve_arc(scn);
  REQUIRE(sol.feasible);

  auto j = nlohmann::json::parse(mission_to_json(sol));
  CHECK(j["method"] == "arc");
  CHECK(j["profit"].get<double>() == doctest::Approx(sol.profit));
  CHECK(j["objective"].get<double>() == doctest::Approx(sol.objective));
  CHECK(j["routes"].size() == sol.routes.size());
  size_t nlegs = 0;
  for (const auto& r : j["routes"]) nlegs += r["legs"].size();

  std::string csv = mission_to_csv(sol);
  CHECK(csv.rfind("vehicle,from,to,t_dep_tu,t_tr_tu,dv_kms,m0_kg,mf_kg\n", 0) == 0);
  size_t lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == 1 + nlegs + 4);  // header + legs + totals block

  std::string text = mission_to_text(sol);
  CHECK(text.find("method arc") != std::string::npos);
  CHECK(text.find("INFEASIBLE") == std::string::npos);
}
