#include "vrtpp/solution.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace vrtpp {

namespace {

constexpr double kMassTol = 1e-6;  // kg

std::string node_name(int i, const NodeSets& s) {
  std::ostringstream os;
  if (s.is_start_depot(i))
    os << "D" << i;
  else if (s.is_end_depot(i))
    os << "D" << (i - s.n_dv) << "'";
  else if (s.is_station(i))
    os << "R" << (s.orig_station_of(i) - s.station_begin()) << "."
       << (i - s.station_begin()) / s.n_r;
  else
    os << "T" << s.target_offset(i);
  return os.str();
}

}  // namespace

ReplayResult replay_route(const std::vector<int>& seq, const std::vector<LegTimes>& legs,
                          const std::vector<double>& refuel_by_node, const Scenario& scn) {
  ReplayResult out;
  const int n = static_cast<int>(seq.size());
  if (n < 2 || legs.size() + 1 != seq.size()) {
    out.violation = "malformed route";
    return out;
  }
  out.arrive.assign(n, 0.0);
  out.depart.assign(n, 0.0);
  out.arrive[n - 1] = out.depart[n - 1] = scn.m_dry;

  // payload still onboard when arriving at seq[i]
  std::vector<double> onboard(n, 0.0);
  for (int i = n - 2; i >= 0; --i)
    onboard[i] = onboard[i + 1] + (scn.sets.is_target(seq[i]) ? scn.payload_of(seq[i]) : 0.0);

  out.ok = true;
  for (int i = n - 2; i >= 0; --i) {
    const LegTimes& leg = legs[i];
    if (!(leg.mu > 0.0) || leg.status == LegStatus::InfeasibleWindow) {
      out.ok = false;
      out.violation = "unusable leg " + node_name(seq[i], scn.sets);
      return out;
    }
    out.depart[i] = out.arrive[i + 1] / leg.mu;
    const int node = seq[i];
    if (scn.sets.is_target(node))
      out.arrive[i] = out.depart[i] + scn.payload_of(node);
    else if (scn.sets.is_station(node))
      out.arrive[i] = out.depart[i] - refuel_by_node[node];
    else
      out.arrive[i] = out.depart[i];
  }
  out.initial_mass = out.arrive[0];

  for (int i = 0; i < n && out.ok; ++i) {
    const int node = seq[i];
    if (out.depart[i] > scn.m_max + kMassTol) {
      out.ok = false;
      out.violation = "mass cap at " + node_name(node, scn.sets);
    } else if (out.arrive[i] < scn.m_dry + onboard[i] - kMassTol) {
      out.ok = false;
      out.violation = "propellant depleted before " + node_name(node, scn.sets);
    } else if (scn.sets.is_station(node) && refuel_by_node[node] < -kMassTol) {
      out.ok = false;
      out.violation = "negative refuel at " + node_name(node, scn.sets);
    }
  }
  return out;
}

void finalize_solution(MissionSolution& sol, const Scenario& scn) {
  sol.profit = sol.initial_propellant_kg = sol.refuel_kg = 0.0;
  sol.targets_visited = 0;
  sol.vehicles_used = static_cast<int>(sol.routes.size());
  for (auto& rt : sol.routes) {
    std::vector<double> refuel(scn.sets.n_total(), 0.0);
    rt.refuel_kg = 0.0;
    for (const auto& [node, kg] : rt.refuels) {
      refuel[node] += kg;
      rt.refuel_kg += kg;
    }
    std::vector<LegTimes> legs;
    for (auto& leg : rt.legs) {
      LegTimes t;
      t.t_dep = leg.t_dep;
      t.t_tr = leg.t_tr;
      t.dv_kms = leg.dv_kms;
      t.mu = mass_ratio(leg.dv_kms, scn.isp_s, scn.units.g0);
      t.status = LegStatus::Optimized;
      legs.push_back(t);
    }
    ReplayResult rep = replay_route(rt.sequence, legs, refuel, scn);
    double payload = 0.0;
    rt.profit = 0.0;
    for (int node : rt.sequence)
      if (scn.sets.is_target(node)) {
        rt.profit += scn.profit_of(node);
        payload += scn.payload_of(node);
        ++sol.targets_visited;
      }
    rt.initial_propellant_kg = rep.initial_mass - scn.m_dry - payload;
    for (size_t i = 0; i < rt.legs.size(); ++i) {
      rt.legs[i].m0_kg = rep.depart[i];
      rt.legs[i].mf_kg = rep.arrive[i + 1];
    }
    sol.profit += rt.profit;
    sol.initial_propellant_kg += rt.initial_propellant_kg;
    sol.refuel_kg += rt.refuel_kg;
  }
  sol.objective = sol.profit - scn.lambda * (sol.initial_propellant_kg + sol.refuel_kg);
}

std::string mission_to_json(const MissionSolution& sol) {
  nlohmann::json j;
  j["method"] = sol.method;
  j["feasible"] = sol.feasible;
  j["converged"] = sol.converged;
  j["iterations"] = sol.iterations;
  j["wall_time_s"] = sol.wall_time_s;
  j["profit"] = sol.profit;
  j["initial_propellant_kg"] = sol.initial_propellant_kg;
  j["refuel_kg"] = sol.refuel_kg;
  j["objective"] = sol.objective;
  j["targets_visited"] = sol.targets_visited;
  j["vehicles_used"] = sol.vehicles_used;
  j["routes"] = nlohmann::json::array();
  for (const auto& rt : sol.routes) {
    nlohmann::json r;
    r["vehicle"] = rt.vehicle;
    r["sequence"] = rt.sequence;
    r["profit"] = rt.profit;
    r["initial_propellant_kg"] = rt.initial_propellant_kg;
    r["refuel_kg"] = rt.refuel_kg;
    r["refuels"] = nlohmann::json::array();
    for (const auto& [node, kg] : rt.refuels) r["refuels"].push_back({{"node", node}, {"kg", kg}});
    r["legs"] = nlohmann::json::array();
    for (const auto& leg : rt.legs)
      r["legs"].push_back({{"from", leg.from},
                           {"to", leg.to},
                           {"t_dep_tu", leg.t_dep},
                           {"t_tr_tu", leg.t_tr},
                           {"dv_kms", leg.dv_kms},
                           {"m0_kg", leg.m0_kg},
                           {"mf_kg", leg.mf_kg}});
    j["routes"].push_back(std::move(r));
  }
  return j.dump(2);
}

std::string mission_to_csv(const MissionSolution& sol) {
  std::ostringstream os;
  os << "vehicle,from,to,t_dep_tu,t_tr_tu,dv_kms,m0_kg,mf_kg\n";
  os.setf(std::ios::fixed);
  for (const auto& rt : sol.routes)
    for (const auto& leg : rt.legs) {
      os.precision(4);
      os << rt.vehicle << ',' << leg.from << ',' << leg.to << ',' << leg.t_dep << ','
         << leg.t_tr << ',' << leg.dv_kms << ',';
      os.precision(2);
      os << leg.m0_kg << ',' << leg.mf_kg << '\n';
    }
  os.precision(4);
  os << "total,profit,," << sol.profit << ",,,,\n";
  os << "total,initial_propellant_kg,," << sol.initial_propellant_kg << ",,,,\n";
  os << "total,refuel_kg,," << sol.refuel_kg << ",,,,\n";
  os << "total,objective,," << sol.objective << ",,,,\n";
  return os.str();
}

std::string mission_to_text(const MissionSolution& sol) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "method " << sol.method << (sol.feasible ? "" : "  INFEASIBLE")
     << (sol.converged ? "" : "  (not converged)") << "\n";
  os << "profit " << sol.profit << "  objective " << sol.objective << "\n";
  os.precision(2);
  os << "initial propellant " << sol.initial_propellant_kg << " kg  refuel " << sol.refuel_kg
     << " kg  wall " << sol.wall_time_s << " s\n";
  for (const auto& rt : sol.routes) {
    os << "vehicle " << rt.vehicle << ":";
    for (int node : rt.sequence) os << " " << node;
    os.precision(2);
    os << "  (propellant " << rt.initial_propellant_kg << " kg, refuel " << rt.refuel_kg
       << " kg, profit " << rt.profit << ")\n";
    os << "  from    to   t_dep    t_tr      dv        m0        mf\n";
    for (const auto& leg : rt.legs) {
      auto cell = [&](double v, int prec, int w) {
        os.precision(prec);
        os.width(w);
        os << v;
      };
      os.width(6);
      os << leg.from;
      os.width(6);
      os << leg.to;
      cell(leg.t_dep, 2, 8);
      cell(leg.t_tr, 2, 8);
      cell(leg.dv_kms, 4, 8);
      cell(leg.m0_kg, 2, 10);
      cell(leg.mf_kg, 2, 10);
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace vrtpp
