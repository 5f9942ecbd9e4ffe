#include "vrtpp/arc_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "vrtpp/path_solver.hpp"

namespace vrtpp {

namespace {

std::string vname(const char* base, int a, int b = -1, int c = -1) {
  std::string s = base;
  s += "_" + std::to_string(a);
  if (b >= 0) s += "_" + std::to_string(b);
  if (c >= 0) s += "_" + std::to_string(c);
  return s;
}

}  // namespace

ArcModel build_Pl(const Scenario& scn, const CostMatrix& cost, const ArcModelOptions& opts) {
  const NodeSets& s = scn.sets;
  ArcModel am;
  LinearModel& m = am.model;
  am.n_vehicles = opts.single_vehicle ? 1 : s.n_dv;
  const double mm = scn.m_max, qm = scn.q_max;

  // inner node set: stations plus the admitted targets
  std::vector<int> inner;
  for (int i = s.station_begin(); i < s.station_end(); ++i) inner.push_back(i);
  if (opts.required_targets.empty()) {
    for (int i = s.target_begin(); i < s.target_end(); ++i) inner.push_back(i);
  } else {
    for (int i : opts.required_targets) inner.push_back(i);
  }
  std::sort(inner.begin(), inner.end());

  const double p_coef = opts.min_fuel_objective ? 0.0 : 1.0;
  const double lam = opts.min_fuel_objective ? 1.0 : scn.lambda;
  auto profit_of = [&](int j) { return s.is_target(j) ? p_coef * scn.profit_of(j) : 0.0; };

  // variables
  am.u.assign(s.n_total(), -1);
  am.q.assign(s.n_total(), -1);
  am.r.assign(s.n_total(), -1);
  for (int k = 0; k < am.n_vehicles; ++k) {
    am.u[k] = m.add_var(vname("u", k), 0.0, mm, -lam);
    for (int j : inner) {
      am.x[{k, k, j}] = m.add_binary(vname("x", k, k, j), profit_of(j) + lam * scn.m_dry);
      am.x[{k, j, s.end_depot_of(k)}] = m.add_binary(vname("x", k, j, s.end_depot_of(k)), 0.0);
      am.y[{k, j}] = m.add_var(vname("y", k, j), 0.0, qm, lam);
    }
    for (int i : inner)
      for (int j : inner)
        if (i != j) am.x[{k, i, j}] = m.add_binary(vname("x", k, i, j), profit_of(j));
  }
  for (int i : inner) {
    am.u[i] = m.add_var(vname("u", i), 0.0, mm, 0.0);
    am.q[i] = m.add_var(vname("q", i), 0.0, qm, 0.0);
    if (s.is_station(i)) am.r[i] = m.add_var(vname("r", i), 0.0, scn.r_max, -lam);
  }
  // anti-subtour ordering levels over the inner nodes
  std::vector<int> ord(s.n_total(), -1);
  const double n_inner = static_cast<double>(inner.size());
  for (int i : inner) ord[i] = m.add_var(vname("o", i), 1.0, n_inner, 0.0);
  // aggregate visit / vehicle-usage binaries: branching on "is this node
  // visited at all" moves the relaxation where single arcs cannot
  am.z.assign(s.n_total(), -1);
  for (int i : inner) am.z[i] = m.add_binary(vname("z", i), 0.0);
  am.w.resize(am.n_vehicles);
  for (int k = 0; k < am.n_vehicles; ++k) am.w[k] = m.add_binary(vname("w", k), 0.0);

  auto visit_coeffs = [&](int j) {
    std::vector<std::pair<int, double>> cs;
    for (int k = 0; k < am.n_vehicles; ++k) {
      cs.push_back({am.x[{k, k, j}], 1.0});
      for (int i : inner)
        if (i != j) cs.push_back({am.x[{k, i, j}], 1.0});
    }
    return cs;
  };

  // departure and visit rows, tied to the aggregate binaries
  for (int k = 0; k < am.n_vehicles; ++k) {
    std::vector<std::pair<int, double>> cs;
    for (int j : inner) cs.push_back({am.x[{k, k, j}], 1.0});
    cs.push_back({am.w[k], -1.0});
    m.add_row(cs, Rel::EQ, 0.0);
  }
  for (int j : inner) {
    bool required = s.is_target(j) && !opts.required_targets.empty();
    if (required) m.vars[am.z[j]].lb = 1.0;
    auto cs = visit_coeffs(j);
    cs.push_back({am.z[j], -1.0});
    m.add_row(cs, Rel::EQ, 0.0);
  }
  // flow conservation per vehicle and inner node
  for (int k = 0; k < am.n_vehicles; ++k)
    for (int j : inner) {
      std::vector<std::pair<int, double>> cs{{am.x[{k, k, j}], 1.0},
                                             {am.x[{k, j, s.end_depot_of(k)}], -1.0}};
      for (int i : inner)
        if (i != j) {
          cs.push_back({am.x[{k, i, j}], 1.0});
          cs.push_back({am.x[{k, j, i}], -1.0});
        }
      m.add_row(cs, Rel::EQ, 0.0);
    }

  // big-M rocket rows
  for (int k = 0; k < am.n_vehicles; ++k)
    for (int j : inner) {
      double mu = cost.mu(k, j);
      int x = am.x[{k, k, j}];
      m.add_row({{am.u[j], 1.0}, {am.u[k], -mu}, {x, mm}}, Rel::LE, mm);
      m.add_row({{am.u[j], -1.0}, {am.u[k], mu}, {x, mm}}, Rel::LE, mm);
    }
  for (int i : inner)
    for (int j : inner) {
      if (i == j) continue;
      double mu = cost.mu(i, j);
      std::vector<std::pair<int, double>> fwd{{am.u[j], 1.0}, {am.u[i], -mu}};
      std::vector<std::pair<int, double>> bwd{{am.u[j], -1.0}, {am.u[i], mu}};
      double off = 0.0;
      if (s.is_target(i)) {
        off = mu * scn.payload_of(i);  // payload released before departing i
      } else {
        fwd.push_back({am.r[i], -mu});
        bwd.push_back({am.r[i], mu});
      }
      std::vector<std::pair<int, double>> xs;
      for (int k = 0; k < am.n_vehicles; ++k) xs.push_back({am.x[{k, i, j}], mm});
      fwd.insert(fwd.end(), xs.begin(), xs.end());
      bwd.insert(bwd.end(), xs.begin(), xs.end());
      m.add_row(fwd, Rel::LE, mm - off);
      m.add_row(bwd, Rel::LE, mm + off);
    }
  for (int k = 0; k < am.n_vehicles; ++k)
    for (int i : inner) {
      double mu = cost.mu(i, s.end_depot_of(k));
      int x = am.x[{k, i, s.end_depot_of(k)}];
      std::vector<std::pair<int, double>> fwd{{am.u[i], -mu}, {x, mm}};
      std::vector<std::pair<int, double>> bwd{{am.u[i], mu}, {x, mm}};
      double off = 0.0;
      if (s.is_target(i)) {
        off = mu * scn.payload_of(i);
      } else {
        fwd.push_back({am.r[i], -mu});
        bwd.push_back({am.r[i], mu});
      }
      m.add_row(fwd, Rel::LE, mm - scn.m_dry - off);
      m.add_row(bwd, Rel::LE, mm + scn.m_dry + off);
    }

  // arrival mass floor and station caps
  for (int i : inner) m.add_row({{am.q[i], 1.0}, {am.u[i], -1.0}}, Rel::LE, -scn.m_dry);
  for (int i : inner)
    if (s.is_station(i)) m.add_row({{am.u[i], 1.0}, {am.r[i], 1.0}}, Rel::LE, mm);

  // payload recursion
  for (int k = 0; k < am.n_vehicles; ++k)
    for (int i : inner) {
      int x = am.x[{k, i, s.end_depot_of(k)}];
      double si = s.is_target(i) ? scn.payload_of(i) : 0.0;
      m.add_row({{am.q[i], 1.0}, {x, qm}}, Rel::LE, qm + si);
      m.add_row({{am.q[i], -1.0}, {x, qm}}, Rel::LE, qm - si);
    }
  for (int i : inner)
    for (int j : inner) {
      if (i == j) continue;
      double si = s.is_target(i) ? scn.payload_of(i) : 0.0;
      std::vector<std::pair<int, double>> fwd{{am.q[i], 1.0}, {am.q[j], -1.0}};
      std::vector<std::pair<int, double>> bwd{{am.q[i], -1.0}, {am.q[j], 1.0}};
      for (int k = 0; k < am.n_vehicles; ++k) {
        fwd.push_back({am.x[{k, i, j}], qm});
        bwd.push_back({am.x[{k, i, j}], qm});
      }
      m.add_row(fwd, Rel::LE, qm + si);
      m.add_row(bwd, Rel::LE, qm - si);
    }

  // per-original-station propellant budget
  for (int io = s.station_begin(); io < s.station_begin() + s.n_r; ++io) {
    std::vector<std::pair<int, double>> cs;
    for (int c : s.station_copies(io))
      if (am.r[c] >= 0) cs.push_back({am.r[c], 1.0});
    m.add_row(cs, Rel::LE, scn.r_max);
  }

  // y_kj linearizes q_j * x_kj (first-leg payload credit)
  for (int k = 0; k < am.n_vehicles; ++k)
    for (int j : inner) {
      int y = am.y[{k, j}], x = am.x[{k, k, j}];
      m.add_row({{y, 1.0}, {am.q[j], -1.0}}, Rel::LE, 0.0);
      m.add_row({{y, 1.0}, {x, -qm}}, Rel::LE, 0.0);
      m.add_row({{am.q[j], 1.0}, {y, -1.0}, {x, qm}}, Rel::LE, qm);
    }

  // anti-subtour ordering: inner arcs must increase the level
  for (int i : inner)
    for (int j : inner) {
      if (i == j) continue;
      std::vector<std::pair<int, double>> cs{{ord[i], 1.0}, {ord[j], -1.0}};
      for (int k = 0; k < am.n_vehicles; ++k) cs.push_back({am.x[{k, i, j}], n_inner});
      m.add_row(cs, Rel::LE, n_inner - 1.0);
    }

  // symmetry breaking: vehicle usage ordered, station copies filled in order
  for (int k = 0; k + 1 < am.n_vehicles; ++k) {
    std::vector<std::pair<int, double>> cs;
    for (int j : inner) {
      cs.push_back({am.x[{k, k, j}], 1.0});
      cs.push_back({am.x[{k + 1, k + 1, j}], -1.0});
    }
    m.add_row(cs, Rel::GE, 0.0);
  }
  for (int io = s.station_begin(); io < s.station_begin() + s.n_r; ++io) {
    auto copies = s.station_copies(io);
    for (size_t v = 0; v + 1 < copies.size(); ++v) {
      auto cs = visit_coeffs(copies[v]);
      for (auto [idx, c] : visit_coeffs(copies[v + 1])) cs.push_back({idx, -c});
      m.add_row(cs, Rel::GE, 0.0);
    }
  }

  m.validate();
  return am;
}

PlanStatus extract_plan(const ArcModel& am, const SolveOutcome& out, const Scenario& scn) {
  const NodeSets& s = scn.sets;
  PlanStatus ps;
  std::set<std::tuple<int, int, int>> used;
  for (const auto& [key, idx] : am.x)
    if (out.x[idx] > 0.5) used.insert(key);

  for (int k = 0; k < am.n_vehicles; ++k) {
    std::vector<int> succ(s.n_total(), -1);
    bool any = false;
    for (const auto& [kk, from, to] : used) {
      if (kk != k) continue;
      any = true;
      if (succ[from] >= 0) {
        ps.broken_flow = true;
        return ps;
      }
      succ[from] = to;
    }
    if (!any) continue;
    VehiclePlan plan;
    plan.vehicle = k;
    int cur = k, steps = 0;
    plan.sequence.push_back(cur);
    while (cur != s.end_depot_of(k)) {
      cur = succ[cur];
      if (cur < 0 || ++steps > s.n_total()) {
        ps.broken_flow = true;
        return ps;
      }
      plan.sequence.push_back(cur);
      if (s.is_station(cur) && am.r[cur] >= 0) plan.refuels.push_back({cur, out.x[am.r[cur]]});
    }
    // arcs left over after the walk are subtours
    std::set<std::tuple<int, int, int>> walked;
    for (size_t i = 0; i + 1 < plan.sequence.size(); ++i)
      walked.insert({k, plan.sequence[i], plan.sequence[i + 1]});
    for (const auto& key : used)
      if (std::get<0>(key) == k && !walked.count(key)) {
        ps.broken_flow = true;
        return ps;
      }
    ps.plans.push_back(std::move(plan));
  }
  ps.ok = !ps.broken_flow;
  return ps;
}

double matrix_delta(const CostMatrix& a, const CostMatrix& b,
                    const std::vector<std::pair<int, int>>& arcs) {
  double d = 0.0;
  for (const auto& [i, j] : arcs) d = std::max(d, std::fabs(a.dv(i, j) - b.dv(i, j)));
  return d;
}

MissionSolution solve_arc(const Scenario& scn) {
  CostMatrix cost = init_cost_matrix(scn);
  return solve_arc(scn, cost);
}

MissionSolution solve_arc(const Scenario& scn, CostMatrix& cost) {
  using Clock = std::chrono::steady_clock;
  auto t0 = Clock::now();

  struct Hist {
    std::set<std::tuple<int, int, int>> arcs;
    std::vector<std::pair<int, int>> refined;
    CostMatrix snapshot;
  };
  std::vector<Hist> hist;
  MissionSolution sol;
  sol.method = "arc";
  MissionSolution best;
  best.method = "arc";
  bool converged = false;

  for (int l = 0; l < scn.l_max && !converged; ++l) {
    ArcModel am = build_Pl(scn, cost);
    SolveOutcome out = solve_mip(am.model, scn.milp_time_limit_s);
    if (!out.feasible()) break;

    Hist h;
    for (const auto& [key, idx] : am.x)
      if (out.x[idx] > 0.5) h.arcs.insert(key);
    PlanStatus plan = extract_plan(am, out, scn);
    bool feasible = plan.ok;

    // refine the legs, then re-derive the refueling amounts under the refined
    // costs: the MILP's amounts were chosen against the pre-refinement matrix
    MissionSolution cand;
    cand.method = "arc";
    std::vector<double> station_used(scn.sets.station_begin() + scn.sets.n_r, 0.0);
    for (const auto& vp : plan.plans) {
      RefineResult rr = refine_sequence(vp.sequence, scn, cost);
      for (size_t i = 0; i + 1 < vp.sequence.size(); ++i)
        h.refined.push_back({vp.sequence[i], vp.sequence[i + 1]});
      if (!rr.feasible) {
        feasible = false;
        continue;
      }
      RuleReplay rep = replay_deplete(vp.sequence, rr.legs, scn);
      if (!rep.ok) {
        feasible = false;
        continue;
      }
      VehicleRoute rt;
      rt.vehicle = vp.vehicle;
      rt.sequence = vp.sequence;
      rt.refuels = rep.refuels;
      for (const auto& [node, kg] : rep.refuels)
        station_used[scn.sets.orig_station_of(node)] += kg;
      for (size_t i = 0; i + 1 < vp.sequence.size(); ++i) {
        const LegTimes& t = rr.legs[i];
        rt.legs.push_back({vp.sequence[i], vp.sequence[i + 1], t.t_dep, t.t_tr, t.dv_kms});
      }
      cand.routes.push_back(std::move(rt));
    }
    for (int io = scn.sets.station_begin(); io < scn.sets.station_begin() + scn.sets.n_r; ++io)
      if (station_used[io] > scn.r_max + 1e-6) feasible = false;
    if (feasible) {
      cand.feasible = true;
      finalize_solution(cand, scn);
      if (!best.feasible || cand.objective > best.objective) best = std::move(cand);
    }

    h.snapshot = cost;
    for (const Hist& prev : hist)
      if (prev.arcs == h.arcs &&
          matrix_delta(prev.snapshot, h.snapshot, h.refined) < scn.eps_c_kms) {
        converged = true;
        break;
      }
    hist.push_back(std::move(h));
  }

  if (best.feasible) sol = std::move(best);
  sol.iterations = static_cast<int>(hist.size());
  sol.converged = converged;
  sol.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return sol;
}

}  // namespace vrtpp
