#include "vrtpp/path_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <queue>

#include "vrtpp/arc_solver.hpp"

namespace vrtpp {

namespace {

constexpr double kPriceTol = 1e-7;
constexpr double kMuFloor = 1e-12;

int inner_bit(int node, const NodeSets& s) { return node - s.station_begin(); }

}  // namespace

LinearModel build_master(const std::vector<Column>& cols, const Scenario& scn, bool integer) {
  const NodeSets& s = scn.sets;
  LinearModel m;
  std::vector<std::vector<std::pair<int, double>>> rows(s.n_t + 2 * s.n_r + 1);
  for (size_t c = 0; c < cols.size(); ++c) {
    const Column& col = cols[c];
    int z = integer ? m.add_binary("z_" + std::to_string(c), col.cost(scn.lambda))
                    : m.add_var("z_" + std::to_string(c), 0.0, kInf, col.cost(scn.lambda));
    for (int t : satellites_of(col.omega, s)) rows[s.target_offset(t)].push_back({z, 1.0});
    std::vector<double> visits(s.n_r, 0.0), fuel(s.n_r, 0.0);
    for (int node : col.sequence)
      if (s.is_station(node)) visits[s.orig_station_of(node) - s.station_begin()] += 1.0;
    for (const auto& [node, kg] : col.refuels)
      fuel[s.orig_station_of(node) - s.station_begin()] += kg;
    for (int o = 0; o < s.n_r; ++o) {
      if (visits[o] > 0) rows[s.n_t + o].push_back({z, visits[o]});
      if (fuel[o] > 0) rows[s.n_t + s.n_r + 1 + o].push_back({z, fuel[o]});
    }
    rows[s.n_t + s.n_r].push_back({z, 1.0});
  }
  for (int t = 0; t < s.n_t; ++t) m.add_row(rows[t], Rel::LE, 1.0);
  for (int o = 0; o < s.n_r; ++o) m.add_row(rows[s.n_t + o], Rel::LE, double(s.n_rv));
  m.add_row(rows[s.n_t + s.n_r], Rel::LE, double(s.n_dv));
  for (int o = 0; o < s.n_r; ++o) m.add_row(rows[s.n_t + s.n_r + 1 + o], Rel::LE, scn.r_max);
  return m;
}

MasterDuals master_duals(const SolveOutcome& out, const Scenario& scn) {
  const NodeSets& s = scn.sets;
  MasterDuals d;
  d.w1.assign(s.n_t, 0.0);
  d.w2.assign(s.n_r, 0.0);
  d.w4.assign(s.n_r, 0.0);
  if (out.duals.empty()) return d;
  for (int t = 0; t < s.n_t; ++t) d.w1[t] = out.duals[t];
  for (int o = 0; o < s.n_r; ++o) d.w2[o] = out.duals[s.n_t + o];
  d.w3 = out.duals[s.n_t + s.n_r];
  for (int o = 0; o < s.n_r; ++o) d.w4[o] = out.duals[s.n_t + s.n_r + 1 + o];
  return d;
}

RuleReplay replay_deplete(const std::vector<int>& seq, const std::vector<LegTimes>& legs,
                          const Scenario& scn) {
  const NodeSets& s = scn.sets;
  RuleReplay out;
  if (seq.size() < 2 || legs.size() + 1 != seq.size()) return out;
  std::vector<double> rho(s.n_r, 0.0);
  double u = scn.m_dry;  // arrival mass requirement, walked backward
  double payload = 0.0;
  for (int i = static_cast<int>(seq.size()) - 2; i >= 0; --i) {
    double mu = legs[i].mu;
    if (mu <= kMuFloor || legs[i].status == LegStatus::InfeasibleWindow) return out;
    u /= mu;  // departure mass at seq[i]
    if (u > scn.m_max + 1e-9) return out;
    int node = seq[i];
    if (s.is_target(node)) {
      payload += scn.payload_of(node);
      if (payload > scn.q_max + 1e-9) return out;
      u += scn.payload_of(node);
      if (u > scn.m_max + 1e-9) return out;
    } else if (s.is_station(node)) {
      int o = s.orig_station_of(node) - s.station_begin();
      double r = std::min(scn.r_max - rho[o], u - scn.m_dry - payload);
      if (r < -1e-9) return out;  // below dry+payload even before refueling
      r = std::max(r, 0.0);
      rho[o] += r;
      u -= r;
      out.refuels.push_back({node, r});
      out.refuel += r;
    }
  }
  out.propellant = u - scn.m_dry - payload;
  if (out.propellant < -1e-9) return out;
  out.propellant = std::max(out.propellant, 0.0);
  std::reverse(out.refuels.begin(), out.refuels.end());
  out.ok = true;
  return out;
}

namespace {

struct Label {
  int node = 0;
  double u = 0;    // arrival mass requirement at `node`
  double phi = 0;  // accumulated dual-adjusted profit
  std::uint64_t vis = 0;
  std::vector<int> gamma;  // backward: end depot first
  std::vector<double> rho;
  std::vector<std::pair<int, double>> refuels;
};

struct LabelOrder {
  bool operator()(const Label& a, const Label& b) const {
    if (a.phi != b.phi) return a.phi < b.phi;  // max-phi first
    if (a.u != b.u) return a.u > b.u;
    return a.gamma > b.gamma;
  }
};

bool dominates(const Label& a, const Label& b) {
  if (a.phi < b.phi - 1e-12 || a.u > b.u + 1e-12) return false;
  for (size_t o = 0; o < a.rho.size(); ++o)
    if (a.rho[o] > b.rho[o] + 1e-9) return false;
  return true;
}

}  // namespace

std::optional<PricedRoute> label_search(const Scenario& scn, const CostMatrix& cost,
                                        const MasterDuals& duals,
                                        const std::set<std::uint64_t>& banned) {
  const NodeSets& s = scn.sets;
  const int end = s.end_depot_of(0);

  std::vector<int> inner;
  for (int i = s.station_begin(); i < s.n_total(); ++i) inner.push_back(i);

  auto phi_bound = [&](std::uint64_t vis) {
    double b = 0.0;
    for (int t = s.target_begin(); t < s.target_end(); ++t)
      if (!(vis >> inner_bit(t, s) & 1))
        b += std::max(0.0, scn.profit_of(t) - duals.w1[s.target_offset(t)]);
    return b;
  };

  std::priority_queue<Label, std::vector<Label>, LabelOrder> open;
  std::map<std::pair<int, std::uint64_t>, std::vector<Label>> pareto;
  Label init;
  init.node = end;
  init.u = scn.m_dry;
  init.rho.assign(s.n_r, 0.0);
  init.gamma = {end};
  open.push(init);

  std::optional<PricedRoute> best;
  double best_cbar = 0.0;

  auto try_push = [&](Label&& lbl) {
    auto key = std::make_pair(lbl.node, lbl.vis);
    auto& bucket = pareto[key];
    for (const Label& other : bucket)
      if (dominates(other, lbl)) return;
    bucket.erase(std::remove_if(bucket.begin(), bucket.end(),
                                [&](const Label& other) { return dominates(lbl, other); }),
                 bucket.end());
    bucket.push_back(lbl);
    open.push(std::move(lbl));
  };

  while (!open.empty()) {
    Label lbl = open.top();
    open.pop();
    if (lbl.phi + phi_bound(lbl.vis) - duals.w3 <= best_cbar + kPriceTol) continue;

    double payload = 0.0;
    for (int g : lbl.gamma)
      if (s.is_target(g)) payload += scn.payload_of(g);

    // close the route at the depot
    {
      double mu = cost.mu(0, lbl.node);
      if (mu > kMuFloor) {
        double u0 = lbl.u / mu;
        double mp = u0 - scn.m_dry - payload;
        if (u0 <= scn.m_max + 1e-9 && mp >= -1e-9) {
          double cbar = lbl.phi - scn.lambda * std::max(mp, 0.0) - duals.w3;
          std::uint64_t omega = 0;
          for (int g : lbl.gamma)
            if (s.is_target(g)) omega |= 1ull << s.target_offset(g);
          if (cbar > best_cbar + kPriceTol && !banned.count(omega)) {
            PricedRoute pr;
            pr.sequence = lbl.gamma;
            pr.sequence.push_back(0);
            std::reverse(pr.sequence.begin(), pr.sequence.end());
            pr.refuels.assign(lbl.refuels.rbegin(), lbl.refuels.rend());
            pr.reduced_cost = cbar;
            pr.propellant = std::max(mp, 0.0);
            pr.omega = RouteId{omega};
            best = pr;
            best_cbar = cbar;
          }
        }
      }
    }

    for (int j : inner) {
      if (lbl.vis >> inner_bit(j, s) & 1) continue;
      if (s.is_station(j)) {
        // station copies are consumed highest-index first, never back to back
        if (s.is_station(lbl.node) && s.orig_station_of(lbl.node) == s.orig_station_of(j))
          continue;
        bool canonical = true;
        for (int c : s.station_copies(s.orig_station_of(j)))
          if (c > j && !(lbl.vis >> inner_bit(c, s) & 1)) canonical = false;
        if (!canonical) continue;
      }
      double mu = cost.mu(j, lbl.node);
      if (mu <= kMuFloor) continue;
      Label nxt = lbl;
      nxt.node = j;
      nxt.u = lbl.u / mu;
      if (nxt.u > scn.m_max + 1e-9) continue;
      nxt.vis |= 1ull << inner_bit(j, s);
      nxt.gamma.push_back(j);
      if (s.is_target(j)) {
        if (payload + scn.payload_of(j) > scn.q_max + 1e-9) continue;
        nxt.phi += scn.profit_of(j) - duals.w1[s.target_offset(j)];
        nxt.u += scn.payload_of(j);
        if (nxt.u > scn.m_max + 1e-9) continue;
      } else {
        int o = s.orig_station_of(j) - s.station_begin();
        double r = std::min(scn.r_max - nxt.rho[o], nxt.u - scn.m_dry - payload);
        if (r < -1e-9) continue;
        r = std::max(r, 0.0);
        nxt.rho[o] += r;
        nxt.u -= r;
        nxt.phi -= duals.w2[o] + (scn.lambda + duals.w4[o]) * r;
        nxt.refuels.push_back({j, r});
      }
      try_push(std::move(nxt));
    }
  }
  return best;
}

namespace {

// shared refinement loop: refine `seq`, detect convergence against history
struct RefineLoop {
  std::vector<std::pair<std::vector<int>, CostMatrix>> hist;

  bool step(const std::vector<int>& seq, const Scenario& scn, CostMatrix& cost,
            RefineResult& rr) {
    rr = refine_sequence(seq, scn, cost);
    std::vector<std::pair<int, int>> arcs;
    for (size_t i = 0; i + 1 < seq.size(); ++i) arcs.push_back({seq[i], seq[i + 1]});
    bool conv = false;
    for (const auto& [pseq, psnap] : hist)
      if (pseq == seq && matrix_delta(psnap, cost, arcs) < scn.eps_c_kms) conv = true;
    hist.push_back({seq, cost});
    return conv;
  }
};

Column make_column(const std::vector<int>& seq, const RefineResult& rr, const RuleReplay& rep,
                   const Scenario& scn) {
  Column col;
  col.sequence = seq;
  col.legs = rr.legs;
  col.refuels = rep.refuels;
  col.propellant = rep.propellant;
  col.refuel = rep.refuel;
  std::vector<int> targets;
  for (int n : seq)
    if (scn.sets.is_target(n)) {
      targets.push_back(n);
      col.profit += scn.profit_of(n);
    }
  col.omega = omega_of(targets, scn.sets);
  return col;
}

}  // namespace

std::optional<Column> price_and_refine(const Scenario& scn, CostMatrix& cost,
                                       const MasterDuals& duals, std::set<std::uint64_t>& banned,
                                       double& reduced_cost) {
  reduced_cost = 0.0;
  for (int guard = 0; guard < 1 << 16; ++guard) {
    RefineLoop loop;
    std::optional<PricedRoute> pr;
    bool converged = false;
    RefineResult rr;
    for (int l = 0; l < scn.l_max && !converged; ++l) {
      pr = label_search(scn, cost, duals, banned);
      if (!pr) return std::nullopt;
      converged = loop.step(pr->sequence, scn, cost, rr);
    }
    if (!pr) return std::nullopt;
    RuleReplay rep = rr.feasible ? replay_deplete(pr->sequence, rr.legs, scn) : RuleReplay{};
    if (!rr.feasible || !rep.ok) {
      banned.insert(pr->omega.omega);  // not flyable; price the next route
      continue;
    }
    Column col = make_column(pr->sequence, rr, rep, scn);
    double cbar = -duals.w3 - scn.lambda * rep.propellant;
    for (int t : satellites_of(col.omega, scn.sets))
      cbar += scn.profit_of(t) - duals.w1[scn.sets.target_offset(t)];
    for (const auto& [node, r] : rep.refuels) {
      int o = scn.sets.orig_station_of(node) - scn.sets.station_begin();
      cbar -= duals.w2[o] + (scn.lambda + duals.w4[o]) * r;
    }
    if (cbar <= kPriceTol) return std::nullopt;
    reduced_cost = cbar;
    return col;
  }
  return std::nullopt;
}

std::optional<Column> solve_Pr(const Scenario& scn, RouteId omega, CostMatrix& cost) {
  ArcModelOptions opts;
  opts.single_vehicle = true;
  opts.min_fuel_objective = true;
  opts.required_targets = satellites_of(omega, scn.sets);
  if (opts.required_targets.empty()) return std::nullopt;

  RefineLoop loop;
  std::vector<int> seq;
  RefineResult rr;
  bool converged = false;
  for (int l = 0; l < scn.l_max && !converged; ++l) {
    ArcModel am = build_Pl(scn, cost, opts);
    SolveOutcome out = solve_mip(am.model, scn.milp_time_limit_s);
    if (!out.feasible()) return std::nullopt;
    PlanStatus ps = extract_plan(am, out, scn);
    if (!ps.ok || ps.plans.size() != 1) return std::nullopt;
    seq = ps.plans[0].sequence;
    converged = loop.step(seq, scn, cost, rr);
  }
  if (!rr.feasible) return std::nullopt;
  RuleReplay rep = replay_deplete(seq, rr.legs, scn);
  if (!rep.ok) return std::nullopt;
  return make_column(seq, rr, rep, scn);
}

MissionSolution solve_path(const Scenario& scn) {
  CostMatrix cost = init_cost_matrix(scn);
  return solve_path(scn, cost);
}

MissionSolution solve_path(const Scenario& scn, CostMatrix& cost) {
  using Clock = std::chrono::steady_clock;
  auto t0 = Clock::now();

  MissionSolution sol;
  sol.method = "path";

  std::vector<Column> cols;
  std::set<std::uint64_t> banned;
  bool converged = false;
  const int max_rounds = 1 << std::min(scn.sets.n_t, 20);
  int round = 0;
  for (; round < max_rounds; ++round) {
    MasterDuals duals;
    if (!cols.empty()) {
      SolveOutcome lp = solve_lp(build_master(cols, scn, false));
      if (lp.status != SolveStatus::Optimal) break;
      duals = master_duals(lp, scn);
    } else {
      duals = master_duals(SolveOutcome{}, scn);
    }
    double cbar = 0.0;
    std::optional<Column> col = price_and_refine(scn, cost, duals, banned, cbar);
    if (!col) {
      converged = true;
      break;
    }
    banned.insert(col->omega.omega);
    cols.push_back(std::move(*col));
  }

  sol.iterations = round;
  sol.converged = converged;
  sol.feasible = true;

  std::vector<size_t> chosen;
  if (!cols.empty()) {
    SolveOutcome ip = solve_mip(build_master(cols, scn, true), scn.milp_time_limit_s);
    if (ip.feasible()) {
      for (size_t c = 0; c < cols.size(); ++c)
        if (ip.x[c] > 0.5) chosen.push_back(c);
    } else {
      sol.feasible = false;
    }
  }

  int vehicle = 0;
  for (size_t c : chosen) {
    const Column& col = cols[c];
    VehicleRoute rt;
    rt.vehicle = vehicle;
    rt.sequence = col.sequence;
    rt.sequence.front() = vehicle;
    rt.sequence.back() = scn.sets.end_depot_of(vehicle);
    rt.refuels = col.refuels;
    for (size_t i = 0; i + 1 < rt.sequence.size(); ++i) {
      const LegTimes& t = col.legs[i];
      rt.legs.push_back({rt.sequence[i], rt.sequence[i + 1], t.t_dep, t.t_tr, t.dv_kms});
    }
    sol.routes.push_back(std::move(rt));
    ++vehicle;
  }
  finalize_solution(sol, scn);
  sol.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return sol;
}

}  // namespace vrtpp
