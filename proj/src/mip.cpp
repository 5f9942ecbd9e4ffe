#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <queue>

#include "vrtpp/linmodel.hpp"

namespace vrtpp {

namespace {

constexpr double kIntTol = 1e-6;

struct Node {
  double bound = 0.0;
  long id = 0;
  std::vector<std::pair<int, double>> fixings;  // (binary var, fixed value)
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;  // best bound first
    return a.id < b.id;  // then newest first: plateaus are closed depth-first
  }
};

// most-fractional binary, -1 when integral
int pick_branch(const std::vector<double>& x, const std::vector<int>& bins) {
  int best = -1;
  double best_d = kIntTol;
  for (int j : bins) {
    double d = std::fabs(x[j] - std::round(x[j]));
    if (d > best_d + 1e-12) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

void round_binaries(SolveOutcome& r, const std::vector<int>& bins) {
  for (int j : bins) r.x[j] = std::round(r.x[j]);
}

}  // namespace

SolveOutcome solve_mip(const LinearModel& m, double time_limit_s) {
  using Clock = std::chrono::steady_clock;
  auto t0 = Clock::now();
  auto out_of_time = [&] {
    return std::chrono::duration<double>(Clock::now() - t0).count() > time_limit_s;
  };

  std::vector<int> bins;
  for (size_t j = 0; j < m.vars.size(); ++j)
    if (m.vars[j].is_binary) bins.push_back(static_cast<int>(j));

  std::vector<double> lb0(m.vars.size()), ub0(m.vars.size());
  for (size_t j = 0; j < m.vars.size(); ++j) {
    lb0[j] = m.vars[j].lb;
    ub0[j] = m.vars[j].ub;
  }

  const bool debug_entry = std::getenv("VRTPP_MIP_DEBUG") != nullptr;
  if (debug_entry)
    std::fprintf(stderr, "[mip] start vars %zu rows %zu bins %zu limit %.0fs\n", m.vars.size(),
                 m.rows.size(), bins.size(), time_limit_s);
  SimplexEngine engine(m);
  SolveOutcome root = engine.solve(lb0, ub0);
  if (debug_entry)
    std::fprintf(stderr, "[mip] root status %d obj %.6f\n", (int)root.status, root.objective);
  if (root.status != SolveStatus::Optimal) {
    root.duals.clear();
    return root;  // Infeasible or Unbounded
  }
  root.duals.clear();
  if (bins.empty() || pick_branch(root.x, bins) < 0) {
    round_binaries(root, bins);
    root.bound = root.objective;
    return root;
  }

  SolveOutcome incumbent;
  double inc_obj = -kInf;
  const bool debug = std::getenv("VRTPP_MIP_DEBUG") != nullptr;

  // rounding dive: fix toward the relaxation, flip once on infeasibility.
  // Integral binaries are pinned in one shot so a dive costs a handful of
  // solves, not one per variable.
  auto dive = [&](const SolveOutcome& from, std::vector<double> lb, std::vector<double> ub) {
    SolveOutcome cur = from;
    int steps = 0;
    while (cur.status == SolveStatus::Optimal && !out_of_time()) {
      if (cur.objective <= inc_obj + 1e-9) return;
      int j = pick_branch(cur.x, bins);
      if (j < 0) {
        round_binaries(cur, bins);
        if (cur.objective > inc_obj) {
          incumbent = cur;
          inc_obj = cur.objective;
          if (debug) std::fprintf(stderr, "[mip] dive incumbent %.6f\n", inc_obj);
        }
        return;
      }
      std::vector<double> lb_keep = lb, ub_keep = ub;
      for (int b : bins) {
        double d = std::fabs(cur.x[b] - std::round(cur.x[b]));
        if (d <= kIntTol && lb[b] < ub[b]) lb[b] = ub[b] = std::round(cur.x[b]);
      }
      double v = std::round(cur.x[j]);
      lb[j] = ub[j] = v;
      SolveOutcome nxt = engine.solve(lb, ub);
      if (nxt.status != SolveStatus::Optimal) {
        // the mass pinning overshot; retry fixing just the branch variable
        lb = lb_keep;
        ub = ub_keep;
        lb[j] = ub[j] = v;
        nxt = engine.solve(lb, ub);
      }
      if (nxt.status != SolveStatus::Optimal) {
        lb[j] = ub[j] = 1.0 - v;
        nxt = engine.solve(lb, ub);
        if (nxt.status != SolveStatus::Optimal) {
          if (debug) std::fprintf(stderr, "[mip] dive dead end after %d steps\n", steps);
          return;
        }
      }
      ++steps;
      if (debug)
        std::fprintf(stderr, "[mip] dive step %d obj %.6f t %.1fs\n", steps, nxt.objective,
                     std::chrono::duration<double>(Clock::now() - t0).count());
      cur = std::move(nxt);
    }
  };
  dive(root, lb0, ub0);

  long nodes = 0;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  open.push(Node{root.objective, next_id++, {}});
  double best_open_bound = root.objective;
  long since_dive = 0;

  while (!open.empty()) {
    Node nd = open.top();
    best_open_bound = nd.bound;
    if (nd.bound <= inc_obj + 1e-9) break;  // best-first: tree is closed
    if (out_of_time()) {
      if (inc_obj == -kInf) {
        incumbent.status = SolveStatus::Infeasible;
        return incumbent;
      }
      incumbent.status = SolveStatus::FeasibleTimeLimit;
      incumbent.bound = std::max(best_open_bound, inc_obj);
      incumbent.duals.clear();
      return incumbent;
    }
    open.pop();

    std::vector<double> lb = lb0, ub = ub0;
    for (const auto& [j, v] : nd.fixings) lb[j] = ub[j] = v;
    auto ts = Clock::now();
    SolveOutcome r = engine.solve(lb, ub);
    if (debug && std::chrono::duration<double>(Clock::now() - ts).count() > 5.0)
      std::fprintf(stderr, "[mip] slow node %.1fs status %d\n",
                   std::chrono::duration<double>(Clock::now() - ts).count(), (int)r.status);
    if (debug && ++nodes % 200 == 0)
      std::fprintf(stderr, "[mip] nodes %ld open %zu bound %.6f inc %.6f t %.1fs\n", nodes,
                   open.size(), best_open_bound, inc_obj,
                   std::chrono::duration<double>(Clock::now() - t0).count());
    if (r.status != SolveStatus::Optimal) continue;
    if (r.objective <= inc_obj + 1e-9) continue;
    int j = pick_branch(r.x, bins);
    if (j < 0) {
      round_binaries(r, bins);
      incumbent = r;
      inc_obj = r.objective;
      if (debug) std::fprintf(stderr, "[mip] incumbent %.6f\n", inc_obj);
      continue;
    }
    if (++since_dive >= 25) {
      since_dive = 0;
      dive(r, lb, ub);
      if (r.objective <= inc_obj + 1e-9) continue;
    }

    // strong branching: probe the most fractional binaries and branch on the
    // one that actually moves the bound; an infeasible probe direction fixes
    // the variable for free
    bool node_closed = false;
    double down_bound = r.objective, up_bound = r.objective;
    for (int pass = 0; pass < (int)bins.size() && !node_closed; ++pass) {
      struct Cand {
        int j;
        double frac;
      };
      std::vector<Cand> cands;
      for (int b : bins) {
        double f = std::fabs(r.x[b] - std::round(r.x[b]));
        if (f > kIntTol) cands.push_back({b, f});
      }
      std::sort(cands.begin(), cands.end(),
                [](const Cand& a, const Cand& b) { return a.frac > b.frac; });
      if (cands.size() > 4) cands.resize(4);

      bool refixed = false;
      double best_score = -1.0;
      for (const Cand& c : cands) {
        double obj[2];
        bool feas[2];
        for (int v = 0; v < 2; ++v) {
          lb[c.j] = ub[c.j] = v;
          SolveOutcome probe = engine.solve(lb, ub);
          feas[v] = probe.status == SolveStatus::Optimal && probe.objective > inc_obj + 1e-9;
          obj[v] = feas[v] ? probe.objective : -kInf;
          lb[c.j] = 0.0;
          ub[c.j] = 1.0;
        }
        if (!feas[0] && !feas[1]) {
          node_closed = true;
          break;
        }
        if (!feas[0] || !feas[1]) {
          double v = feas[1] ? 1.0 : 0.0;
          lb[c.j] = ub[c.j] = v;
          nd.fixings.push_back({c.j, v});
          r = engine.solve(lb, ub);
          if (r.status != SolveStatus::Optimal || r.objective <= inc_obj + 1e-9) {
            node_closed = true;
            break;
          }
          refixed = true;
          break;  // fractional set changed; re-rank candidates
        }
        double d0 = std::max(r.objective - obj[0], 1e-6);
        double d1 = std::max(r.objective - obj[1], 1e-6);
        if (d0 * d1 > best_score) {
          best_score = d0 * d1;
          j = c.j;
          down_bound = obj[0];
          up_bound = obj[1];
        }
      }
      if (!refixed) break;
      int ji = pick_branch(r.x, bins);
      if (ji < 0) {
        round_binaries(r, bins);
        incumbent = r;
        inc_obj = r.objective;
        if (debug) std::fprintf(stderr, "[mip] incumbent %.6f\n", inc_obj);
        node_closed = true;
      }
      j = ji;
    }
    if (node_closed) continue;

    for (double v : {0.0, 1.0}) {
      Node child;
      child.bound = v == 0.0 ? down_bound : up_bound;
      child.id = next_id++;
      child.fixings = nd.fixings;
      child.fixings.push_back({j, v});
      open.push(std::move(child));
    }
  }

  if (debug)
    std::fprintf(stderr, "[mip] done nodes %ld inc %.6f t %.1fs\n", nodes, inc_obj,
                 std::chrono::duration<double>(Clock::now() - t0).count());
  if (inc_obj == -kInf) {
    incumbent.status = SolveStatus::Infeasible;
    return incumbent;
  }
  incumbent.status = SolveStatus::Optimal;
  incumbent.bound = inc_obj;
  incumbent.duals.clear();
  return incumbent;
}

}  // namespace vrtpp
