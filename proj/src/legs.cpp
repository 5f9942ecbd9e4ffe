#include "vrtpp/legs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

namespace vrtpp {

void CostMatrix::resize(int n_nodes) {
  n = n_nodes;
  legs.assign(static_cast<size_t>(n) * n, LegTimes{});
}

double hohmann_time(double a_i, double a_j) {
  double a_t = 0.5 * (a_i + a_j);
  return M_PI * std::sqrt(a_t * a_t * a_t);
}

namespace {

struct Window {
  double dep_lo, dep_hi;  // bounds on t_dep
  double tr_lo, tr_hi;    // bounds on t_tr
  double sum_hi;          // t_dep + t_tr <= sum_hi
};

bool window_feasible(const Window& w) {
  return w.dep_lo <= w.dep_hi + 1e-12 && w.tr_lo <= w.tr_hi + 1e-12 &&
         w.dep_lo + w.tr_lo <= w.sum_hi + 1e-12;
}

void project(const Window& w, double& d, double& t) {
  for (int pass = 0; pass < 25; ++pass) {
    d = std::clamp(d, w.dep_lo, w.dep_hi);
    t = std::clamp(t, w.tr_lo, w.tr_hi);
    double excess = d + t - w.sum_hi;
    if (excess <= 0) return;
    d -= 0.5 * excess;
    t -= 0.5 * excess;
  }
  d = std::clamp(d, w.dep_lo, w.dep_hi);
  t = std::clamp(t, w.tr_lo, w.tr_hi);
  if (d + t > w.sum_hi) {
    t = std::max(w.tr_lo, w.sum_hi - d);
    if (d + t > w.sum_hi) d = std::max(w.dep_lo, w.sum_hi - t);
  }
}

struct LegObjective {
  const OrbitalElements& el_i;
  const OrbitalElements& el_j;
  const CanonicalUnits& units;

  double operator()(double d, double t) const {
    if (t < kMinTransferTu) t = kMinTransferTu;
    auto dv = transfer_dv(el_i, el_j, d, t, units);
    return dv ? *dv : kSentinelDvKms;
  }
};

}  // namespace

LegTimes optimize_leg(const OrbitalElements& el_i, const OrbitalElements& el_j, double t_arr_i,
                      double t_svc_i, double t_svc_j, double t_max, double guess_dep,
                      double guess_tr, const Scenario& scn) {
  Window w{t_arr_i + t_svc_i, t_max, kMinTransferTu, t_max, t_max - t_svc_j};
  LegTimes out;
  if (!window_feasible(w)) {
    out.status = LegStatus::InfeasibleWindow;
    return out;
  }

  LegObjective f{el_i, el_j, scn.units};
  double d = guess_dep, t = guess_tr;
  project(w, d, t);
  double fv = f(d, t);

  const double h = 1e-4;
  auto grad = [&](double dd, double tt, double* gd, double* gt) {
    *gd = (f(dd + h, tt) - f(dd - h, tt)) / (2 * h);
    *gt = (f(dd, tt + h) - f(dd, tt - h)) / (2 * h);
  };

  // projected gradient descent with Barzilai-Borwein steps
  double gd, gt;
  grad(d, t, &gd, &gt);
  double step = 0.5;
  double pd = 0, pt = 0, pgd = 0, pgt = 0;
  bool have_prev = false;
  for (int it = 0; it < 120; ++it) {
    if (have_prev) {
      double sd = d - pd, st = t - pt;
      double yd = gd - pgd, yt = gt - pgt;
      double sy = sd * yd + st * yt;
      double ss = sd * sd + st * st;
      step = (sy > 1e-14) ? ss / sy : 0.5;
      step = std::clamp(step, 1e-6, 10.0);
    }
    double nd = d, nt = t;
    double nf = fv;
    bool improved = false;
    double alpha = step;
    for (int ls = 0; ls < 30; ++ls) {
      double cd = d - alpha * gd, ct = t - alpha * gt;
      project(w, cd, ct);
      double cf = f(cd, ct);
      if (cf < fv - 1e-13) {
        nd = cd;
        nt = ct;
        nf = cf;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
    pd = d;
    pt = t;
    pgd = gd;
    pgt = gt;
    d = nd;
    t = nt;
    fv = nf;
    grad(d, t, &gd, &gt);
    have_prev = true;
    // projected-gradient stationarity check
    double qd = d - gd, qt = t - gt;
    project(w, qd, qt);
    if (std::hypot(qd - d, qt - t) < 1e-8) break;
  }

  // compass polish; cheap and robust against finite-difference noise
  for (double s = 0.25; s > 2e-7; s *= 0.5) {
    bool moved = true;
    int guard = 0;
    while (moved && guard++ < 200) {
      moved = false;
      const double dirs[8][2] = {{1, 0}, {-1, 0}, {0, 1},  {0, -1},
                                 {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
      for (const auto& dir : dirs) {
        double cd = d + s * dir[0], ct = t + s * dir[1];
        project(w, cd, ct);
        double cf = f(cd, ct);
        if (cf < fv - 1e-13) {
          d = cd;
          t = ct;
          fv = cf;
          moved = true;
        }
      }
    }
  }

  out.t_dep = d;
  out.t_tr = t;
  out.dv_kms = fv;
  out.mu = mass_ratio(fv, scn.isp_s, scn.units.g0);
  if (fv >= kSentinelDvKms)
    out.status = LegStatus::Degenerate;
  else
    out.status = LegStatus::Optimized;
  return out;
}

namespace {

// Original-node identity behind a duplicated index: the representative node
// index whose elements and service time match.
int representative(const Scenario& scn, int node) {
  const NodeSets& s = scn.sets;
  if (s.is_start_depot(node) || s.is_end_depot(node)) return 0;
  if (s.is_station(node)) return s.orig_station_of(node);
  return node;
}

// a single descent lands in whatever phasing basin the guess sits in, so seed
// from a coarse grid and polish the best few basins.  The landscape is
// near-periodic in departure, so one phasing period of departures and ~1.5
// revolutions of transfer time cover the basins without pushing the whole
// route past the makespan.
LegTimes best_initial_leg(const Scenario& scn, const OrbitalElements& ei,
                          const OrbitalElements& ej, double svc_i, double svc_j) {
  double ni = std::pow(ei.a, -1.5), nj = std::pow(ej.a, -1.5);
  double syn = std::fabs(ni - nj) > 1e-9 ? 2.0 * M_PI / std::fabs(ni - nj) : 2.0 * M_PI;
  double dep_hi = std::min(scn.t_max_tu, svc_i + std::max(2.0 * M_PI, syn));
  double tr_hi = std::min(scn.t_max_tu - svc_j, 10.0);
  struct Seed {
    double f, d, t;
  };
  std::vector<Seed> seeds{{kSentinelDvKms, 0.0, hohmann_time(ei.a, ej.a)}};
  const int nd = 16, nt = 16;
  for (int a = 0; a < nd; ++a)
    for (int b = 0; b < nt; ++b) {
      double d0 = svc_i + (dep_hi - svc_i) * a / (nd - 1);
      double t0 = 0.2 + (tr_hi - 0.2) * b / (nt - 1);
      if (d0 + t0 > scn.t_max_tu - svc_j) continue;
      auto dv = transfer_dv(ei, ej, d0, t0, scn.units);
      if (dv) seeds.push_back({*dv, d0, t0});
    }
  std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.f < b.f; });
  if (seeds.size() > 3) seeds.resize(3);
  // near-ties go to the earlier arrival: cheap legs that eat the whole window
  // starve the rest of the route
  auto better = [](const LegTimes& a, const LegTimes& b) {
    if (a.dv_kms < b.dv_kms - 0.03) return true;
    if (a.dv_kms > b.dv_kms + 0.03) return false;
    return a.t_arr_next() < b.t_arr_next();
  };
  LegTimes leg;
  for (const Seed& sd : seeds) {
    if (sd.f > leg.dv_kms + 0.6) break;  // seeds are sorted; basin can't win
    LegTimes cand = optimize_leg(ei, ej, 0.0, svc_i, svc_j, scn.t_max_tu, sd.d, sd.t, scn);
    if (cand.status == LegStatus::Optimized &&
        (leg.status != LegStatus::Optimized || better(cand, leg)))
      leg = cand;
  }
  if (leg.status == LegStatus::Degenerate)
    leg = optimize_leg(ei, ej, 0.0, svc_i, svc_j, scn.t_max_tu, 0.0, hohmann_time(ei.a, ej.a),
                       scn);
  return leg;
}

}  // namespace

CostMatrix init_cost_matrix(const Scenario& scn) {
  const NodeSets& s = scn.sets;
  CostMatrix m;
  m.resize(s.n_total());

  // one optimization per representative arc, spread across threads
  std::map<std::pair<int, int>, LegTimes> cache;
  std::vector<std::pair<int, int>> jobs;  // (from, to) samples, one per key
  for (int from = 0; from < s.n_total(); ++from) {
    if (s.is_end_depot(from)) continue;  // arcs out of ending depots unused
    for (int to = 0; to < s.n_total(); ++to) {
      if (to == from || s.is_start_depot(to)) continue;
      if (s.is_start_depot(from) && s.is_end_depot(to) && s.end_depot_of(from) != to) continue;
      std::pair<int, int> key{representative(scn, from), representative(scn, to)};
      if (cache.emplace(key, LegTimes{}).second) jobs.push_back({from, to});
    }
  }
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t idx; (idx = next.fetch_add(1)) < jobs.size();) {
      auto [from, to] = jobs[idx];
      LegTimes leg = best_initial_leg(scn, scn.elements_of(from), scn.elements_of(to),
                                      scn.service_time(from), scn.service_time(to));
      cache[{representative(scn, from), representative(scn, to)}] = leg;
    }
  };
  unsigned hw = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  if (hw > 1 && jobs.size() > 1) {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < hw; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  } else {
    work();
  }

  for (int from = 0; from < s.n_total(); ++from) {
    if (s.is_end_depot(from)) continue;
    for (int to = 0; to < s.n_total(); ++to) {
      if (to == from || s.is_start_depot(to)) continue;
      if (s.is_start_depot(from) && s.is_end_depot(to) && s.end_depot_of(from) != to) continue;
      m.at(from, to) = cache[{representative(scn, from), representative(scn, to)}];
    }
  }
  return m;
}


RefineResult refine_sequence(const std::vector<int>& seq, const Scenario& scn, CostMatrix& warm) {
  RefineResult res;
  res.feasible = true;
  double t_arr = 0.0;
  for (size_t k = 0; k + 1 < seq.size(); ++k) {
    int i = seq[k], j = seq[k + 1];
    const LegTimes& g = warm.at(i, j);
    LegTimes leg = optimize_leg(scn.elements_of(i), scn.elements_of(j), t_arr,
                                scn.service_time(i), scn.service_time(j), scn.t_max_tu, g.t_dep,
                                g.t_tr, scn);
    res.legs.push_back(leg);
    if (leg.status == LegStatus::InfeasibleWindow || leg.status == LegStatus::Degenerate) {
      res.feasible = false;
      return res;
    }
    warm.at(i, j) = leg;
    t_arr = leg.t_arr_next();
  }
  return res;
}

DvGrid dv_grid(const OrbitalElements& el_i, const OrbitalElements& el_j, double dep_lo,
               double dep_hi, double tof_lo, double tof_hi, int n_dep, int n_tof,
               const CanonicalUnits& units) {
  DvGrid g;
  g.dep.resize(n_dep);
  g.tof.resize(n_tof);
  g.dv.resize(static_cast<size_t>(n_dep) * n_tof);
  for (int a = 0; a < n_dep; ++a)
    g.dep[a] = dep_lo + (dep_hi - dep_lo) * (n_dep == 1 ? 0.0 : double(a) / (n_dep - 1));
  for (int b = 0; b < n_tof; ++b)
    g.tof[b] = tof_lo + (tof_hi - tof_lo) * (n_tof == 1 ? 0.0 : double(b) / (n_tof - 1));
  for (int a = 0; a < n_dep; ++a)
    for (int b = 0; b < n_tof; ++b) {
      auto dv = transfer_dv(el_i, el_j, g.dep[a], std::max(g.tof[b], kMinTransferTu), units);
      g.dv[static_cast<size_t>(a) * n_tof + b] = dv ? *dv : kSentinelDvKms;
    }
  return g;
}

std::string dv_grid_csv(const DvGrid& grid) {
  std::ostringstream os;
  os << "t_dep_tu,t_tr_tu,dv_kms\n";
  os.precision(6);
  for (size_t a = 0; a < grid.dep.size(); ++a)
    for (size_t b = 0; b < grid.tof.size(); ++b)
      os << grid.dep[a] << "," << grid.tof[b] << "," << grid.dv[a * grid.tof.size() + b] << "\n";
  return os.str();
}

}  // namespace vrtpp
