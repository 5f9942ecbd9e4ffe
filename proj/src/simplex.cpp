#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

#include "vrtpp/linmodel.hpp"

namespace vrtpp {

int LinearModel::add_var(const std::string& name, double lb, double ub, double obj) {
  vars.push_back(Var{name, lb, ub, obj, false});
  return static_cast<int>(vars.size()) - 1;
}

int LinearModel::add_binary(const std::string& name, double obj) {
  vars.push_back(Var{name, 0.0, 1.0, obj, true});
  return static_cast<int>(vars.size()) - 1;
}

void LinearModel::add_row(std::vector<std::pair<int, double>> coeffs, Rel rel, double rhs) {
  rows.push_back(Row{std::move(coeffs), rel, rhs});
}

void LinearModel::validate() const {
  std::set<std::string> names;
  for (const Var& v : vars) {
    if (!names.insert(v.name).second)
      throw std::invalid_argument("duplicate variable name: " + v.name);
    if (v.lb > v.ub) throw std::invalid_argument("empty bound interval on " + v.name);
    if (v.is_binary && (v.lb < 0.0 || v.ub > 1.0))
      throw std::invalid_argument("binary outside [0,1]: " + v.name);
  }
  for (const Row& r : rows)
    for (const auto& [j, c] : r.coeffs) {
      if (j < 0 || j >= static_cast<int>(vars.size()))
        throw std::invalid_argument("row references undeclared variable");
      (void)c;
    }
}

namespace {

constexpr double kFeasTol = 1e-7;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;

enum VStat : unsigned char { kStBasic, kStLower, kStUpper, kStFree };

// Bounded-variable two-phase revised simplex with a dense basis inverse.
// Standard form: A x + s = b with one slack per row, slack bounds from the
// relation (LE: [0,inf), GE: (-inf,0], EQ: [0,0]).
class Simplex {
 public:
  Simplex(const LinearModel& model, const std::vector<double>& lb_over,
          const std::vector<double>& ub_over) {
    m_ = static_cast<int>(model.rows.size());
    n_ = static_cast<int>(model.vars.size());
    ncols_ = n_ + m_;
    cols_.resize(ncols_);
    lb_.resize(ncols_);
    ub_.resize(ncols_);
    cost_.assign(ncols_, 0.0);
    rhs_.resize(m_);

    for (int j = 0; j < n_; ++j) cost_[j] = model.vars[j].obj;
    for (int i = 0; i < m_; ++i) {
      const Row& r = model.rows[i];
      rhs_[i] = r.rhs;
      for (const auto& [j, c] : r.coeffs)
        if (c != 0.0) cols_[j].push_back({i, c});
      int sj = n_ + i;
      cols_[sj].push_back({i, 1.0});
      switch (r.rel) {
        case Rel::LE: lb_[sj] = 0.0; ub_[sj] = kInf; break;
        case Rel::GE: lb_[sj] = -kInf; ub_[sj] = 0.0; break;
        case Rel::EQ: lb_[sj] = 0.0; ub_[sj] = 0.0; break;
      }
    }

    // Geometric-mean equilibration: big-M mass rows sit four orders of
    // magnitude above the profit rows and wreck pivot selection without it.
    // Slack columns keep unit coefficients; their 0/inf bounds are unscaled.
    rs_.assign(m_, 1.0);
    cs_.assign(n_, 1.0);
    for (int pass = 0; pass < 3; ++pass) {
      std::vector<double> rmin(m_, kInf), rmax(m_, 0.0);
      for (int j = 0; j < n_; ++j)
        for (const auto& [i, c] : cols_[j]) {
          double a = std::fabs(c) * rs_[i] * cs_[j];
          rmin[i] = std::min(rmin[i], a);
          rmax[i] = std::max(rmax[i], a);
        }
      for (int i = 0; i < m_; ++i)
        if (rmax[i] > 0.0) rs_[i] /= std::sqrt(rmin[i] * rmax[i]);
      std::vector<double> cmin(n_, kInf), cmax(n_, 0.0);
      for (int j = 0; j < n_; ++j)
        for (const auto& [i, c] : cols_[j]) {
          double a = std::fabs(c) * rs_[i] * cs_[j];
          cmin[j] = std::min(cmin[j], a);
          cmax[j] = std::max(cmax[j], a);
        }
      for (int j = 0; j < n_; ++j)
        if (cmax[j] > 0.0) cs_[j] /= std::sqrt(cmin[j] * cmax[j]);
    }
    for (int j = 0; j < n_; ++j) {
      for (auto& [i, c] : cols_[j]) c *= rs_[i] * cs_[j];
      cost_[j] *= cs_[j];
    }
    for (int i = 0; i < m_; ++i) rhs_[i] *= rs_[i];

    for (int j = 0; j < n_; ++j) {
      lb_[j] = (lb_over.empty() ? model.vars[j].lb : lb_over[j]) / cs_[j];
      ub_[j] = (ub_over.empty() ? model.vars[j].ub : ub_over[j]) / cs_[j];
    }
  }

  // Replace the structural variable bounds, keeping the current basis.  If
  // the previous solve ended optimal the basis stays dual feasible under a
  // bounds-only change, so the next run repairs primal feasibility with dual
  // pivots instead of a phase-1 walk.
  void set_bounds(const std::vector<double>& lb_over, const std::vector<double>& ub_over) {
    for (int j = 0; j < n_; ++j) {
      lb_[j] = lb_over[j] / cs_[j];
      ub_[j] = ub_over[j] / cs_[j];
    }
    if (stat_.empty()) return;
    for (int j = 0; j < n_; ++j) {
      if (stat_[j] == kStBasic) continue;
      if (stat_[j] == kStLower && !std::isfinite(lb_[j]))
        stat_[j] = std::isfinite(ub_[j]) ? kStUpper : kStFree;
      if (stat_[j] == kStUpper && !std::isfinite(ub_[j]))
        stat_[j] = std::isfinite(lb_[j]) ? kStLower : kStFree;
      if (stat_[j] == kStFree && std::isfinite(lb_[j])) stat_[j] = kStLower;
    }
  }

  SolveOutcome run(const SimplexBasis* warm = nullptr, SimplexBasis* basis_out = nullptr) {
    SolveOutcome out;
    for (int j = 0; j < ncols_; ++j) {
      if (lb_[j] > ub_[j] + kFeasTol) {
        out.status = SolveStatus::Infeasible;
        return out;
      }
    }
    bool dual_start = false;
    if (warm) {
      if (!load_basis(*warm)) init_basis();
    } else if (basis_.empty()) {
      init_basis();
    } else {
      compute_xb();  // continue from the previous solve's basis
      dual_start = dual_ok_;
    }
    dual_ok_ = false;

    if (dual_start) {
      int dres = dual_reoptimize();
      if (std::getenv("VRTPP_LP_DEBUG"))
        std::fprintf(stderr, "[lp] dual res %d iters %ld\n", dres, dual_iters_);
      if (dres == 0) {
        dual_ok_ = true;  // dual pivots kept the basis dual feasible
        out.status = SolveStatus::Infeasible;
        return out;
      }
      if (dres < 0) {
        init_basis();  // dual stalled; fall back to a cold primal solve
        dual_start = false;
      }
    }
    if (!dual_start) {
      if (!iterate(/*phase1=*/true)) {
        out.status = SolveStatus::Infeasible;  // numerical stall counts as failure
        return out;
      }
      if (infeasibility() > kFeasTol * (1.0 + rhs_scale())) {
        out.status = SolveStatus::Infeasible;
        return out;
      }
    }
    if (!iterate(/*phase1=*/false)) {
      out.status = SolveStatus::Unbounded;
      return out;
    }
    if (infeasibility() > kFeasTol * (1.0 + rhs_scale())) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    dual_ok_ = true;

    out.status = SolveStatus::Optimal;
    if (basis_out) basis_out->assign(stat_.begin(), stat_.end());
    out.x.assign(n_, 0.0);
    std::vector<double> xs = solution();
    for (int j = 0; j < n_; ++j) out.x[j] = xs[j] * cs_[j];
    out.objective = 0.0;
    for (int j = 0; j < n_; ++j) out.objective += cost_[j] * xs[j];  // c's*x' == c*x
    std::vector<double> y = btran(basic_costs(/*phase1=*/false));
    for (int i = 0; i < m_; ++i) y[i] *= rs_[i];
    out.duals = y;
    out.bound = out.objective;
    return out;
  }

 private:
  int m_ = 0, n_ = 0, ncols_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lb_, ub_, cost_, rhs_;
  std::vector<double> rs_, cs_;  // row/column equilibration factors
  std::vector<int> basis_;
  std::vector<VStat> stat_;
  std::vector<double> binv_;  // m x m row-major
  std::vector<double> xb_;
  int degenerate_run_ = 0;
  int iters_since_refactor_ = 0;  // persists across solves to bound eta drift
  bool dual_ok_ = false;          // basis is dual feasible (last solve optimal)

  double rhs_scale() const {
    double s = 0;
    for (double b : rhs_) s = std::max(s, std::fabs(b));
    return s;
  }

  double nb_value(int j) const {
    switch (stat_[j]) {
      case kStLower: return lb_[j];
      case kStUpper: return ub_[j];
      default: return 0.0;
    }
  }

  // Restore a caller-supplied basis; falls back to the all-slack basis when
  // the statuses are inconsistent or the basis matrix is singular.
  bool load_basis(const SimplexBasis& warm) {
    if (static_cast<int>(warm.size()) != ncols_) return false;
    basis_.clear();
    stat_.assign(ncols_, kStLower);
    for (int j = 0; j < ncols_; ++j) {
      VStat st = static_cast<VStat>(warm[j]);
      if (st == kStBasic) {
        basis_.push_back(j);
        stat_[j] = kStBasic;
        continue;
      }
      if (st == kStLower && !std::isfinite(lb_[j])) st = std::isfinite(ub_[j]) ? kStUpper : kStFree;
      if (st == kStUpper && !std::isfinite(ub_[j])) st = std::isfinite(lb_[j]) ? kStLower : kStFree;
      stat_[j] = st;
    }
    if (static_cast<int>(basis_.size()) != m_) return false;
    if (!refactorize()) return false;
    compute_xb();
    return true;
  }

  void init_basis() {
    stat_.assign(ncols_, kStFree);
    for (int j = 0; j < ncols_; ++j) {
      if (std::isfinite(lb_[j]))
        stat_[j] = kStLower;
      else if (std::isfinite(ub_[j]))
        stat_[j] = kStUpper;
    }
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      stat_[n_ + i] = kStBasic;
    }
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<size_t>(i) * m_ + i] = 1.0;
    iters_since_refactor_ = 0;
    compute_xb();
  }

  void compute_xb() {
    std::vector<double> r = rhs_;
    for (int j = 0; j < ncols_; ++j) {
      if (stat_[j] == kStBasic) continue;
      double v = nb_value(j);
      if (v == 0.0) continue;
      for (const auto& [i, c] : cols_[j]) r[i] -= c * v;
    }
    xb_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double acc = 0;
      const double* row = &binv_[static_cast<size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) acc += row[k] * r[k];
      xb_[i] = acc;
    }
  }

  std::vector<double> ftran(int j) const {
    std::vector<double> w(m_, 0.0);
    for (const auto& [i, c] : cols_[j])
      for (int p = 0; p < m_; ++p) w[p] += binv_[static_cast<size_t>(p) * m_ + i] * c;
    return w;
  }

  std::vector<double> btran(const std::vector<double>& cb) const {
    std::vector<double> y(m_, 0.0);
    for (int p = 0; p < m_; ++p) {
      if (cb[p] == 0.0) continue;
      const double* row = &binv_[static_cast<size_t>(p) * m_];
      for (int i = 0; i < m_; ++i) y[i] += row[i] * cb[p];
    }
    return y;
  }

  double infeasibility() const {
    double f = 0;
    for (int p = 0; p < m_; ++p) {
      int j = basis_[p];
      if (xb_[p] < lb_[j]) f += lb_[j] - xb_[p];
      if (xb_[p] > ub_[j]) f += xb_[p] - ub_[j];
    }
    return f;
  }

  // Phase-1 costs push violated basics back toward their bounds.
  std::vector<double> basic_costs(bool phase1) const {
    std::vector<double> cb(m_, 0.0);
    for (int p = 0; p < m_; ++p) {
      int j = basis_[p];
      if (phase1) {
        if (xb_[p] < lb_[j] - kFeasTol)
          cb[p] = 1.0;
        else if (xb_[p] > ub_[j] + kFeasTol)
          cb[p] = -1.0;
      } else {
        cb[p] = cost_[j];
      }
    }
    return cb;
  }

  bool refactorize() {
    // Gauss-Jordan with partial pivoting on the basis matrix
    std::vector<double> B(static_cast<size_t>(m_) * m_, 0.0);
    for (int p = 0; p < m_; ++p)
      for (const auto& [i, c] : cols_[basis_[p]]) B[static_cast<size_t>(i) * m_ + p] = c;
    std::vector<double> inv(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) inv[static_cast<size_t>(i) * m_ + i] = 1.0;
    for (int c = 0; c < m_; ++c) {
      int piv = c;
      double best = std::fabs(B[static_cast<size_t>(c) * m_ + c]);
      for (int i = c + 1; i < m_; ++i) {
        double v = std::fabs(B[static_cast<size_t>(i) * m_ + c]);
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best < 1e-12) return false;
      if (piv != c)
        for (int k = 0; k < m_; ++k) {
          std::swap(B[static_cast<size_t>(piv) * m_ + k], B[static_cast<size_t>(c) * m_ + k]);
          std::swap(inv[static_cast<size_t>(piv) * m_ + k], inv[static_cast<size_t>(c) * m_ + k]);
        }
      double d = B[static_cast<size_t>(c) * m_ + c];
      for (int k = 0; k < m_; ++k) {
        B[static_cast<size_t>(c) * m_ + k] /= d;
        inv[static_cast<size_t>(c) * m_ + k] /= d;
      }
      for (int i = 0; i < m_; ++i) {
        if (i == c) continue;
        double f = B[static_cast<size_t>(i) * m_ + c];
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          B[static_cast<size_t>(i) * m_ + k] -= f * B[static_cast<size_t>(c) * m_ + k];
          inv[static_cast<size_t>(i) * m_ + k] -= f * inv[static_cast<size_t>(c) * m_ + k];
        }
      }
    }
    binv_ = std::move(inv);
    iters_since_refactor_ = 0;
    return true;
  }

  void update_binv(int leave_pos, const std::vector<double>& w) {
    double piv = w[leave_pos];
    double* prow = &binv_[static_cast<size_t>(leave_pos) * m_];
    for (int k = 0; k < m_; ++k) prow[k] /= piv;
    for (int p = 0; p < m_; ++p) {
      if (p == leave_pos) continue;
      double f = w[p];
      if (f == 0.0) continue;
      double* row = &binv_[static_cast<size_t>(p) * m_];
      for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
    }
  }

  // Dual simplex from a dual-feasible basis after a bound change: the most
  // violated basic leaves toward its bound, the entering column is picked by
  // the dual ratio test.  Returns 1 once primal feasible, 0 on proven
  // infeasibility, -1 when it stalls and the caller should cold start.
  long dual_iters_ = 0;
  std::uint64_t rng_ = 0x9e3779b97f4a7c15ull;  // tie-break noise, fixed seed

  double rng01() {
    rng_ ^= rng_ << 13;
    rng_ ^= rng_ >> 7;
    rng_ ^= rng_ << 17;
    return static_cast<double>(rng_ >> 11) * 0x1.0p-53;
  }

  int dual_reoptimize() {
    const double ftol = kFeasTol * (1.0 + rhs_scale());
    const long max_iters = 10000;

    // The optimal face is heavily degenerate (most reduced costs are exactly
    // zero), so an unperturbed dual simplex cycles with theta = 0 forever.
    // Tiny status-directed cost perturbations make theta generically nonzero;
    // the true-cost primal cleanup in run() removes their effect afterwards.
    std::vector<double> pcost = cost_;
    for (int j = 0; j < ncols_; ++j) {
      double eps = 1e-6 * (1.0 + std::fabs(cost_[j])) * (0.5 + 0.5 * rng01());
      if (stat_[j] == kStLower)
        pcost[j] -= eps;
      else if (stat_[j] == kStUpper)
        pcost[j] += eps;
    }

    // reduced costs, maintained across pivots and refreshed on refactorize
    std::vector<double> d(ncols_, 0.0);
    auto refresh_d = [&] {
      std::vector<double> cb(m_, 0.0);
      for (int p = 0; p < m_; ++p) cb[p] = pcost[basis_[p]];
      std::vector<double> y = btran(cb);
      for (int j = 0; j < ncols_; ++j) {
        if (stat_[j] == kStBasic) {
          d[j] = 0.0;
          continue;
        }
        double dj = pcost[j];
        for (const auto& [i, c] : cols_[j]) dj -= y[i] * c;
        d[j] = dj;
      }
    };
    refresh_d();

    std::vector<double> alpha(ncols_, 0.0);
    bool fresh = true;  // xb/binv recomputed since the last pivot or flip
    auto refresh_all = [&] {
      refactorize();
      iters_since_refactor_ = 0;
      compute_xb();
      refresh_d();
      fresh = true;
    };
    for (long it = 0; it < max_iters; ++it) {
      dual_iters_ = it;
      int rpos = -1;
      double viol = ftol;
      bool above = false;
      for (int p = 0; p < m_; ++p) {
        int bj = basis_[p];
        if (xb_[p] < lb_[bj] - viol) {
          viol = lb_[bj] - xb_[p];
          rpos = p;
          above = false;
        } else if (xb_[p] > ub_[bj] + viol) {
          viol = xb_[p] - ub_[bj];
          rpos = p;
          above = true;
        }
      }
      if (rpos < 0) {  // feasible — but only trust freshly recomputed values
        if (fresh) return 1;
        refresh_all();
        continue;
      }
      if (it > 0 && it % 200 == 0 && std::getenv("VRTPP_LP_DEBUG")) {
        double obj = 0.0;
        std::vector<double> xs = solution();
        for (int j = 0; j < ncols_; ++j) obj += cost_[j] * xs[j];
        std::fprintf(stderr, "[lp]   it %ld rpos %d viol %.3g above %d obj %.6f\n", it, rpos, viol,
                     (int)above, obj);
      }

      const double* rho = &binv_[static_cast<size_t>(rpos) * m_];

      // candidates that push xb[rpos] toward the violated bound: the leaving
      // var goes to lb (below) or ub (above), entering moves in its own
      // allowed direction
      struct Cand {
        int j;
        double ratio, reduce;  // |d|/|alpha|, violation removed by a full flip
      };
      std::vector<Cand> cands;
      for (int j = 0; j < ncols_; ++j) {
        if (stat_[j] == kStBasic || lb_[j] == ub_[j]) {
          alpha[j] = 0.0;
          continue;
        }
        double a = 0.0;
        for (const auto& [i, c] : cols_[j]) a += rho[i] * c;
        alpha[j] = a;
        if (std::fabs(a) < kPivotTol) continue;
        bool incr_ok = stat_[j] == kStLower || stat_[j] == kStFree;
        bool decr_ok = stat_[j] == kStUpper || stat_[j] == kStFree;
        bool fits = above ? ((a > 0 && incr_ok) || (a < 0 && decr_ok))
                          : ((a < 0 && incr_ok) || (a > 0 && decr_ok));
        if (!fits) continue;
        double range = ub_[j] - lb_[j];
        cands.push_back({j, std::fabs(d[j]) / std::fabs(a),
                         std::isfinite(range) ? range * std::fabs(a) : kInf});
      }
      if (cands.empty()) {  // infeasibility certificate, verify before trusting
        if (fresh) return 0;
        refresh_all();
        continue;
      }

      // bound-flipping ratio test: walk candidates by ratio, flipping boxed
      // columns whose whole range still leaves a violation, then pivot on the
      // first that covers the remainder; the single theta update below
      // re-signs the flipped columns' reduced costs
      std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
        if (a.ratio != b.ratio) return a.ratio < b.ratio;
        return a.reduce > b.reduce;
      });
      double remaining = viol;
      size_t pick = 0;
      while (pick + 1 < cands.size() && cands[pick].reduce < remaining - 1e-12) {
        remaining -= cands[pick].reduce;
        ++pick;
      }
      int enter = cands[pick].j;

      std::vector<double> w = ftran(enter);
      if (std::fabs(w[rpos]) < kPivotTol) return -1;  // numerically unusable pivot

      // flip everything before the pivot candidate in one batch
      if (pick > 0) {
        std::vector<double> db(m_, 0.0);
        for (size_t k = 0; k < pick; ++k) {
          int j = cands[k].j;
          double range = ub_[j] - lb_[j];
          double delta = (stat_[j] == kStLower) ? range : -range;
          stat_[j] = (stat_[j] == kStLower) ? kStUpper : kStLower;
          for (const auto& [i, c] : cols_[j]) db[i] += delta * c;
        }
        for (int p = 0; p < m_; ++p) {
          double acc = 0;
          const double* row = &binv_[static_cast<size_t>(p) * m_];
          for (int k = 0; k < m_; ++k) acc += row[k] * db[k];
          xb_[p] -= acc;
        }
      }

      // dual update of reduced costs (perturbed), primal update of basics
      double theta = d[enter] / alpha[enter];
      for (int j = 0; j < ncols_; ++j)
        if (alpha[j] != 0.0 && stat_[j] != kStBasic) d[j] -= theta * alpha[j];
      int leave = basis_[rpos];
      double target = above ? ub_[leave] : lb_[leave];
      double t = (xb_[rpos] - target) / w[rpos];
      for (int p = 0; p < m_; ++p) xb_[p] -= t * w[p];
      xb_[rpos] = nb_value(enter) + t;
      d[leave] = -theta;
      d[enter] = 0.0;

      basis_[rpos] = enter;
      stat_[enter] = kStBasic;
      stat_[leave] = above ? kStUpper : kStLower;
      update_binv(rpos, w);
      fresh = false;
      if (++iters_since_refactor_ >= 300) {
        if (!refactorize()) return -1;
        iters_since_refactor_ = 0;
        compute_xb();
        refresh_d();
        fresh = true;
      }
    }
    return -1;
  }

  // Runs simplex iterations; returns false on phase-2 unboundedness or a
  // numerical stall in phase 1.
  bool iterate(bool phase1) {
    degenerate_run_ = 0;
    const long max_iters = 200000;
    for (long it = 0; it < max_iters; ++it) {
      if (phase1 && infeasibility() <= kFeasTol * (1.0 + rhs_scale())) return true;

      std::vector<double> y = btran(basic_costs(phase1));
      bool bland = degenerate_run_ > 1000;

      int enter = -1, dir = 0;
      double best_score = kDualTol;
      for (int j = 0; j < ncols_; ++j) {
        if (stat_[j] == kStBasic) continue;
        if (lb_[j] == ub_[j]) continue;  // fixed, never enters
        double cj = phase1 ? 0.0 : cost_[j];
        double dj = cj;
        for (const auto& [i, c] : cols_[j]) dj -= y[i] * c;
        int d = 0;
        if (stat_[j] == kStLower && dj > kDualTol) d = +1;
        else if (stat_[j] == kStUpper && dj < -kDualTol) d = -1;
        else if (stat_[j] == kStFree && std::fabs(dj) > kDualTol) d = dj > 0 ? +1 : -1;
        if (d == 0) continue;
        if (bland) {
          enter = j;
          dir = d;
          break;
        }
        double score = std::fabs(dj);
        if (score > best_score) {
          best_score = score;
          enter = j;
          dir = d;
        }
      }
      if (enter < 0) return true;  // optimal for this phase

      std::vector<double> w = ftran(enter);
      // ratio test: entering moves by t*dir, basic p changes at rate -dir*w[p]
      double t_flip = (std::isfinite(lb_[enter]) && std::isfinite(ub_[enter]))
                          ? ub_[enter] - lb_[enter]
                          : kInf;
      double t_min = kInf;
      int leave_pos = -1;
      bool leave_to_upper = false;
      double best_piv = 0.0;
      for (int p = 0; p < m_; ++p) {
        double rate = -dir * w[p];
        if (std::fabs(rate) < kPivotTol) continue;
        int bj = basis_[p];
        double t = kInf;
        bool to_upper = false;
        bool below = xb_[p] < lb_[bj] - kFeasTol;
        bool above = xb_[p] > ub_[bj] + kFeasTol;
        if (rate > 0) {
          // basic increasing: an infeasible-below basic stops at its lb
          // (phase-1 breakpoint); a feasible one is blocked by its ub
          if (phase1 && below)
            t = (lb_[bj] - xb_[p]) / rate, to_upper = false;
          else if (std::isfinite(ub_[bj]) && !above)
            t = (ub_[bj] - xb_[p]) / rate, to_upper = true;
        } else {
          if (phase1 && above)
            t = (ub_[bj] - xb_[p]) / rate, to_upper = true;
          else if (std::isfinite(lb_[bj]) && !below)
            t = (lb_[bj] - xb_[p]) / rate, to_upper = false;
        }
        if (t == kInf) continue;
        t = std::max(t, 0.0);
        bool take = false;
        if (t < t_min - 1e-12) {
          take = true;
        } else if (t <= t_min + 1e-12 && leave_pos >= 0) {
          take = bland ? basis_[p] < basis_[leave_pos] : std::fabs(w[p]) > best_piv;
        }
        if (take) {
          t_min = std::min(t_min, t);
          leave_pos = p;
          leave_to_upper = to_upper;
          best_piv = std::fabs(w[p]);
        }
      }

      double t_step = std::min(t_min, t_flip);
      if (t_step == kInf) {
        return false;  // phase 2: unbounded; phase 1: numerical stall
      }
      degenerate_run_ = (t_step < 1e-10) ? degenerate_run_ + 1 : 0;

      if (t_flip < t_min) leave_pos = -1;  // entering flips, no basis change
      if (leave_pos < 0) {
        // entering flips between its finite bounds
        stat_[enter] = (stat_[enter] == kStLower) ? kStUpper : kStLower;
        compute_xb();
        continue;
      }

      int leave = basis_[leave_pos];
      basis_[leave_pos] = enter;
      stat_[enter] = kStBasic;
      stat_[leave] = leave_to_upper ? kStUpper : kStLower;
      if (!std::isfinite(leave_to_upper ? ub_[leave] : lb_[leave]))
        stat_[leave] = kStFree;
      update_binv(leave_pos, w);
      if (++iters_since_refactor_ >= 300) {
        if (!refactorize()) return false;
        iters_since_refactor_ = 0;
      }
      compute_xb();
    }
    return false;
  }

  std::vector<double> solution() const {
    std::vector<double> x(ncols_, 0.0);
    for (int j = 0; j < ncols_; ++j)
      if (stat_[j] != kStBasic) x[j] = nb_value(j);
    for (int p = 0; p < m_; ++p) x[basis_[p]] = xb_[p];
    return x;
  }
};

}  // namespace

SolveOutcome solve_lp(const LinearModel& m) {
  return Simplex(m, {}, {}).run();
}

struct SimplexEngine::Impl {
  Simplex simplex;
  explicit Impl(const LinearModel& m) : simplex(m, {}, {}) {}
};

SimplexEngine::SimplexEngine(const LinearModel& m) : impl_(std::make_unique<Impl>(m)) {}
SimplexEngine::~SimplexEngine() = default;

SolveOutcome SimplexEngine::solve(const std::vector<double>& lb, const std::vector<double>& ub) {
  impl_->simplex.set_bounds(lb, ub);
  return impl_->simplex.run();
}

SolveOutcome solve_lp_bounded(const LinearModel& m, const std::vector<double>& lb,
                              const std::vector<double>& ub, const SimplexBasis* warm,
                              SimplexBasis* basis_out) {
  return Simplex(m, lb, ub).run(warm, basis_out);
}

std::string lp_format(const LinearModel& m) {
  std::ostringstream os;
  os.precision(12);
  os << "Maximize\n obj:";
  for (size_t j = 0; j < m.vars.size(); ++j) {
    if (m.vars[j].obj == 0.0) continue;
    os << (m.vars[j].obj >= 0 ? " + " : " - ") << std::fabs(m.vars[j].obj) << " "
       << m.vars[j].name;
  }
  os << "\nSubject To\n";
  for (size_t i = 0; i < m.rows.size(); ++i) {
    const Row& r = m.rows[i];
    os << " c" << i << ":";
    for (const auto& [j, c] : r.coeffs)
      os << (c >= 0 ? " + " : " - ") << std::fabs(c) << " " << m.vars[j].name;
    os << (r.rel == Rel::LE ? " <= " : r.rel == Rel::GE ? " >= " : " = ") << r.rhs << "\n";
  }
  os << "Bounds\n";
  for (const Var& v : m.vars) {
    if (v.is_binary) continue;
    if (std::isfinite(v.lb) && std::isfinite(v.ub))
      os << " " << v.lb << " <= " << v.name << " <= " << v.ub << "\n";
    else if (std::isfinite(v.lb))
      os << " " << v.name << " >= " << v.lb << "\n";
    else if (std::isfinite(v.ub))
      os << " -inf <= " << v.name << " <= " << v.ub << "\n";
    else
      os << " " << v.name << " free\n";
  }
  bool any_bin = false;
  for (const Var& v : m.vars) any_bin |= v.is_binary;
  if (any_bin) {
    os << "Binaries\n";
    for (const Var& v : m.vars)
      if (v.is_binary) os << " " << v.name;
    os << "\n";
  }
  os << "End\n";
  return os.str();
}

}  // namespace vrtpp
