#pragma once

#include <string>
#include <vector>

#include "vrtpp/scenario.hpp"

namespace vrtpp {

constexpr double kMinTransferTu = 1e-5;   // lower bound on transfer times
constexpr double kSentinelDvKms = 50.0;   // degenerate-arc placeholder

enum class LegStatus { Optimized, Degenerate, InfeasibleWindow, NoDescent };

struct LegTimes {
  double t_dep = 0.0;
  double t_tr = kMinTransferTu;
  double dv_kms = kSentinelDvKms;
  double mu = 0.0;
  LegStatus status = LegStatus::Degenerate;

  double t_arr_next() const { return t_dep + t_tr; }
};

// Dense per-arc cost table over the duplicated node graph.
struct CostMatrix {
  int n = 0;
  std::vector<LegTimes> legs;  // n*n, row-major (from, to)

  void resize(int n_nodes);
  LegTimes& at(int from, int to) { return legs[from * n + to]; }
  const LegTimes& at(int from, int to) const { return legs[from * n + to]; }
  double mu(int from, int to) const { return legs[from * n + to].mu; }
  double dv(int from, int to) const { return legs[from * n + to].dv_kms; }
};

double hohmann_time(double a_i, double a_j);

// Local minimization of the two-impulse transfer cost over departure and
// transfer time inside the window
//   t_arr_i + t_svc_i <= t_dep <= t_max
//   eps <= t_tr <= t_max
//   t_dep + t_tr <= t_max - t_svc_j
// Single start from the (clipped) guess; a local minimum is acceptable.
LegTimes optimize_leg(const OrbitalElements& el_i, const OrbitalElements& el_j,
                      double t_arr_i, double t_svc_i, double t_svc_j, double t_max,
                      double guess_dep, double guess_tr, const Scenario& scn);

CostMatrix init_cost_matrix(const Scenario& scn);

struct RefineResult {
  bool feasible = false;
  std::vector<LegTimes> legs;  // one per consecutive arc of the sequence
};

// Re-optimizes the legs of a node sequence in order, chaining arrival times
// and warm-starting each leg from the given matrix; updates `warm` in place
// for the refined arcs.
RefineResult refine_sequence(const std::vector<int>& seq, const Scenario& scn, CostMatrix& warm);

struct DvGrid {
  std::vector<double> dep;  // n values
  std::vector<double> tof;  // m values
  std::vector<double> dv;   // n*m, row-major over dep
};

DvGrid dv_grid(const OrbitalElements& el_i, const OrbitalElements& el_j, double dep_lo,
               double dep_hi, double tof_lo, double tof_hi, int n_dep, int n_tof,
               const CanonicalUnits& units);

std::string dv_grid_csv(const DvGrid& grid);

}  // namespace vrtpp
