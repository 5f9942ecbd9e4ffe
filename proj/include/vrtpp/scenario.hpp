#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrtpp/orbits.hpp"
#include "vrtpp/units.hpp"

namespace vrtpp {

// Node index algebra over the duplicated graph:
//   [0, n_dv)                         starting depots
//   [n_dv, 2 n_dv)                    ending depots
//   [2 n_dv, 2 n_dv + n_r)            original refueling stations
//   [..., 2 n_dv + n_r n_rv)          virtual refueling stations
//   [..., 2 n_dv + n_r n_rv + n_t)    target satellites
struct NodeSets {
  int n_dv = 1, n_rv = 1, n_r = 0, n_t = 1;

  int n_total() const { return 2 * n_dv + n_r * n_rv + n_t; }
  int start_depot_begin() const { return 0; }
  int start_depot_end() const { return n_dv; }
  int end_depot_begin() const { return n_dv; }
  int end_depot_end() const { return 2 * n_dv; }
  int station_begin() const { return 2 * n_dv; }
  int station_end() const { return 2 * n_dv + n_r * n_rv; }
  int target_begin() const { return 2 * n_dv + n_r * n_rv; }
  int target_end() const { return n_total(); }

  bool is_start_depot(int i) const { return i >= 0 && i < n_dv; }
  bool is_end_depot(int i) const { return i >= n_dv && i < 2 * n_dv; }
  bool is_station(int i) const { return i >= station_begin() && i < station_end(); }
  bool is_target(int i) const { return i >= target_begin() && i < target_end(); }

  int end_depot_of(int k) const { return k + n_dv; }
  // original-station index of any duplicated station index
  int orig_station_of(int j) const { return (j - 2 * n_dv) % n_r + 2 * n_dv; }
  // members of S_R,i for an original station i: i, i+n_r, ..., i+(n_rv-1)n_r
  std::vector<int> station_copies(int i_orig) const {
    std::vector<int> out;
    for (int v = 0; v < n_rv; ++v) out.push_back(i_orig + v * n_r);
    return out;
  }
  // 0-based offset of a target node within S_T
  int target_offset(int i) const { return i - target_begin(); }
};

NodeSets build_index_sets(int n_dv, int n_rv, int n_r, int n_t);

// Route id: bit j set <=> target (target_begin + j) is serviced.
struct RouteId {
  std::uint64_t omega = 0;
};

std::vector<int> satellites_of(RouteId omega, const NodeSets& sets);
RouteId omega_of(const std::vector<int>& targets, const NodeSets& sets);

struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

struct Scenario {
  CanonicalUnits units;
  NodeSets sets;

  OrbitalElements depot;
  std::vector<OrbitalElements> stations;  // n_r originals
  std::vector<OrbitalElements> targets;   // n_t
  std::vector<double> payload_kg;         // per target
  std::vector<double> profit;             // per target

  double isp_s = 320.0;
  double m_dry = 500.0;
  double m_max = 2000.0;
  double q_max = 200.0;
  double r_max = 1000.0;     // per original station
  double t_svc_tu = 0.0;     // servicing/refueling time, same at every node
  double lambda = 0.0005;    // 1/kg
  double t_max_tu = 100.0;
  int l_max = 20;
  double eps_c_kms = 0.01;
  double milp_time_limit_s = 100.0;

  // elements of the original node behind any duplicated index
  const OrbitalElements& elements_of(int node) const;
  double service_time(int node) const {
    return (sets.is_start_depot(node) || sets.is_end_depot(node)) ? 0.0 : t_svc_tu;
  }
  double payload_of(int target_node) const { return payload_kg[sets.target_offset(target_node)]; }
  double profit_of(int target_node) const { return profit[sets.target_offset(target_node)]; }
  double total_profit() const;
  double exhaust_velocity_kms() const { return units.g0 * isp_s / 1000.0; }

  void validate() const;  // throws SchemaError on invariant violations
};

Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

// Case-study instance (depot, two stations, five GEO targets).
Scenario case_study_scenario();

// Random instance per the experiment protocol: GEO semimajor axes,
// e ~ U[0, 0.01], i ~ U[0, 30 deg], angles U[0, 360); payloads U[50, 100),
// profits uniform over {1, 2, 3}; depot copied from the case study.
Scenario generate_instance(std::uint64_t seed, int n_r, int n_t);

}  // namespace vrtpp
