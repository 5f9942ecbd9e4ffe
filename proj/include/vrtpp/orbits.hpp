#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "vrtpp/units.hpp"

namespace vrtpp {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 unit() const { return *this / norm(); }
};

// Keplerian elements in canonical units (a in DU) and radians.
struct OrbitalElements {
  double a = 1.0;
  double e = 0.0;
  double i = 0.0;
  double raan = 0.0;
  double argp = 0.0;
  double M0 = 0.0;

  double mean_motion() const { return 1.0 / std::sqrt(a * a * a); }
  double period() const { return 2.0 * M_PI / mean_motion(); }
  bool valid() const { return a > 0.0 && e >= 0.0 && e < 1.0 && i >= 0.0 && i <= M_PI; }
};

struct StateVector {
  Vec3 r;
  Vec3 v;
  double t = 0.0;
};

enum class LambertStatus { Ok, GeometryDegenerate, NoConvergence };

struct LambertResult {
  LambertStatus status = LambertStatus::NoConvergence;
  Vec3 v1;
  Vec3 v2;
  bool ok() const { return status == LambertStatus::Ok; }
};

// Solve E - e sin E = M for the eccentric anomaly, Newton with a bisection
// fallback; the result stays in the same 2*pi branch as M.
double solve_kepler(double M, double e);

StateVector propagate(const OrbitalElements& el, double t);

// Single-revolution prograde Lambert solve (mu = 1).  `plane_hint`, when
// given, resolves the transfer plane for near-0/near-pi geometries; without
// a hint those geometries come back GeometryDegenerate.
LambertResult lambert(const Vec3& r1, const Vec3& r2, double tof,
                      std::optional<Vec3> plane_hint = std::nullopt);

// All prograde solutions for the boundary problem: the single-revolution arc
// plus every multi-revolution pair that fits in the flight time.
std::vector<LambertResult> lambert_all(const Vec3& r1, const Vec3& r2, double tof,
                                       std::optional<Vec3> plane_hint = std::nullopt);

// Two-impulse transfer cost in km/s; nullopt when the geometry degenerates.
std::optional<double> transfer_dv(const OrbitalElements& el_i, const OrbitalElements& el_j,
                                  double t_dep, double t_tr, const CanonicalUnits& units);

// Rocket-equation mass ratio, dv in km/s.
double mass_ratio(double dv_kms, double isp_s, double g0_ms2);

}  // namespace vrtpp
