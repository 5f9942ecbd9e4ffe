#include "vrtpp/orbits.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace vrtpp {

double CanonicalUnits::tu_s() const { return std::sqrt(du * du * du / mu_e); }

namespace {

double wrap_2pi(double x) {
  double w = std::fmod(x, 2.0 * M_PI);
  if (w < 0) w += 2.0 * M_PI;
  return w;
}

// Stumpff functions with series expansions near zero.
double stumpff_c(double z) {
  if (std::fabs(z) < 1e-7) return 0.5 - z / 24.0 + z * z / 720.0;
  if (z > 0) {
    double s = std::sqrt(z);
    return (1.0 - std::cos(s)) / z;
  }
  double s = std::sqrt(-z);
  return (std::cosh(s) - 1.0) / (-z);
}

double stumpff_s(double z) {
  if (std::fabs(z) < 1e-7) return 1.0 / 6.0 - z / 120.0 + z * z / 5040.0;
  if (z > 0) {
    double s = std::sqrt(z);
    return (s - std::sin(s)) / (s * s * s);
  }
  double s = std::sqrt(-z);
  return (std::sinh(s) - s) / (s * s * s);
}

}  // namespace

double solve_kepler(double M, double e) {
  if (e < 0.0 || e >= 1.0) throw std::invalid_argument("solve_kepler: e outside [0,1)");
  double branch = std::floor(M / (2.0 * M_PI));
  double m = M - branch * 2.0 * M_PI;  // m in [0, 2pi)

  double E = (e < 0.8) ? m : M_PI;
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    double f = E - e * std::sin(E) - m;
    double fp = 1.0 - e * std::cos(E);
    double d = f / fp;
    E -= d;
    if (std::fabs(d) < 1e-14) {
      converged = true;
      break;
    }
  }
  if (!converged || std::fabs(E - e * std::sin(E) - m) > 1e-12) {
    // bisection fallback on a bracket guaranteed to contain the root
    double lo = m - 1.1 * e - 1e-12, hi = m + 1.1 * e + 1e-12;
    auto g = [&](double x) { return x - e * std::sin(x) - m; };
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (g(mid) > 0)
        hi = mid;
      else
        lo = mid;
    }
    E = 0.5 * (lo + hi);
  }
  return E + branch * 2.0 * M_PI;
}

StateVector propagate(const OrbitalElements& el, double t) {
  double n = el.mean_motion();
  double M = el.M0 + n * t;
  double E = solve_kepler(wrap_2pi(M), el.e);

  double cosE = std::cos(E), sinE = std::sin(E);
  double fac = std::sqrt(1.0 - el.e * el.e);
  // perifocal position/velocity
  double xp = el.a * (cosE - el.e);
  double yp = el.a * fac * sinE;
  double r = el.a * (1.0 - el.e * cosE);
  double vxp = -el.a * el.a * n * sinE / r;
  double vyp = el.a * el.a * n * fac * cosE / r;

  double cO = std::cos(el.raan), sO = std::sin(el.raan);
  double ci = std::cos(el.i), si = std::sin(el.i);
  double cw = std::cos(el.argp), sw = std::sin(el.argp);

  // rotation perifocal -> inertial
  double R[3][2] = {
      {cO * cw - sO * sw * ci, -cO * sw - sO * cw * ci},
      {sO * cw + cO * sw * ci, -sO * sw + cO * cw * ci},
      {sw * si, cw * si},
  };

  StateVector s;
  s.r = {R[0][0] * xp + R[0][1] * yp, R[1][0] * xp + R[1][1] * yp, R[2][0] * xp + R[2][1] * yp};
  s.v = {R[0][0] * vxp + R[0][1] * vyp, R[1][0] * vxp + R[1][1] * vyp,
         R[2][0] * vxp + R[2][1] * vyp};
  s.t = t;
  return s;
}

namespace {

// Universal-variable time of flight at a given z.  Returns false when the
// geometry is invalid there (y < 0 or C <= 0).
bool tof_of_z(double z, double r1n, double r2n, double A, double* tof, double* y_out) {
  double C = stumpff_c(z), S = stumpff_s(z);
  if (C <= 0) return false;
  double y = r1n + r2n + A * (z * S - 1.0) / std::sqrt(C);
  if (y < 0) return false;
  double chi = std::sqrt(y / C);
  *tof = chi * chi * chi * S + A * std::sqrt(y);
  *y_out = y;
  return true;
}

Vec3 rotate_about(const Vec3& v, const Vec3& axis_unit, double ang) {
  double c = std::cos(ang), s = std::sin(ang);
  return v * c + axis_unit.cross(v) * s + axis_unit * (axis_unit.dot(v) * (1.0 - c));
}

struct Geometry {
  bool ok = false;
  bool degenerate = false;
  Vec3 r2_eff;
  double r1n = 0, r2n = 0, A = 0;
};

constexpr double kCrossTol = 1e-9;
constexpr double kAngleNudge = 1e-7;

// Resolve transfer plane and prograde transfer angle; nudges exact 0/pi/2pi
// geometries off the singular angle inside the chosen plane.
Geometry resolve_geometry(const Vec3& r1, const Vec3& r2, double tof,
                          const std::optional<Vec3>& plane_hint) {
  Geometry g;
  g.r1n = r1.norm();
  g.r2n = r2.norm();
  if (g.r1n <= 0 || g.r2n <= 0) return g;

  Vec3 c = r1.cross(r2);
  double cn = c.norm();
  double cosdnu = std::clamp(r1.dot(r2) / (g.r1n * g.r2n), -1.0, 1.0);
  double theta = std::acos(cosdnu);

  Vec3 n;
  double dnu;
  g.r2_eff = r2;
  if (cn > kCrossTol * g.r1n * g.r2n) {
    n = c / cn;
    dnu = theta;
    if (c.z < 0) {  // prograde branch: transfer angular momentum with +z
      n = n * -1.0;
      dnu = 2.0 * M_PI - theta;
    }
  } else {
    if (!plane_hint) {
      g.degenerate = true;
      return g;
    }
    Vec3 hp = *plane_hint - r1 * (plane_hint->dot(r1) / (g.r1n * g.r1n));
    if (hp.norm() < 1e-12) {
      g.degenerate = true;
      return g;
    }
    n = hp.unit();
    if (cosdnu > 0) {
      // coincident endpoints: direct vs full-revolution branch chosen from
      // the flight time against the local circular period
      double a_est = 0.5 * (g.r1n + g.r2n);
      double period_est = 2.0 * M_PI * std::sqrt(a_est * a_est * a_est);
      dnu = (tof > 0.5 * period_est) ? 2.0 * M_PI - kAngleNudge : kAngleNudge;
    } else {
      dnu = M_PI - kAngleNudge;
    }
    g.r2_eff = rotate_about(r1.unit() * g.r2n, n, dnu);
  }
  if (dnu < kAngleNudge) {
    dnu = kAngleNudge;
    g.r2_eff = rotate_about(r1.unit() * g.r2n, n, dnu);
  } else if (dnu > 2.0 * M_PI - kAngleNudge) {
    dnu = 2.0 * M_PI - kAngleNudge;
    g.r2_eff = rotate_about(r1.unit() * g.r2n, n, dnu);
  } else if (std::fabs(dnu - M_PI) < kAngleNudge) {
    dnu = (dnu < M_PI) ? M_PI - kAngleNudge : M_PI + kAngleNudge;
    g.r2_eff = rotate_about(r1.unit() * g.r2n, n, dnu);
  }
  g.A = std::sin(dnu) * std::sqrt(g.r1n * g.r2n / (1.0 - std::cos(dnu)));
  g.ok = true;
  return g;
}

LambertResult velocities_from_y(const Geometry& g, const Vec3& r1, double y) {
  LambertResult res;
  double f = 1.0 - y / g.r1n;
  double gg = g.A * std::sqrt(y);
  double gdot = 1.0 - y / g.r2n;
  if (std::fabs(gg) < 1e-300) {
    res.status = LambertStatus::GeometryDegenerate;
    return res;
  }
  res.v1 = (g.r2_eff - r1 * f) / gg;
  res.v2 = (g.r2_eff * gdot - r1) / gg;
  res.status = LambertStatus::Ok;
  return res;
}

// Bisection for tof(z) = tof on [z_lo, z_hi]; `increasing` gives the slope
// sign on the bracket.  Invalid trial points (y < 0) occur on the A < 0 side
// where y decreases with z.
bool bisect_branch(double z_lo, double z_hi, double tof, const Geometry& g, bool increasing,
                   double* z_out, double* y_out) {
  double t_trial, y_trial;
  double z = 0.5 * (z_lo + z_hi);
  for (int it = 0; it < 160; ++it) {
    z = 0.5 * (z_lo + z_hi);
    if (!tof_of_z(z, g.r1n, g.r2n, g.A, &t_trial, &y_trial)) {
      if (g.A < 0)
        z_hi = z;
      else
        z_lo = z;
      continue;
    }
    bool go_up = increasing ? (t_trial < tof) : (t_trial > tof);
    if (go_up)
      z_lo = z;
    else
      z_hi = z;
  }
  if (!tof_of_z(z, g.r1n, g.r2n, g.A, &t_trial, &y_trial)) return false;
  if (std::fabs(t_trial - tof) > 1e-7 * std::max(1.0, tof)) return false;
  *z_out = z;
  *y_out = y_trial;
  return true;
}

LambertResult solve_single_rev(const Geometry& g, const Vec3& r1, double tof) {
  LambertResult res;
  double z_hi = 4.0 * M_PI * M_PI - 1e-9;
  double z_lo = 0.0;
  double t_trial, y_trial;
  bool found = false;
  double z = 0.0;
  for (int it = 0; it < 64; ++it) {
    if (tof_of_z(z, g.r1n, g.r2n, g.A, &t_trial, &y_trial) && t_trial < tof) {
      found = true;
      break;
    }
    z = (z == 0.0) ? -1.0 : z * 2.0;
    if (z < -1e8) break;
  }
  if (!found) return res;
  z_lo = z;
  double z_sol, y_sol;
  if (!bisect_branch(z_lo, z_hi, tof, g, true, &z_sol, &y_sol)) return res;
  return velocities_from_y(g, r1, y_sol);
}

// N-revolution solutions live on z in (4 N^2 pi^2, 4 (N+1)^2 pi^2) where
// tof(z) is U-shaped with infinite ends; zero, one, or two solutions.
void solve_multi_rev(const Geometry& g, const Vec3& r1, double tof, int revs,
                     std::vector<LambertResult>* out) {
  double zl = 4.0 * revs * revs * M_PI * M_PI;
  double zh = 4.0 * (revs + 1) * (revs + 1) * M_PI * M_PI;
  double pad = 1e-9 * zh;
  zl += pad;
  zh -= pad;

  // golden-section for the tof minimum
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = zl, b = zh;
  double t1, t2, y1, y2;
  auto eval = [&](double z, double* t, double* y) {
    if (!tof_of_z(z, g.r1n, g.r2n, g.A, t, y)) *t = 1e300;
  };
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  eval(x1, &t1, &y1);
  eval(x2, &t2, &y2);
  for (int it = 0; it < 200; ++it) {
    if (t1 < t2) {
      b = x2;
      x2 = x1;
      t2 = t1;
      x1 = b - phi * (b - a);
      eval(x1, &t1, &y1);
    } else {
      a = x1;
      x1 = x2;
      t1 = t2;
      x2 = a + phi * (b - a);
      eval(x2, &t2, &y2);
    }
  }
  double z_min = 0.5 * (a + b), t_min, y_min;
  eval(z_min, &t_min, &y_min);
  if (t_min > tof) return;  // no N-rev solution this slow

  double z_sol, y_sol;
  if (bisect_branch(zl, z_min, tof, g, false, &z_sol, &y_sol)) {
    LambertResult r = velocities_from_y(g, r1, y_sol);
    if (r.ok()) out->push_back(r);
  }
  if (bisect_branch(z_min, zh, tof, g, true, &z_sol, &y_sol)) {
    LambertResult r = velocities_from_y(g, r1, y_sol);
    if (r.ok()) out->push_back(r);
  }
}

}  // namespace

LambertResult lambert(const Vec3& r1, const Vec3& r2, double tof, std::optional<Vec3> plane_hint) {
  LambertResult res;
  if (tof <= 0) return res;
  Geometry g = resolve_geometry(r1, r2, tof, plane_hint);
  if (g.degenerate) {
    res.status = LambertStatus::GeometryDegenerate;
    return res;
  }
  if (!g.ok) return res;
  return solve_single_rev(g, r1, tof);
}

std::vector<LambertResult> lambert_all(const Vec3& r1, const Vec3& r2, double tof,
                                       std::optional<Vec3> plane_hint) {
  std::vector<LambertResult> out;
  if (tof <= 0) return out;
  Geometry g = resolve_geometry(r1, r2, tof, plane_hint);
  if (!g.ok) return out;
  LambertResult single = solve_single_rev(g, r1, tof);
  if (single.ok()) out.push_back(single);
  // revolution counts that can still fit in the flight time
  double a_est = 0.5 * (g.r1n + g.r2n);
  double period_est = 2.0 * M_PI * std::sqrt(a_est * a_est * a_est);
  int max_revs = static_cast<int>(tof / (0.25 * period_est)) + 1;
  for (int n = 1; n <= std::min(max_revs, 32); ++n) {
    size_t before = out.size();
    solve_multi_rev(g, r1, tof, n, &out);
    if (out.size() == before && n * n * 4 * M_PI * M_PI > tof * tof) break;
  }
  return out;
}

std::optional<double> transfer_dv(const OrbitalElements& el_i, const OrbitalElements& el_j,
                                  double t_dep, double t_tr, const CanonicalUnits& units) {
  StateVector dep = propagate(el_i, t_dep);
  StateVector arr = propagate(el_j, t_dep + t_tr);

  // coasting shortcut: the departure orbit may already solve the boundary
  // problem (self-transfers and whole-period phasing legs)
  StateVector coast = propagate(el_i, t_dep + t_tr);
  if ((coast.r - arr.r).norm() < 1e-9 * std::max(1.0, arr.r.norm())) {
    double dv = units.kms_from_canonical((arr.v - coast.v).norm());
    return dv;
  }

  Vec3 h = dep.r.cross(dep.v);
  auto hint = h.norm() > 0 ? std::optional<Vec3>(h.unit()) : std::nullopt;
  std::vector<LambertResult> cands = lambert_all(dep.r, arr.r, t_tr, hint);
  std::optional<double> best;
  for (const LambertResult& lr : cands) {
    double dv = (lr.v1 - dep.v).norm() + (arr.v - lr.v2).norm();
    if (!best || dv < *best) best = dv;
  }
  if (!best) return std::nullopt;
  return units.kms_from_canonical(*best);
}

double mass_ratio(double dv_kms, double isp_s, double g0_ms2) {
  double ve_kms = g0_ms2 * isp_s / 1000.0;
  return std::exp(-dv_kms / ve_kms);
}

}  // namespace vrtpp
