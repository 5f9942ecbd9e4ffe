#pragma once

namespace vrtpp {

// Canonical unit system: distances in DU, times in TU, chosen so that the
// gravitational parameter equals 1.  Conversions to km/s and hours happen
// only at reporting boundaries.
struct CanonicalUnits {
  double mu_e = 3.986e5;  // km^3/s^2
  double du = 42164.0;    // km
  double g0 = 9.81;       // m/s^2

  // TU in seconds, derived so that mu = 1 in canonical units.
  double tu_s() const;
  double tu_hours() const { return tu_s() / 3600.0; }
  // one canonical velocity unit in km/s
  double vu_kms() const { return du / tu_s(); }

  double kms_from_canonical(double v) const { return v * vu_kms(); }
  double canonical_from_kms(double v) const { return v / vu_kms(); }
};

}  // namespace vrtpp
