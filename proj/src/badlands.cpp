#include "qreflect/badlands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qreflect/constants.hpp"
#include "qreflect/error.hpp"

namespace qreflect {

MomentumJet local_momentum(const PotentialModel& U, const BeamSpec& beam, double z) {
  const PotentialJet u = U.jet(z);
  const double m = beam.mass;
  const double kinetic = beam.energy() - u[0];
  if (!(kinetic > 0.0)) {
    std::ostringstream msg;
    msg << "classically forbidden at z=" << z << " (E - U = " << kinetic << " J)";
    throw Error(ErrorKind::ClassicallyForbidden, msg.str());
  }
  MomentumJet j;
  j.p = std::sqrt(2.0 * m * kinetic);
  const double p = j.p, p3 = p * p * p, p5 = p3 * p * p;
  j.dp = -m * u[1] / p;
  j.d2p = -m * m * u[1] * u[1] / p3 - m * u[2] / p;
  j.d3p = -3.0 * m * m * m * u[1] * u[1] * u[1] / p5 - 3.0 * m * m * u[1] * u[2] / p3 - m * u[3] / p;
  return j;
}

double badlands_B(const PotentialModel& U, const BeamSpec& beam, double z) {
  const MomentumJet j = local_momentum(U, beam, z);
  const double p2 = j.p * j.p;
  const double hbar2 = constants::hbar * constants::hbar;
  return hbar2 * (0.75 * j.dp * j.dp / (p2 * p2) - 0.5 * j.d2p / (p2 * j.p));
}

double badlands_abs_derivative(const PotentialModel& U, const BeamSpec& beam, double z) {
  const MomentumJet j = local_momentum(U, beam, z);
  const double p = j.p, p3 = p * p * p, p4 = p3 * p, p5 = p4 * p;
  const double hbar2 = constants::hbar * constants::hbar;
  const double dB = hbar2 * (3.0 * j.dp * j.d2p / p4 - 3.0 * j.dp * j.dp * j.dp / p5 - 0.5 * j.d3p / p3);
  const double B = hbar2 * (0.75 * j.dp * j.dp / p4 - 0.5 * j.d2p / p3);
  return B < 0.0 ? -dB : dB;
}

std::string_view to_string(ReflectionMethod method) {
  switch (method) {
    case ReflectionMethod::ClosedFormGeneral: return "closed-form-general";
    case ReflectionMethod::ClosedFormSpecial: return "closed-form-special";
    case ReflectionMethod::NumericMax: return "numeric-max";
  }
  return "unknown";
}

ReflectionPoint reflection_point_numeric(const PotentialModel& U, const BeamSpec& beam, double z_lo,
                                         double z_hi, const ToleranceSpec& tol) {
  ReflectionPoint out;
  out.method = ReflectionMethod::NumericMax;
  try {
    const auto max = maximize_scalar([&](double z) { return std::abs(badlands_B(U, beam, z)); }, z_lo,
                                     z_hi, tol);
    if (!(max.value > 0.0)) return out;
    out.z_r = max.x;
    out.B_at_max = max.value;
    out.exists = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoInteriorMaximum) throw;
  }
  return out;
}

ReflectionPoint reflection_point_powerlaw(int n, double lambda, double U0, const BeamSpec& beam,
                                          bool cross_check) {
  if (n == 0 || lambda == 0.0)
    throw Error(ErrorKind::InvalidArgument, "power-law reflection point needs n != 0 and lambda != 0");
  const double excess = beam.energy() - U0;
  if (!(excess > 0.0))
    throw Error(ErrorKind::ClassicallyForbidden, "power-law reflection point needs E > U0");

  const auto U = PotentialModel::power_law(lambda, n, U0);
  const double zc_n = excess / lambda;
  const double dn = n;

  std::vector<double> roots;
  ReflectionMethod method = ReflectionMethod::ClosedFormGeneral;
  if (n == -2 || n == -4) {
    method = ReflectionMethod::ClosedFormSpecial;
    roots.push_back(-2.0 * (dn - 2.0) / (5.0 * dn + 8.0) * zc_n);
  } else {
    const double disc = 3.0 * (dn - 1.0) * (7.0 * dn + 13.0);
    if (disc >= 0.0) {
      const double b = -(dn - 1.0) * (5.0 * dn + 8.0);
      const double s = dn * std::sqrt(disc);
      const double den = (dn + 4.0) * (dn + 2.0);
      roots.push_back((b + s) / den * zc_n);
      roots.push_back((b - s) / den * zc_n);
    }
  }

  ReflectionPoint best;
  best.method = method;
  for (double t : roots) {
    if (!(t > 0.0) || !std::isfinite(t)) continue;
    const double z = std::pow(t, 1.0 / dn);
    if (!(z > 0.0) || !std::isfinite(z)) continue;
    double B = 0.0;
    try {
      B = std::abs(badlands_B(U, beam, z));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ClassicallyForbidden) continue;
      throw;
    }
    if (!best.exists || B > best.B_at_max) {
      best.z_r = z;
      best.B_at_max = B;
      best.exists = true;
    }
  }
  if (!best.exists) {
    std::ostringstream msg;
    msg << "no real positive reflection point for n=" << n << ", lambda=" << lambda;
    throw Error(ErrorKind::NoRealRoot, msg.str());
  }

  if (cross_check) {
    const auto numeric = reflection_point_numeric(U, beam, best.z_r / 100.0, best.z_r * 100.0);
    const double rel = numeric.exists ? std::abs(numeric.z_r / best.z_r - 1.0) : INFINITY;
    if (!(rel <= 1e-6)) {
      std::ostringstream msg;
      msg << "closed-form reflection point " << best.z_r << " disagrees with |B| maximum "
          << (numeric.exists ? numeric.z_r : NAN) << " (n=" << n << ")";
      throw Error(ErrorKind::CrossCheckFailed, msg.str());
    }
  }
  return best;
}

double reflection_point_alternative_special(int n, double lambda, double U0, const BeamSpec& beam) {
  const double dn = n;
  const double t = (dn - 2.0) / (2.5 * dn - 4.0) * (beam.energy() - U0) / lambda;
  return std::pow(std::abs(t), 1.0 / dn);
}

BreakdownScan breakdown_scan(const PotentialModel& wall, double mass, const std::vector<double>& v_grid,
                             Execution execution, double z_lo) {
  if (!std::is_sorted(v_grid.begin(), v_grid.end()))
    throw Error(ErrorKind::InvalidArgument, "breakdown scan: velocity grid must be ascending");
  double z_hi = kDefaultScanHi;
  if (const auto* dw = std::get_if<potentials::DoubleWall>(&wall.variant())) z_hi = 0.5 * dw->L;

  BreakdownScan scan;
  scan.samples = map_indexed<BreakdownSample>(
      v_grid.size(),
      [&](std::size_t i) {
        const auto beam = BeamSpec::make(mass, v_grid[i]);
        return BreakdownSample{v_grid[i], reflection_point_numeric(wall, beam, z_lo, z_hi)};
      },
      execution);
  for (const auto& s : scan.samples) {
    if (s.point.exists) {
      scan.breakdown_velocity = s.v_perp;
      scan.breakdown_distance = s.point.z_r;
      break;
    }
  }
  return scan;
}

}  // namespace qreflect
