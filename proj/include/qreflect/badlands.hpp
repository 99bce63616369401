#pragma once

// WKB validity (badlands) function and the reflection point defined by its
// maximum.

#include <optional>
#include <string_view>
#include <vector>

#include "qreflect/numerics.hpp"
#include "qreflect/parallel.hpp"
#include "qreflect/potential.hpp"

namespace qreflect {

/// p = sqrt(2 m (E - U)) and its first three z-derivatives.
struct MomentumJet {
  double p = 0.0, dp = 0.0, d2p = 0.0, d3p = 0.0;
};

/// ClassicallyForbidden when E <= U(z).
MomentumJet local_momentum(const PotentialModel& U, const BeamSpec& beam, double z);

/// B = hbar^2 (3/4 p'^2/p^4 - 1/2 p''/p^3), signed.
double badlands_B(const PotentialModel& U, const BeamSpec& beam, double z);

/// d|B|/dz = sign(B) hbar^2 (3 p' p''/p^4 - 3 p'^3/p^5 - p'''/(2 p^3)).
double badlands_abs_derivative(const PotentialModel& U, const BeamSpec& beam, double z);

enum class ReflectionMethod { ClosedFormGeneral, ClosedFormSpecial, NumericMax };
std::string_view to_string(ReflectionMethod method);

struct ReflectionPoint {
  double z_r = 0.0;
  ReflectionMethod method = ReflectionMethod::NumericMax;
  double B_at_max = 0.0;  // |B(z_r)|
  bool exists = false;
};

inline constexpr double kDefaultScanLo = 0.1e-9;
inline constexpr double kDefaultScanHi = 10e-6;

/// Tolerance of the golden-section refinement. The flat top of |B| limits
/// the location to roughly 1e-8 relative whatever is requested.
inline constexpr ToleranceSpec kReflectionPointTol{1e-10, 0.0, 10000};

/// Maximum of |B| on [z_lo, z_hi] via maximize_scalar. exists = false when
/// the scan finds no interior maximum (badlands breakdown).
ReflectionPoint reflection_point_numeric(const PotentialModel& U, const BeamSpec& beam,
                                         double z_lo = kDefaultScanLo, double z_hi = kDefaultScanHi,
                                         const ToleranceSpec& tol = kReflectionPointTol);

/// Closed-form reflection point of lambda z^n + U0.
///
/// With t = z^n the stationarity condition of |B| is a quadratic in t whose
/// roots are t = z_c^n [-(n-1)(5n+8) +- n sqrt(3(n-1)(7n+13))] / ((n+4)(n+2)),
/// z_c^n = (E - U0)/lambda. The root giving a real positive z and the
/// larger |B| is taken. For n = -2 and n = -4 the quadratic degenerates to
/// t = -2(n-2)/(5n+8) z_c^n, i.e. (C4/E)^(1/4) for the retarded wall.
/// With cross_check the result is compared to reflection_point_numeric and
/// CrossCheckFailed is thrown beyond 1e-6 relative.
ReflectionPoint reflection_point_powerlaw(int n, double lambda, double U0, const BeamSpec& beam,
                                          bool cross_check = true);

/// Alternative special-case form for n = -2, -4,
/// ((n-2)/((5/2)n-4) (E-U0)/lambda)^(1/n) in absolute value; for the
/// retarded wall (7 C4/(3 E))^(1/4). Kept for reporting the discrepancy only.
double reflection_point_alternative_special(int n, double lambda, double U0, const BeamSpec& beam);

struct BreakdownSample {
  double v_perp = 0.0;
  ReflectionPoint point;
};

struct BreakdownScan {
  std::vector<BreakdownSample> samples;  // in v_grid order
  /// Smallest velocity with a reflection point, and that point's distance.
  std::optional<double> breakdown_velocity;
  std::optional<double> breakdown_distance;
};

/// Reflection point per velocity on (z_lo, L/2] for a double wall (the
/// whole default window otherwise). Velocities must be ascending.
BreakdownScan breakdown_scan(const PotentialModel& wall, double mass, const std::vector<double>& v_grid,
                             Execution execution = Execution::Parallel, double z_lo = kDefaultScanLo);

}  // namespace qreflect
