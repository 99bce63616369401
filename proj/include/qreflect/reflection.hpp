#pragma once

// Reflection amplitudes: potential step, slab recursion, Riccati
// integration and the closed form for a linear potential.

#include <string_view>

#include "qreflect/badlands.hpp"
#include "qreflect/numerics.hpp"
#include "qreflect/parallel.hpp"
#include "qreflect/potential.hpp"

namespace qreflect {

enum class ReflectionSolver { Step, Multistep, Riccati, LinearAnalytic };
std::string_view to_string(ReflectionSolver solver);

struct ReflectionResult {
  Complex r{0.0, 0.0};
  double R = 0.0;        // |r|^2
  double z_r = 0.0;      // termination point
  double z_start = 0.0;  // initialization point
  int steps = 0;         // accepted ODE steps, or slab count
  int rejected_steps = 0;
  double max_abs_r = 0.0;  // largest |r| seen along the integration
  ReflectionSolver method = ReflectionSolver::Riccati;
};

struct StepCoefficients {
  Complex r;
  Complex t;
};

/// r = (q1 - q2)/(q1 + q2), t = 2 q1/(q1 + q2) = 1 + r. DegenerateInterface
/// when q1 + q2 = 0.
StepCoefficients step_coefficients(Complex q1, Complex q2);

/// q(z) = sqrt(K^2 - 2 m U(z)/hbar^2) = p(z)/hbar.
double local_wave_number(const PotentialModel& U, const BeamSpec& beam, double z);

/// Largest slab count multistep_reflection accepts.
inline constexpr long long kMaxSlabs = 10'000'000;

/// Slab recursion over [z_near, z_far]. The span is cut into
/// round((z_far - z_near)/delta) slabs of equal width, each with q taken at
/// its midpoint; the medium below z_near has q(z_near) and the one above
/// z_far has q(z_far). Starting from r = 0 in the deep medium the recursion
///   r~ = (r + r~' e^{2 i q' w}) / (1 + r r~' e^{2 i q' w})
/// adds one interface at a time outward and returns the generalized
/// reflection amplitude at z_far.
ReflectionResult multistep_reflection(const PotentialModel& U, const BeamSpec& beam, double z_far,
                                      double z_near, double delta,
                                      Execution execution = Execution::Parallel);

/// Integrates dr/dz = s 2 i q r + (q'/2q)(1 - r^2), s = sign(z_to - z_from),
/// from r(z_from) = r_init. With s = +1 this is the continuum limit of the
/// slab recursion (transmission below z_from); with s = -1 it is the same
/// equation written in the mirrored coordinate, which is how the surface
/// problem is solved.
ReflectionResult riccati_integrate(const PotentialModel& U, const BeamSpec& beam, double z_from,
                                   double z_to, Complex r_init, const ToleranceSpec& tol,
                                   const OdeObserver& observer = {});

/// First-order adiabatic value of r where the potential varies slowly:
/// r = -a/(2 i s q + a), a = q'/(2q). A better start than r = 0 when the
/// integration cannot begin in a flat region.
Complex adiabatic_reflection_estimate(const PotentialModel& U, const BeamSpec& beam, double z,
                                      double direction);

inline constexpr ToleranceSpec kRiccatiTol{1e-10, 1e-12, 2'000'000};
inline constexpr double kDefaultStartFactor = 100.0;

/// Quantum reflection from a surface potential. z_r comes from the |B|
/// maximum on [scan_lo, scan_hi]; r = 0 is set at start_factor * z_r and
/// the equation is integrated toward the surface, stopping at z_r.
/// For a double wall pass scan_hi <= L/2.
/// NoReflectionPoint when the badlands function has no maximum.
ReflectionResult riccati_reflection(const PotentialModel& U, const BeamSpec& beam,
                                    const ToleranceSpec& tol = kRiccatiTol,
                                    double start_factor = kDefaultStartFactor,
                                    double scan_lo = kDefaultScanLo, double scan_hi = kDefaultScanHi);

/// Same as above with a known reflection point. For a double wall the
/// start is capped at the midpoint L/2.
ReflectionResult riccati_reflection_at(const PotentialModel& U, const BeamSpec& beam, double z_r,
                                       const ToleranceSpec& tol = kRiccatiTol,
                                       double start_factor = kDefaultStartFactor);

/// Reflection amplitude of the linear potential U = gamma1 * s (s the
/// coordinate along which the Riccati equation runs, transmission toward
/// s -> -inf), referred to the point where the kinetic energy equals
/// m v^2/2:
///   r1 = (-I_{-1/3} - I_{2/3} + I_{-2/3} + I_{1/3}) / (-I_{-1/3} + I_{2/3} - I_{-2/3} + I_{1/3})
/// with every I evaluated at x = -i m^2 v^3 / (3 hbar gamma1).
Complex linear_reflection_analytic(const BeamSpec& beam, double gamma1);

/// The argument x used by linear_reflection_analytic.
Complex linear_reflection_argument(const BeamSpec& beam, double gamma1);

}  // namespace qreflect
