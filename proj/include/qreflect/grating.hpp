#pragma once

// Rotated transmission grating: beam split into transmitted and
// quantum-reflected parts, and the far-field patterns of both.

#include <vector>

#include "qreflect/numerics.hpp"
#include "qreflect/parallel.hpp"
#include "qreflect/potential.hpp"
#include "qreflect/reflection.hpp"

namespace qreflect {

struct GratingGeometry {
  double p0 = 0.0;  // period, m
  double w = 0.0;   // bar width, m
  double d = 0.0;   // thickness, m
  int N = 1;        // illuminated slits

  void validate() const;
  /// arctan((p0 - w)/d): the angle at which the opening closes.
  double theta_max() const;
};

struct GeometryAt {
  double p = 0.0;  // projected period p0 cos(theta)
  double a = 0.0;  // reflective length d sin(theta)
  double o = 0.0;  // transmitting opening (p0 - w) cos(theta) - a
  bool closed = false;  // o <= 0
};

GeometryAt geometry_at(const GratingGeometry& geom, double theta);

/// T = o(theta)/p(theta) = (p0 - w)/p0 - (d/p0) tan(theta). ThetaPastMax
/// outside [0, theta_max].
double transmission_rate(const GratingGeometry& geom, double theta);

/// (d/p0) tan(theta) = a(theta)/p(theta): the reflecting share of a period.
double geometric_factor(const GratingGeometry& geom, double theta);

struct RateResult {
  double theta = 0.0;
  double v_perp = 0.0;
  double abs_r = 0.0;  // |r| at v_perp = v sin(theta)
  double z_r = 0.0;
  double geometric_factor = 0.0;
  double rate = 0.0;  // abs_r * geometric_factor
};

/// Quantum-reflection rate of the inward-moving sidewall: |r| from
/// riccati_reflection at v_perp = v sin(theta), times geometric_factor.
/// theta must lie in (0, theta_max); NoReflectionPoint propagates.
RateResult reflection_rate(const GratingGeometry& geom, double theta, double mass, double v,
                           const PotentialModel& wall, const ToleranceSpec& tol = kRiccatiTol);

struct PatternSpec {
  double theta = 0.0;               // grating rotation, rad
  std::vector<double> alpha_grid;   // screen angles, rad, ascending
  double K = 0.0;                   // wave number of the beam, 1/m
  double L1 = 1.0, L2 = 1.0;        // source-grating and grating-screen distances, m
  double I0 = 1.0;                  // intensity scale

  void validate(const GratingGeometry& geom) const;
};

struct PatternPoint {
  double alpha = 0.0;
  double intensity = 0.0;
};

/// I_R(alpha) = I0 rate^2 sin^2(N w_int x)/sin^2(w_int x) sin^2(w_diff x)/x^2,
/// x = alpha - 2 theta, w_int = K p0 cos(theta)/2, w_diff = K d sin(theta)/2.
/// At x = 0 the value is the limit I0 rate^2 N^2 w_diff^2; where only
/// sin(w_int x) vanishes the slit factor is N^2.
std::vector<PatternPoint> pattern_reflected(const PatternSpec& spec, const GratingGeometry& geom,
                                            double rate, Execution execution = Execution::Parallel);

/// Single-point evaluation used by pattern_reflected.
double reflected_intensity(double alpha, const PatternSpec& spec, const GratingGeometry& geom, double rate);

/// Edge cut where the Casimir-Polder phase (C3 d/(hbar v_z)) delta^-3
/// reaches 20 pi. Zero when C3 = 0.
double default_edge_cut(double C3, double d, double v_z);

struct TransmittedPattern {
  std::vector<PatternPoint> points;
  double edge_cut = 0.0;
  /// Relative change of I_T(alpha = 0) when the edge cut shrinks by 1.5x;
  /// 0 when no cut is applied.
  double edge_cut_sensitivity = 0.0;
};

/// I_T(alpha) = (I0 K^2/4) sin^2(N u)/sin^2(u) |S(alpha)|^2, u = (K p0 cos(theta)/2) tan(alpha),
/// S = integral over s in [-w_T/2 + delta, w_T/2 - delta] of
///     exp(i K s tan(alpha)) exp(-i (C3 d/(hbar v_z)) [(w_T/2 - s)^-3 + (s + w_T/2)^-3]),
/// w_T = o(theta). delta must lie in (0, w_T/4) (EdgeCutTooLarge beyond);
/// delta = 0 is accepted only with C3 = 0. A negative delta selects
/// default_edge_cut.
TransmittedPattern pattern_transmitted(const PatternSpec& spec, const GratingGeometry& geom, double C3,
                                       double v_z, double delta = -1.0,
                                       const ToleranceSpec& tol = {1e-10, 0.0, 100000},
                                       Execution execution = Execution::Parallel);

/// |S(alpha)|^2 for one angle.
double slit_integral_norm(double alpha, const PatternSpec& spec, const GratingGeometry& geom, double C3,
                          double v_z, double delta, const ToleranceSpec& tol);

}  // namespace qreflect
