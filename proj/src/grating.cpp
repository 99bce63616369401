#include "qreflect/grating.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qreflect/constants.hpp"
#include "qreflect/error.hpp"

namespace qreflect {

void GratingGeometry::validate() const {
  if (!(p0 > 0.0) || !(w > 0.0) || !(w < p0) || !(d > 0.0) || N < 1 || !std::isfinite(p0) ||
      !std::isfinite(d)) {
    std::ostringstream msg;
    msg << "grating geometry needs 0 < w < p0, d > 0, N >= 1 (p0=" << p0 << ", w=" << w << ", d=" << d
        << ", N=" << N << ")";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
}

double GratingGeometry::theta_max() const { return std::atan((p0 - w) / d); }

GeometryAt geometry_at(const GratingGeometry& geom, double theta) {
  geom.validate();
  if (!(theta >= 0.0) || !(theta < constants::pi / 2))
    throw Error(ErrorKind::InvalidArgument, "rotation angle must lie in [0, pi/2)");
  GeometryAt g;
  g.p = geom.p0 * std::cos(theta);
  g.a = geom.d * std::sin(theta);
  g.o = (geom.p0 - geom.w) * std::cos(theta) - g.a;
  g.closed = g.o <= 0.0;
  return g;
}

namespace {

void require_angle(const GratingGeometry& geom, double theta, bool open_interval) {
  const double tmax = geom.theta_max();
  const bool ok = open_interval ? (theta > 0.0 && theta < tmax) : (theta >= 0.0 && theta <= tmax);
  if (!ok) {
    std::ostringstream msg;
    msg << "rotation angle " << theta << " outside " << (open_interval ? "(0, " : "[0, ") << tmax
        << (open_interval ? ")" : "]");
    throw Error(ErrorKind::ThetaPastMax, msg.str());
  }
}

}  // namespace

double transmission_rate(const GratingGeometry& geom, double theta) {
  geom.validate();
  require_angle(geom, theta, false);
  const GeometryAt g = geometry_at(geom, theta);
  // o can come out as -1e-17 at theta_max itself.
  return std::max(0.0, g.o / g.p);
}

double geometric_factor(const GratingGeometry& geom, double theta) {
  geom.validate();
  return geom.d / geom.p0 * std::tan(theta);
}

RateResult reflection_rate(const GratingGeometry& geom, double theta, double mass, double v,
                           const PotentialModel& wall, const ToleranceSpec& tol) {
  geom.validate();
  require_angle(geom, theta, true);
  RateResult out;
  out.theta = theta;
  out.v_perp = v * std::sin(theta);
  const auto refl = riccati_reflection(wall, BeamSpec::make(mass, out.v_perp), tol);
  out.abs_r = std::abs(refl.r);
  out.z_r = refl.z_r;
  out.geometric_factor = geometric_factor(geom, theta);
  out.rate = out.abs_r * out.geometric_factor;
  return out;
}

void PatternSpec::validate(const GratingGeometry& geom) const {
  geom.validate();
  if (!(theta >= 0.0) || !(theta < geom.theta_max())) {
    std::ostringstream msg;
    msg << "pattern rotation angle " << theta << " outside [0, " << geom.theta_max() << ")";
    throw Error(ErrorKind::ThetaPastMax, msg.str());
  }
  if (alpha_grid.empty()) throw Error(ErrorKind::InvalidArgument, "pattern alpha grid is empty");
  if (!std::is_sorted(alpha_grid.begin(), alpha_grid.end()))
    throw Error(ErrorKind::InvalidArgument, "pattern alpha grid must be ascending");
  if (!(K > 0.0) || !(L1 > 0.0) || !(L2 > 0.0) || !(I0 >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "pattern needs K, L1, L2 > 0 and I0 >= 0");
}

namespace {

/// sin^2(N u) / sin^2(u) with the N^2 limit where sin(u) vanishes.
double slit_factor(int N, double u) {
  const double s = std::sin(u);
  if (s == 0.0) return static_cast<double>(N) * N;
  const double t = std::sin(N * u) / s;
  return t * t;
}

}  // namespace

double reflected_intensity(double alpha, const PatternSpec& spec, const GratingGeometry& geom, double rate) {
  const double x = alpha - 2.0 * spec.theta;
  const double w_int = spec.K * geom.p0 * std::cos(spec.theta) / 2.0;
  const double w_diff = spec.K * geom.d * std::sin(spec.theta) / 2.0;
  const double prefactor = spec.I0 * rate * rate;
  if (x == 0.0) return prefactor * geom.N * geom.N * w_diff * w_diff;
  const double envelope = std::sin(w_diff * x) / x;
  return prefactor * slit_factor(geom.N, w_int * x) * envelope * envelope;
}

std::vector<PatternPoint> pattern_reflected(const PatternSpec& spec, const GratingGeometry& geom, double rate,
                                            Execution execution) {
  spec.validate(geom);
  if (!(rate >= 0.0 && rate <= 1.0)) throw Error(ErrorKind::InvalidArgument, "reflection rate must lie in [0, 1]");
  return map_indexed<PatternPoint>(
      spec.alpha_grid.size(),
      [&](std::size_t i) {
        const double a = spec.alpha_grid[i];
        return PatternPoint{a, reflected_intensity(a, spec, geom, rate)};
      },
      execution);
}

double default_edge_cut(double C3, double d, double v_z) {
  if (C3 == 0.0) return 0.0;
  return std::cbrt(C3 * d / (constants::hbar * v_z * 20.0 * constants::pi));
}

double slit_integral_norm(double alpha, const PatternSpec& spec, const GratingGeometry& geom, double C3,
                          double v_z, double delta, const ToleranceSpec& tol) {
  const double w_t = geometry_at(geom, spec.theta).o;
  const double half = 0.5 * w_t;
  const double k_tan = spec.K * std::tan(alpha);
  const double strength = C3 == 0.0 ? 0.0 : C3 * geom.d / (constants::hbar * v_z);
  auto integrand = [&](double s) {
    double phase = k_tan * s;
    if (strength != 0.0) {
      const double left = half - s, right = s + half;
      phase -= strength * (1.0 / (left * left * left) + 1.0 / (right * right * right));
    }
    return std::polar(1.0, phase);
  };
  ToleranceSpec local = tol;
  // |S| <= w_T, so an absolute floor relative to the slit width keeps the
  // zeros of the envelope reachable.
  local.abs = std::max(tol.abs, 1e-13 * w_t);
  return std::norm(quad_finite(integrand, -half + delta, half - delta, local).value);
}

TransmittedPattern pattern_transmitted(const PatternSpec& spec, const GratingGeometry& geom, double C3,
                                       double v_z, double delta, const ToleranceSpec& tol,
                                       Execution execution) {
  spec.validate(geom);
  if (!(C3 >= 0.0) || !std::isfinite(C3)) throw Error(ErrorKind::InvalidArgument, "C3 must be >= 0");
  if (C3 > 0.0 && !(v_z > 0.0)) throw Error(ErrorKind::InvalidArgument, "v_z must be positive");
  const double w_t = geometry_at(geom, spec.theta).o;
  if (delta < 0.0) delta = default_edge_cut(C3, geom.d, v_z);
  if (delta == 0.0 && C3 > 0.0)
    throw Error(ErrorKind::InvalidArgument, "edge cut must be positive when C3 > 0");
  if (!(delta < 0.25 * w_t)) {
    std::ostringstream msg;
    msg << "edge cut " << delta << " m is not below a quarter of the opening " << w_t << " m";
    throw Error(ErrorKind::EdgeCutTooLarge, msg.str());
  }

  const double u_scale = spec.K * geom.p0 * std::cos(spec.theta) / 2.0;
  const double prefactor = spec.I0 * spec.K * spec.K / 4.0;
  auto intensity = [&](double alpha, double cut) {
    return prefactor * slit_factor(geom.N, u_scale * std::tan(alpha)) *
           slit_integral_norm(alpha, spec, geom, C3, v_z, cut, tol);
  };

  TransmittedPattern out;
  out.edge_cut = delta;
  out.points = map_indexed<PatternPoint>(
      spec.alpha_grid.size(),
      [&](std::size_t i) {
        const double a = spec.alpha_grid[i];
        return PatternPoint{a, intensity(a, delta)};
      },
      execution);
  if (delta > 0.0) {
    const double base = intensity(0.0, delta);
    out.edge_cut_sensitivity = base > 0.0 ? std::abs(intensity(0.0, delta / 1.5) / base - 1.0) : 0.0;
  }
  return out;
}

}  // namespace qreflect
