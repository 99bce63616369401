#include "qreflect/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>

#include "qreflect/constants.hpp"
#include "qreflect/error.hpp"

namespace qreflect {

std::string_view to_string(ReflectionSolver solver) {
  switch (solver) {
    case ReflectionSolver::Step: return "step";
    case ReflectionSolver::Multistep: return "multistep";
    case ReflectionSolver::Riccati: return "riccati";
    case ReflectionSolver::LinearAnalytic: return "linear-analytic";
  }
  return "unknown";
}

StepCoefficients step_coefficients(Complex q1, Complex q2) {
  const Complex sum = q1 + q2;
  if (sum == Complex(0.0)) throw Error(ErrorKind::DegenerateInterface, "step coefficients: q1 + q2 = 0");
  const Complex r = (q1 - q2) / sum;
  return {r, r + 1.0};
}

double local_wave_number(const PotentialModel& U, const BeamSpec& beam, double z) {
  return local_momentum(U, beam, z).p / constants::hbar;
}

namespace {

/// q and q'/(2q) from one potential evaluation.
struct LocalWave {
  double q;
  double a;
};

LocalWave local_wave(const PotentialModel& U, const BeamSpec& beam, double z) {
  const PotentialJet u = U.jet(z);
  const double kinetic = beam.energy() - u[0];
  if (!(kinetic > 0.0)) {
    std::ostringstream msg;
    msg << "classically forbidden at z=" << z << " (E - U = " << kinetic << " J)";
    throw Error(ErrorKind::ClassicallyForbidden, msg.str());
  }
  const double p2 = 2.0 * beam.mass * kinetic;
  return {std::sqrt(p2) / constants::hbar, -beam.mass * u[1] / (2.0 * p2)};
}

}  // namespace

ReflectionResult multistep_reflection(const PotentialModel& U, const BeamSpec& beam, double z_far,
                                      double z_near, double delta, Execution execution) {
  if (!(z_near < z_far) || !std::isfinite(z_near) || !std::isfinite(z_far))
    throw Error(ErrorKind::InvalidArgument, "multistep: require finite z_near < z_far");
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "multistep: slab width must be positive");
  const double span = z_far - z_near;
  const double count = std::max(1.0, std::round(span / delta));
  if (count > static_cast<double>(kMaxSlabs)) {
    std::ostringstream msg;
    msg << "multistep: " << count << " slabs exceed the cap of " << kMaxSlabs;
    throw Error(ErrorKind::SlabCountOverflow, msg.str());
  }
  const auto n = static_cast<std::size_t>(count);
  const double width = span / static_cast<double>(n);

  const auto q = map_indexed<double>(
      n,
      [&](std::size_t j) {
        return local_wave_number(U, beam, z_near + (static_cast<double>(j) + 0.5) * width);
      },
      execution);
  const double q_deep = local_wave_number(U, beam, z_near);
  const double q_out = local_wave_number(U, beam, z_far);

  Complex r_tilde = step_coefficients(q[0], q_deep).r;
  for (std::size_t j = 1; j <= n; ++j) {
    const double q_inc = j < n ? q[j] : q_out;
    const double q_prev = q[j - 1];
    const Complex r = step_coefficients(q_inc, q_prev).r;
    const Complex shifted = r_tilde * std::exp(Complex(0.0, 2.0 * q_prev * width));
    r_tilde = (r + shifted) / (1.0 + r * shifted);
  }

  ReflectionResult out;
  out.r = r_tilde;
  out.R = std::norm(r_tilde);
  out.z_r = z_near;
  out.z_start = z_far;
  out.steps = static_cast<int>(n);
  out.max_abs_r = std::abs(r_tilde);
  out.method = ReflectionSolver::Multistep;
  return out;
}

ReflectionResult riccati_integrate(const PotentialModel& U, const BeamSpec& beam, double z_from,
                                   double z_to, Complex r_init, const ToleranceSpec& tol,
                                   const OdeObserver& observer) {
  const double direction = z_to > z_from ? 1.0 : -1.0;
  auto rhs = [&](double z, Complex r) {
    const LocalWave w = local_wave(U, beam, z);
    return Complex(0.0, 2.0 * direction * w.q) * r + w.a * (1.0 - r * r);
  };
  ReflectionResult out;
  out.max_abs_r = std::abs(r_init);
  auto monitor = [&](double z, Complex r) {
    out.max_abs_r = std::max(out.max_abs_r, std::abs(r));
    if (observer) observer(z, r);
  };
  const OdeResult ode = integrate_ode(rhs, r_init, z_from, z_to, tol, monitor);
  out.r = ode.y;
  out.R = std::norm(ode.y);
  out.z_r = z_to;
  out.z_start = z_from;
  out.steps = ode.accepted_steps;
  out.rejected_steps = ode.rejected_steps;
  out.method = ReflectionSolver::Riccati;
  return out;
}

Complex adiabatic_reflection_estimate(const PotentialModel& U, const BeamSpec& beam, double z,
                                      double direction) {
  const LocalWave w = local_wave(U, beam, z);
  return -w.a / (Complex(0.0, 2.0 * direction * w.q) + w.a);
}

ReflectionResult riccati_reflection_at(const PotentialModel& U, const BeamSpec& beam, double z_r,
                                       const ToleranceSpec& tol, double start_factor) {
  if (!(z_r > 0.0)) throw Error(ErrorKind::InvalidArgument, "reflection point must be positive");
  if (!(start_factor > 1.0)) throw Error(ErrorKind::InvalidArgument, "start factor must exceed 1");
  double z_start = start_factor * z_r;
  // Between two walls the far region does not exist: start at the midpoint,
  // where U' vanishes by symmetry.
  if (const auto* dw = std::get_if<potentials::DoubleWall>(&U.variant())) {
    if (!(z_r < 0.5 * dw->L))
      throw Error(ErrorKind::InvalidArgument, "reflection point must lie below the double-wall midpoint");
    z_start = std::min(z_start, 0.5 * dw->L);
  }
  return riccati_integrate(U, beam, z_start, z_r, Complex(0.0), tol);
}

ReflectionResult riccati_reflection(const PotentialModel& U, const BeamSpec& beam,
                                    const ToleranceSpec& tol, double start_factor, double scan_lo,
                                    double scan_hi) {
  const ReflectionPoint point = reflection_point_numeric(U, beam, scan_lo, scan_hi);
  if (!point.exists) {
    std::ostringstream msg;
    msg << "no reflection point for v_perp=" << beam.v_perp << " m/s (badlands maximum absent on ["
        << scan_lo << ", " << scan_hi << "] m)";
    throw Error(ErrorKind::NoReflectionPoint, msg.str());
  }
  return riccati_reflection_at(U, beam, point.z_r, tol, start_factor);
}

Complex linear_reflection_argument(const BeamSpec& beam, double gamma1) {
  if (!(gamma1 != 0.0) || !std::isfinite(gamma1))
    throw Error(ErrorKind::InvalidArgument, "linear potential slope must be nonzero");
  const double v = beam.v_perp;
  return {0.0, -beam.mass * beam.mass * v * v * v / (3.0 * constants::hbar * gamma1)};
}

Complex linear_reflection_analytic(const BeamSpec& beam, double gamma1) {
  const Complex x = linear_reflection_argument(beam, gamma1);
  const Complex i_m13 = bessel_I(-1.0 / 3.0, x);
  const Complex i_p13 = bessel_I(1.0 / 3.0, x);
  const Complex i_m23 = bessel_I(-2.0 / 3.0, x);
  const Complex i_p23 = bessel_I(2.0 / 3.0, x);
  return (-i_m13 - i_p23 + i_m23 + i_p13) / (-i_m13 + i_p23 - i_m23 + i_p13);
}

}  // namespace qreflect
