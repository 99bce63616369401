#pragma once

// Numerical kernels shared by the physics modules: adaptive ODE
// integration over a complex state, adaptive Gauss-Kronrod quadrature,
// bracketed scalar maximization and the power series for modified Bessel
// functions of fractional order.

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace qreflect {

using Complex = std::complex<double>;

struct ToleranceSpec {
  double rel = 1e-10;
  double abs = 1e-14;
  int max_steps = 1'000'000;

  /// Throws InvalidArgument unless rel > 0, abs >= 0, max_steps >= 1.
  void validate() const;
};

// ---------------------------------------------------------------------------
// ODE integration

using OdeRhs = std::function<Complex(double z, Complex y)>;
/// Called after every accepted step with the new (z, y).
using OdeObserver = std::function<void(double z, Complex y)>;

struct OdeResult {
  Complex y;
  int accepted_steps = 0;
  int rejected_steps = 0;
};

/// Integrates y' = rhs(z, y) from z_start to z_end (either direction) with
/// the Dormand-Prince 5(4) embedded pair. The local error of each step is
/// held below tol.abs + tol.rel * |y|. Throws StepLimitExceeded once
/// accepted + rejected steps reach tol.max_steps, NonFiniteRhs when the
/// right-hand side returns NaN or infinity.
OdeResult integrate_ode(const OdeRhs& rhs, Complex y0, double z_start,
                        double z_end, const ToleranceSpec& tol,
                        const OdeObserver& observer = {});

// ---------------------------------------------------------------------------
// Quadrature

struct QuadResult {
  Complex value;
  double error = 0.0;
  int intervals = 0;
};

struct RealQuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b]. The
/// interval with the largest |K15 - G7| is bisected until the summed error
/// is at most max(tol.abs, tol.rel * |result|). tol.max_steps caps the
/// number of subintervals; exceeding it throws QuadratureError carrying the
/// best estimate.
QuadResult quad_finite(const std::function<Complex(double)>& f, double a,
                       double b, const ToleranceSpec& tol);
RealQuadResult quad_finite_real(const std::function<double(double)>& f,
                                double a, double b, const ToleranceSpec& tol);

/// Integral over [a, inf) via v = a - 1 + 1/u, u in (0, 1]. For a = 1 this
/// is the plain reciprocal map. The integrand must decay at least as v^-2.
RealQuadResult quad_semi_infinite(const std::function<double(double)>& f,
                                  double a, const ToleranceSpec& tol);

using Vec4 = std::array<double, 4>;

struct Quad4Result {
  Vec4 value{};
  Vec4 error{};
  int intervals = 0;
};

/// Four integrands sharing one set of nodes (a value and its first three
/// derivatives, typically). Refinement follows the component whose error is
/// largest relative to its first whole-range estimate; every component must
/// meet the tolerance on its own.
Quad4Result quad_semi_infinite4(const std::function<Vec4(double)>& f, double a,
                                const ToleranceSpec& tol);

// ---------------------------------------------------------------------------
// Maximization

struct MaximumResult {
  double x = 0.0;
  double value = 0.0;
};

/// Sample grid used to bracket a maximum: logarithmic with
/// `points_per_decade` points per decade when lo > 0, otherwise 256 uniform
/// cells.
std::vector<double> bracketing_grid(double lo, double hi,
                                    int points_per_decade = 64);

/// Locates the largest strict interior local maximum of f on [lo, hi].
///
/// f is sampled on bracketing_grid(lo, hi); the best interior local maximum
/// of the samples is refined by golden-section search inside its two
/// neighbouring cells until the bracket is no wider than
/// tol.rel * |x| + tol.abs. Throws NoInteriorMaximum when the samples have
/// no interior local maximum, or when the only one sits in a cell touching
/// an end of the range (it has merged with the boundary).
MaximumResult maximize_scalar(const std::function<double(double)>& f,
                              double lo, double hi, const ToleranceSpec& tol,
                              int points_per_decade = 64);

// ---------------------------------------------------------------------------
// Modified Bessel function of the first kind

/// |z| above which the series is refused: rounding in the alternating sum
/// for imaginary arguments grows like exp(|z|).
inline constexpr double kBesselSeriesRadius = 25.0;

/// I_nu(z) = sum_k (z/2)^(2k+nu) / (k! Gamma(k+nu+1)) on the principal
/// branch, summed until terms drop below 1e-17 of the partial sum. Orders
/// +-1/3 and +-2/3 are what the library needs; any real order that is not
/// a negative integer is accepted. Throws SeriesNotConverged past the term
/// cap, past kBesselSeriesRadius, or when cancellation would cost more than
/// 1e-9 relative accuracy; DomainError for z = 0 with nu < 0.
Complex bessel_I(double nu, Complex z);

}  // namespace qreflect
