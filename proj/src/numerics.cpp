#include "qreflect/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "qreflect/error.hpp"

namespace qreflect {

void ToleranceSpec::validate() const {
  if (!(rel > 0.0) || !(abs >= 0.0) || max_steps < 1) {
    std::ostringstream msg;
    msg << "invalid tolerance (rel=" << rel << ", abs=" << abs
        << ", max_steps=" << max_steps << ")";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
}

namespace {

bool finite(Complex v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeResult integrate_ode(const OdeRhs& rhs, Complex y0, double z_start,
                        double z_end, const ToleranceSpec& tol,
                        const OdeObserver& observer) {
  tol.validate();
  if (!(z_start != z_end) || !std::isfinite(z_start) || !std::isfinite(z_end))
    throw Error(ErrorKind::InvalidArgument, "integrate_ode: empty or non-finite interval");

  auto eval = [&](double z, Complex y) {
    const Complex f = rhs(z, y);
    if (!finite(f)) {
      std::ostringstream msg;
      msg << "integrate_ode: right-hand side is not finite at z=" << z;
      throw Error(ErrorKind::NonFiniteRhs, msg.str());
    }
    return f;
  };
  auto scale = [&](double magnitude) {
    const double s = tol.abs + tol.rel * magnitude;
    return s > 0.0 ? s : std::numeric_limits<double>::min();
  };

  const double span = std::abs(z_end - z_start);
  const double dir = z_end > z_start ? 1.0 : -1.0;

  OdeResult result;
  double z = z_start;
  Complex y = y0;
  Complex k1 = eval(z, y);

  // Initial step size (Hairer, Norsett & Wanner, II.4).
  double h;
  {
    const double sc = scale(std::abs(y));
    const double d0 = std::abs(y) / sc;
    const double d1 = std::abs(k1) / sc;
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const Complex f1 = eval(z + dir * h0, y + dir * h0 * k1);
    const double d2 = std::abs(f1 - k1) / sc / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6 * span, 1e-3 * h0)
                                    : std::pow(0.01 / dmax, 0.2);
    h = std::min({100.0 * h0, h1, span});
  }

  bool last_rejected = false;
  while (true) {
    const double remaining = std::abs(z_end - z);
    if (remaining <= 0.0) break;
    if (result.accepted_steps + result.rejected_steps >= tol.max_steps) {
      std::ostringstream msg;
      msg << "integrate_ode: step limit " << tol.max_steps << " reached at z=" << z
          << " (target " << z_end << ")";
      throw Error(ErrorKind::StepLimitExceeded, msg.str());
    }
    bool final_step = false;
    if (h >= remaining) {
      h = remaining;
      final_step = true;
    }
    if (h <= 1e-15 * std::max(std::abs(z), span)) {
      std::ostringstream msg;
      msg << "integrate_ode: step size underflow at z=" << z;
      throw Error(ErrorKind::StepLimitExceeded, msg.str());
    }

    const double s = dir * h;
    const Complex k2 = eval(z + c2 * s, y + s * (a21 * k1));
    const Complex k3 = eval(z + c3 * s, y + s * (a31 * k1 + a32 * k2));
    const Complex k4 = eval(z + c4 * s, y + s * (a41 * k1 + a42 * k2 + a43 * k3));
    const Complex k5 =
        eval(z + c5 * s, y + s * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Complex k6 = eval(
        z + s, y + s * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Complex y_new =
        y + s * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double z_new = final_step ? z_end : z + s;
    const Complex k7 = eval(z_new, y_new);

    const Complex err_vec =
        s * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err =
        std::abs(err_vec) / scale(std::max(std::abs(y), std::abs(y_new)));

    if (err <= 1.0) {
      z = z_new;
      y = y_new;
      k1 = k7;  // first-same-as-last
      ++result.accepted_steps;
      if (observer) observer(z, y);
      if (final_step) break;
      double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
      factor = std::clamp(factor, 0.2, 5.0);
      if (last_rejected) factor = std::min(factor, 1.0);
      h *= factor;
      last_rejected = false;
    } else {
      ++result.rejected_steps;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
    }
  }
  result.y = y;
  return result;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Arithmetic and error bookkeeping for the value types the adaptive driver
// handles: scalars (double, Complex) and fixed-size vectors of doubles.
template <class T>
struct QuadTraits {
  using ErrorType = double;
  static T zero() { return T{}; }
  static void axpy(T& acc, double w, const T& v) { acc += w * v; }
  static T add(const T& x, const T& y) { return x + y; }
  static T sub(const T& x, const T& y) { return x - y; }
  static ErrorType error(const T& k, const T& g) { return std::abs(k - g); }
  static ErrorType eadd(ErrorType x, ErrorType y) { return x + y; }
  static ErrorType esub(ErrorType x, ErrorType y) { return x - y; }
  static double priority(const ErrorType& e, const T&) { return e; }
  static bool converged(const T& total, const ErrorType& err, const ToleranceSpec& tol) {
    return err <= std::max(tol.abs, tol.rel * std::abs(total));
  }
  static Complex report_value(const T& v) { return Complex(v); }
  static double report_error(const ErrorType& e) { return e; }
};

template <std::size_t N>
struct QuadTraits<std::array<double, N>> {
  using T = std::array<double, N>;
  using ErrorType = T;
  static T zero() { return T{}; }
  static void axpy(T& acc, double w, const T& v) {
    for (std::size_t i = 0; i < N; ++i) acc[i] += w * v[i];
  }
  static T add(const T& x, const T& y) {
    T r;
    for (std::size_t i = 0; i < N; ++i) r[i] = x[i] + y[i];
    return r;
  }
  static T sub(const T& x, const T& y) {
    T r;
    for (std::size_t i = 0; i < N; ++i) r[i] = x[i] - y[i];
    return r;
  }
  static ErrorType eadd(const T& x, const T& y) { return add(x, y); }
  static ErrorType esub(const T& x, const T& y) { return sub(x, y); }
  static ErrorType error(const T& k, const T& g) {
    T r;
    for (std::size_t i = 0; i < N; ++i) r[i] = std::abs(k[i] - g[i]);
    return r;
  }
  // Worst component relative to the magnitude of the first whole-range
  // estimate, so heap keys stay fixed once pushed.
  static double priority(const ErrorType& e, const T& scale) {
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      worst = std::max(worst, e[i] / std::max(std::abs(scale[i]), std::numeric_limits<double>::min()));
    return worst;
  }
  static bool converged(const T& total, const ErrorType& err, const ToleranceSpec& tol) {
    for (std::size_t i = 0; i < N; ++i)
      if (err[i] > std::max(tol.abs, tol.rel * std::abs(total[i]))) return false;
    return true;
  }
  static Complex report_value(const T& v) { return Complex(v[0]); }
  static double report_error(const ErrorType& e) { return *std::max_element(e.begin(), e.end()); }
};

template <class T>
struct Segment {
  double a, b;
  T value;
  typename QuadTraits<T>::ErrorType error;
  double priority;
  bool operator<(const Segment& other) const { return priority < other.priority; }
};

template <class T, class F>
Segment<T> gk15(const F& f, double a, double b, const T& scale) {
  using Tr = QuadTraits<T>;
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = Tr::zero();
  T gauss = Tr::zero();
  Tr::axpy(kronrod, kWgk[7] * half, fc);
  Tr::axpy(gauss, kWg[3] * half, fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const T sum = Tr::add(f(center - dx), f(center + dx));
    Tr::axpy(kronrod, kWgk[j] * half, sum);
    if (j % 2 == 1) Tr::axpy(gauss, kWg[j / 2] * half, sum);
  }
  const auto err = Tr::error(kronrod, gauss);
  return {a, b, kronrod, err, Tr::priority(err, scale)};
}

template <class T>
struct AdaptiveResult {
  T value;
  typename QuadTraits<T>::ErrorType error;
  int intervals;
};

template <class T, class F>
AdaptiveResult<T> adaptive_gk(const F& f, double a, double b, const ToleranceSpec& tol) {
  using Tr = QuadTraits<T>;
  tol.validate();
  if (!(a < b)) throw Error(ErrorKind::InvalidArgument, "quadrature: require a < b");

  std::priority_queue<Segment<T>> heap;
  auto first = gk15<T>(f, a, b, Tr::zero());
  const T scale = first.value;
  first.priority = Tr::priority(first.error, scale);
  heap.push(first);
  T total = first.value;
  auto total_error = first.error;

  auto resum = [&] {
    // Summing a copy keeps the result free of accumulated update drift.
    auto copy = heap;
    T v = Tr::zero();
    auto e = Tr::error(Tr::zero(), Tr::zero());
    while (!copy.empty()) {
      v = Tr::add(v, copy.top().value);
      e = Tr::eadd(e, copy.top().error);
      copy.pop();
    }
    total = v;
    total_error = e;
  };

  while (!Tr::converged(total, total_error, tol)) {
    if (static_cast<int>(heap.size()) >= tol.max_steps) {
      resum();
      if (Tr::converged(total, total_error, tol)) break;
      std::ostringstream msg;
      msg << "quadrature on [" << a << ", " << b << "] did not reach tolerance after "
          << heap.size() << " subintervals (error " << Tr::report_error(total_error) << ")";
      throw QuadratureError(msg.str(), Tr::report_value(total), Tr::report_error(total_error));
    }
    const Segment<T> worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      resum();
      std::ostringstream msg;
      msg << "quadrature: subinterval at " << worst.a << " cannot be split further";
      throw QuadratureError(msg.str(), Tr::report_value(total), Tr::report_error(total_error));
    }
    heap.pop();
    const auto left = gk15<T>(f, worst.a, mid, scale);
    const auto right = gk15<T>(f, mid, worst.b, scale);
    total = Tr::add(total, Tr::sub(Tr::add(left.value, right.value), worst.value));
    total_error = Tr::eadd(total_error, Tr::esub(Tr::eadd(left.error, right.error), worst.error));
    heap.push(left);
    heap.push(right);
  }
  resum();
  return {total, total_error, static_cast<int>(heap.size())};
}

}  // namespace

QuadResult quad_finite(const std::function<Complex(double)>& f, double a,
                       double b, const ToleranceSpec& tol) {
  const auto r = adaptive_gk<Complex>(f, a, b, tol);
  return {r.value, r.error, r.intervals};
}

RealQuadResult quad_finite_real(const std::function<double(double)>& f,
                                double a, double b, const ToleranceSpec& tol) {
  const auto r = adaptive_gk<double>(f, a, b, tol);
  return {r.value, r.error, r.intervals};
}

RealQuadResult quad_semi_infinite(const std::function<double(double)>& f,
                                  double a, const ToleranceSpec& tol) {
  auto mapped = [&](double u) {
    const double v = a - 1.0 + 1.0 / u;
    return f(v) / (u * u);
  };
  return quad_finite_real(mapped, 0.0, 1.0, tol);
}

Quad4Result quad_semi_infinite4(const std::function<Vec4(double)>& f, double a,
                                const ToleranceSpec& tol) {
  auto mapped = [&](double u) {
    const double v = a - 1.0 + 1.0 / u;
    Vec4 y = f(v);
    for (double& c : y) c /= u * u;
    return y;
  };
  const auto r = adaptive_gk<Vec4>(mapped, 0.0, 1.0, tol);
  return {r.value, r.error, r.intervals};
}

// ---------------------------------------------------------------------------

std::vector<double> bracketing_grid(double lo, double hi, int points_per_decade) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorKind::InvalidArgument, "bracketing grid: require finite lo < hi");
  std::vector<double> grid;
  if (lo > 0.0) {
    const double decades = std::log10(hi / lo);
    const int cells = std::max(16, static_cast<int>(std::ceil(points_per_decade * decades)));
    grid.reserve(cells + 1);
    for (int i = 0; i <= cells; ++i)
      grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / cells));
  } else {
    constexpr int cells = 256;
    grid.reserve(cells + 1);
    for (int i = 0; i <= cells; ++i)
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) / cells);
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

MaximumResult maximize_scalar(const std::function<double(double)>& f,
                              double lo, double hi, const ToleranceSpec& tol,
                              int points_per_decade) {
  tol.validate();
  const auto grid = bracketing_grid(lo, hi, points_per_decade);
  const std::size_t n = grid.size();
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f(grid[i]);
    values[i] = std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (values[i] > values[i - 1] && values[i] >= values[i + 1] &&
        (best == 0 || values[i] > values[best]))
      best = i;
  }
  if (best == 0) {
    std::ostringstream msg;
    msg << "no interior maximum on [" << lo << ", " << hi << "]";
    throw Error(ErrorKind::NoInteriorMaximum, msg.str());
  }
  if (best == 1 || best == n - 2) {
    std::ostringstream msg;
    msg << "maximum near " << grid[best] << " merges with the boundary of [" << lo
        << ", " << hi << "]";
    throw Error(ErrorKind::NoInteriorMaximum, msg.str());
  }

  constexpr double inv_phi = 0.6180339887498949;
  double a = grid[best - 1];
  double b = grid[best + 1];
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int iter = 0; iter < tol.max_steps; ++iter) {
    const double mid = 0.5 * (a + b);
    if (b - a <= tol.rel * std::abs(mid) + tol.abs) break;
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

// ---------------------------------------------------------------------------

Complex bessel_I(double nu, Complex z) {
  if (!std::isfinite(nu) || (nu < 0.0 && nu == std::round(nu)))
    throw Error(ErrorKind::InvalidArgument, "bessel_I: order must be real and not a negative integer");
  if (!finite(z)) throw Error(ErrorKind::InvalidArgument, "bessel_I: argument not finite");
  if (std::abs(z) > kBesselSeriesRadius) {
    std::ostringstream msg;
    msg << "bessel_I: |z| = " << std::abs(z) << " exceeds series radius "
        << kBesselSeriesRadius;
    throw Error(ErrorKind::SeriesNotConverged, msg.str());
  }
  if (z == Complex(0.0)) {
    if (nu > 0.0) return 0.0;
    if (nu == 0.0) return 1.0;
    throw Error(ErrorKind::DomainError, "bessel_I: negative order diverges at z = 0");
  }

  constexpr int kMaxTerms = 500;
  const Complex half = 0.5 * z;
  const Complex w = half * half;
  Complex term = std::pow(half, nu) / std::tgamma(nu + 1.0);
  Complex sum = term;
  double magnitude_sum = std::abs(term);
  for (int k = 0; k < kMaxTerms; ++k) {
    term *= w / ((k + 1.0) * (k + 1.0 + nu));
    sum += term;
    magnitude_sum += std::abs(term);
    if (k + 1 > std::abs(half) && std::abs(term) <= 1e-17 * std::abs(sum)) {
      if (magnitude_sum * std::numeric_limits<double>::epsilon() > 1e-9 * std::abs(sum)) {
        std::ostringstream msg;
        msg << "bessel_I: cancellation in series at z=" << z << " exceeds 1e-9";
        throw Error(ErrorKind::SeriesNotConverged, msg.str());
      }
      return sum;
    }
  }
  throw Error(ErrorKind::SeriesNotConverged, "bessel_I: term cap reached");
}

}  // namespace qreflect
