#include <cmath>
#include <vector>

#include "doctest.h"
#include "qreflect/constants.hpp"
#include "qreflect/error.hpp"
#include "qreflect/grating.hpp"

using namespace qreflect;

namespace {

constexpr double kC3 = 8.1296e-49;
constexpr double kC4 = 1.1778e-55;
constexpr double kMass = constants::argon_mass;

const GratingGeometry kPaper{1000e-9, 500e-9, 1000e-9, 1};

GratingGeometry with_slits(int N) {
  auto g = kPaper;
  g.N = N;
  return g;
}

PatternSpec spec_around(double theta, double centre, double half_width, int points, double K) {
  PatternSpec s;
  s.theta = theta;
  s.K = K;
  for (int i = 0; i < points; ++i) s.alpha_grid.push_back(centre - half_width + 2 * half_width * i / (points - 1));
  return s;
}

// Alphas of local maxima above frac * global maximum.
std::vector<double> principal_peaks(const std::vector<PatternPoint>& pts, double frac) {
  double top = 0;
  for (auto& p : pts) top = std::max(top, p.intensity);
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i)
    if (pts[i].intensity > frac * top && pts[i].intensity >= pts[i - 1].intensity &&
        pts[i].intensity > pts[i + 1].intensity)
      out.push_back(pts[i].alpha);
  return out;
}

double mean_spacing(const std::vector<double>& peaks) {
  return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

}  // namespace

TEST_CASE("geometry") {
  CHECK(kPaper.theta_max() == std::atan(0.5));
  CHECK(kPaper.theta_max() == doctest::Approx(0.46365).epsilon(1e-5));
  auto g0 = geometry_at(kPaper, 0.0);
  CHECK(g0.p == kPaper.p0);
  CHECK(g0.a == 0.0);
  CHECK(g0.o == kPaper.p0 - kPaper.w);
  CHECK_FALSE(g0.closed);
  auto gm = geometry_at(kPaper, kPaper.theta_max());
  CHECK(std::abs(gm.o) < 1e-22);
  CHECK(geometry_at(kPaper, 0.5).closed);
  CHECK_THROWS_AS(geometry_at(kPaper, -0.1), Error);
  CHECK_THROWS_AS(geometry_at({1e-6, 2e-6, 1e-6, 1}, 0.1), Error);
}

TEST_CASE("transmission rate") {
  CHECK(transmission_rate(kPaper, 0.0) == 0.5);
  CHECK(transmission_rate(kPaper, kPaper.theta_max()) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(transmission_rate(kPaper, 0.1) == doctest::Approx(0.5 - std::tan(0.1)).epsilon(1e-14));
  CHECK(transmission_rate(kPaper, 0.1) == doctest::Approx(0.39966).epsilon(1e-5));
  for (int i = 0; i <= 40; ++i) {
    const double theta = kPaper.theta_max() * i / 40.0;
    const auto g = geometry_at(kPaper, theta);
    CHECK(transmission_rate(kPaper, theta) == std::max(0.0, g.o / g.p));
  }
  try {
    transmission_rate(kPaper, 0.47);
    FAIL("expected ThetaPastMax");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ThetaPastMax);
  }
}

TEST_CASE("reflection rate factorises") {
  const auto wall = PotentialModel::intermediate(kC3, kC4);
  const double theta = 0.3;
  auto rr = reflection_rate(kPaper, theta, kMass, 1.0, wall);
  CHECK(rr.geometric_factor == std::tan(theta));
  CHECK(rr.v_perp == std::sin(theta));
  const auto direct = riccati_reflection(wall, BeamSpec::make(kMass, std::sin(theta)));
  CHECK(rr.abs_r == std::abs(direct.r));
  CHECK(rr.rate == rr.abs_r * rr.geometric_factor);
  CHECK_THROWS_AS(reflection_rate(kPaper, 0.0, kMass, 1.0, wall), Error);
  CHECK_THROWS_AS(reflection_rate(kPaper, kPaper.theta_max(), kMass, 1.0, wall), Error);
}

TEST_CASE("reflection rate trends and R + T < 1") {
  const auto wall = PotentialModel::intermediate(kC3, kC4);
  const std::vector<double> velocities{0.1, 1.0, 10.0, 20.0};
  for (double v : velocities) {
    for (int i = 1; i < 10; ++i) {
      const double theta = kPaper.theta_max() * i / 10.0;
      const double R = reflection_rate(kPaper, theta, kMass, v, wall).rate;
      CHECK(R > 0.0);
      CHECK(R + transmission_rate(kPaper, theta) < 1.0);
    }
  }
  double previous = 1.0;
  for (double v : velocities) {
    const double R = reflection_rate(kPaper, 0.4, kMass, v, wall).rate;
    CHECK(R < previous);
    previous = R;
  }
  CHECK(reflection_rate(kPaper, 1e-4, kMass, 1.0, wall).rate < 1e-4);
}

TEST_CASE("reflected pattern") {
  const double K = BeamSpec::make(kMass, 1.0).wave_number();
  const auto geom = with_slits(10);
  const double theta = 0.25;  // dyadic, so alpha - 2 theta is exact below
  PatternSpec spec;
  spec.theta = theta;
  spec.K = K;
  spec.I0 = 1.7;
  const double step = std::ldexp(1.0, -16);
  for (int k = -2000; k <= 2000; ++k) spec.alpha_grid.push_back(2 * theta + k * step);
  const double rate = 0.013;
  auto pts = pattern_reflected(spec, geom, rate, Execution::Serial);
  REQUIRE(pts.size() == spec.alpha_grid.size());
  for (int k = 1; k <= 2000; ++k) {
    const double up = pts[2000 + k].intensity, down = pts[2000 - k].intensity;
    CHECK(std::abs(up - down) <= 1e-10 * std::max(std::abs(up), 1e-300));
  }
  const double w_diff = K * geom.d * std::sin(theta) / 2;
  const double limit = spec.I0 * rate * rate * geom.N * geom.N * w_diff * w_diff;
  CHECK(std::abs(pts[2000].intensity / limit - 1.0) < 1e-9);
  CHECK(std::abs(reflected_intensity(2 * theta + 1e-12, spec, geom, rate) / limit - 1.0) < 1e-6);

  auto par = pattern_reflected(spec, geom, rate, Execution::Parallel);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(par[i].intensity == pts[i].intensity);

  auto zero = pattern_reflected(spec, geom, 0.0, Execution::Serial);
  for (auto& p : zero) CHECK(p.intensity == 0.0);
  CHECK_THROWS_AS(pattern_reflected(spec, geom, 1.5), Error);
}

TEST_CASE("reflected pattern peak spacing") {
  const auto geom = with_slits(100);
  // Many slits: the envelope pulls the sampled maxima by O(1/N^2).
  const double theta = 0.3;
  const double K = BeamSpec::make(kMass, 1.0).wave_number();
  const double expected = 2 * constants::pi / (K * geom.p0 * std::cos(theta));
  const int points = 6001;
  auto spec = spec_around(theta, 2 * theta, 0.03, points, K);
  const double cell = 0.06 / (points - 1);
  auto peaks = principal_peaks(pattern_reflected(spec, geom, 0.01), 0.5);
  REQUIRE(peaks.size() >= 3);
  CHECK(std::abs(mean_spacing(peaks) - expected) <= cell);

  auto doubled = spec_around(theta, 2 * theta, 0.015, points, 2 * K);
  auto peaks2 = principal_peaks(pattern_reflected(doubled, geom, 0.01), 0.5);
  REQUIRE(peaks2.size() >= 3);
  CHECK(std::abs(mean_spacing(peaks2) - expected / 2) <= cell / 2);
}

TEST_CASE("transmitted pattern without dispersion force") {
  const auto geom = with_slits(5);
  const double theta = 0.1;
  const double K = BeamSpec::make(kMass, 1.0).wave_number();
  auto spec = spec_around(theta, 0.0, 0.02, 801, K);
  spec.I0 = 0.8;
  auto res = pattern_transmitted(spec, geom, 0.0, 1.0, 0.0);
  CHECK(res.edge_cut == 0.0);
  const double w_t = geometry_at(geom, theta).o;
  const double u_scale = K * geom.p0 * std::cos(theta) / 2;
  double top = 0;
  for (auto& p : res.points) top = std::max(top, p.intensity);
  for (auto& p : res.points) {
    const double kt = K * std::tan(p.alpha);
    const double env = kt == 0.0 ? w_t * w_t : 4 * std::pow(std::sin(kt * w_t / 2), 2) / (kt * kt);
    const double su = std::sin(u_scale * std::tan(p.alpha));
    const double nfac = su == 0.0 ? 25.0 : std::pow(std::sin(5 * u_scale * std::tan(p.alpha)) / su, 2);
    const double expected = spec.I0 * K * K / 4 * nfac * env;
    CHECK(std::abs(p.intensity - expected) <= 1e-8 * expected + 1e-12 * top);
  }
  const auto& centre = res.points[400];
  CHECK(centre.alpha == 0.0);
  CHECK(centre.intensity == doctest::Approx(spec.I0 * K * K / 4 * 25 * w_t * w_t).epsilon(1e-10));
}

TEST_CASE("transmitted pattern with dispersion force") {
  const auto geom = with_slits(1);
  const double theta = 0.0;
  const double v_z = 1.0;
  const double K = BeamSpec::make(kMass, v_z).wave_number();
  auto spec = spec_around(theta, 0.0, 0.1, 2001, K);
  auto free = pattern_transmitted(spec, geom, 0.0, v_z, 0.0);
  auto cp = pattern_transmitted(spec, geom, kC3, v_z);
  CHECK(cp.edge_cut == doctest::Approx(default_edge_cut(kC3, geom.d, v_z)).epsilon(1e-15));
  CHECK(cp.edge_cut > 0.0);
  CHECK(cp.edge_cut < 0.25 * geometry_at(geom, theta).o);
  CHECK(cp.edge_cut_sensitivity > 0.0);
  auto integrate = [](const std::vector<PatternPoint>& pts) {
    double sum = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      sum += 0.5 * (pts[i].intensity + pts[i - 1].intensity) * (pts[i].alpha - pts[i - 1].alpha);
    return sum;
  };
  CHECK(integrate(cp.points) < integrate(free.points));

  auto serial = pattern_transmitted(spec, geom, kC3, v_z, -1.0, {1e-10, 0.0, 100000}, Execution::Serial);
  for (std::size_t i = 0; i < serial.points.size(); ++i) CHECK(serial.points[i].intensity == cp.points[i].intensity);

  try {
    pattern_transmitted(spec, geom, kC3, v_z, 200e-9);
    FAIL("expected EdgeCutTooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EdgeCutTooLarge);
  }
  CHECK_THROWS_AS(pattern_transmitted(spec, geom, kC3, v_z, 0.0), Error);
  CHECK(default_edge_cut(0.0, geom.d, v_z) == 0.0);
}
