#include <cmath>

#include "doctest.h"
#include "qreflect/badlands.hpp"
#include "qreflect/constants.hpp"
#include "qreflect/error.hpp"

using namespace qreflect;

namespace {

constexpr double kC3 = 8.1296e-49;
constexpr double kC4 = 1.1778e-55;
constexpr double kMass = constants::argon_mass;

int count_local_maxima(const PotentialModel& U, const BeamSpec& beam, double lo, double hi) {
  const auto grid = bracketing_grid(lo, hi, 64);
  std::vector<double> b;
  for (double z : grid) b.push_back(std::abs(badlands_B(U, beam, z)));
  int count = 0;
  for (std::size_t i = 1; i + 1 < b.size(); ++i)
    if (b[i] > b[i - 1] && b[i] >= b[i + 1]) ++count;
  return count;
}

}  // namespace

TEST_CASE("local momentum") {
  const auto beam = BeamSpec::make(kMass, 0.3);
  auto flat = PotentialModel::constant(0.0);
  auto j = local_momentum(flat, beam, 1e-7);
  CHECK(j.p == doctest::Approx(kMass * 0.3).epsilon(1e-15));
  CHECK(j.dp == 0.0);
  CHECK(j.d2p == 0.0);

  auto nr = PotentialModel::non_retarded(kC3);
  for (double z : {1e-9, 1e-8, 1e-7}) CHECK(local_momentum(nr, beam, z).p > kMass * 0.3);

  const double z = 37e-9, h = z * 1e-5;
  auto jz = local_momentum(nr, beam, z);
  const double fd = (local_momentum(nr, beam, z + h).p - local_momentum(nr, beam, z - h).p) / (2 * h);
  CHECK(std::abs(fd / jz.dp - 1) < 1e-8);
  const double fd3 = (local_momentum(nr, beam, z + h).d2p - local_momentum(nr, beam, z - h).d2p) / (2 * h);
  CHECK(std::abs(fd3 / jz.d3p - 1) < 1e-7);

  auto barrier = PotentialModel::constant(1.0);
  CHECK_THROWS_AS(local_momentum(barrier, beam, 1e-7), Error);
}

TEST_CASE("badlands function") {
  const auto beam = BeamSpec::make(kMass, 0.1);
  CHECK(badlands_B(PotentialModel::constant(-1e-30), beam, 1e-7) == 0.0);
  auto nr = PotentialModel::non_retarded(kC3);
  CHECK(std::abs(badlands_B(nr, beam, 1e-11)) < 1e-3 * std::abs(badlands_B(nr, beam, 1e-8)));
  auto ret = PotentialModel::retarded(kC4);
  CHECK(count_local_maxima(ret, beam, 0.1e-9, 1e-5) == 1);

  SUBCASE("derivative of |B| matches finite differences") {
    auto u = PotentialModel::intermediate(kC3, kC4);
    for (double z : {10e-9, 60e-9, 400e-9}) {
      const double h = z * 1e-5;
      const double fd = (std::abs(badlands_B(u, beam, z + h)) - std::abs(badlands_B(u, beam, z - h))) / (2 * h);
      CHECK(std::abs(fd / badlands_abs_derivative(u, beam, z) - 1) < 1e-6);
    }
  }
}

TEST_CASE("numeric reflection point") {
  const auto beam = BeamSpec::make(kMass, 1.0);
  auto ret = PotentialModel::retarded(kC4);
  auto r = reflection_point_numeric(ret, beam);
  REQUIRE(r.exists);
  CHECK(r.method == ReflectionMethod::NumericMax);
  CHECK(r.z_r == doctest::Approx(std::pow(kC4 / beam.energy(), 0.25)).epsilon(1e-7));
  // regression baseline pinned from the first verified run
  CHECK(r.z_r == doctest::Approx(3.5851e-8).epsilon(1e-4));

  CHECK_FALSE(reflection_point_numeric(PotentialModel::constant(0.0), beam).exists);

  // the analytic d|B|/dz vanishes at the maximum
  auto u = PotentialModel::intermediate(kC3, kC4);
  auto ri = reflection_point_numeric(u, beam);
  REQUIRE(ri.exists);
  const double scale = ri.B_at_max / ri.z_r;
  CHECK(std::abs(badlands_abs_derivative(u, beam, ri.z_r)) <= 1e-6 * scale);
}

TEST_CASE("closed-form reflection points") {
  const auto beam = BeamSpec::make(kMass, 0.1);
  const double E = beam.energy();
  auto nr = reflection_point_powerlaw(-3, -kC3, 0.0, beam);
  CHECK(nr.method == ReflectionMethod::ClosedFormGeneral);
  CHECK(nr.z_r == doctest::Approx(std::cbrt(kC3 / (4 * E * (3 * std::sqrt(6.0) - 7)))).epsilon(1e-12));

  auto ret = reflection_point_powerlaw(-4, -kC4, 0.0, beam);
  CHECK(ret.method == ReflectionMethod::ClosedFormSpecial);
  CHECK(ret.z_r == doctest::Approx(std::pow(kC4 / E, 0.25)).epsilon(1e-12));
  CHECK(reflection_point_alternative_special(-4, -kC4, 0.0, beam) ==
        doctest::Approx(std::pow(7 * kC4 / (3 * E), 0.25)).epsilon(1e-12));

  const double lam2 = -1e-60;
  auto inv_sq = reflection_point_powerlaw(-2, lam2, 0.0, beam);
  // q z_r = sqrt(Gamma) / 2 with Gamma = 2 m |lambda| / hbar^2
  const double q = beam.wave_number();
  const double gamma = 2 * kMass * std::abs(lam2) / (constants::hbar * constants::hbar);
  CHECK(q * inv_sq.z_r == doctest::Approx(std::sqrt(gamma) / 2).epsilon(1e-12));

  for (int n : {-5, -6, -7}) CHECK_NOTHROW(reflection_point_powerlaw(n, -1e-70, 0.0, beam));

  CHECK_THROWS_AS(reflection_point_powerlaw(-1, -1e-40, 0.0, beam), Error);
  try {
    reflection_point_powerlaw(-1, -1e-40, 0.0, beam);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoRealRoot);
  }
}

TEST_CASE("energy scaling of the reflection point") {
  const auto b1 = BeamSpec::make(kMass, 0.2);
  const auto b2 = BeamSpec::make(kMass, 0.2 * std::sqrt(2.0));
  for (int n : {-3, -4, -6}) {
    const double lam = n == -3 ? -kC3 : (n == -4 ? -kC4 : -1e-70);
    const auto c1 = reflection_point_powerlaw(n, lam, 0, b1, false);
    const auto c2 = reflection_point_powerlaw(n, lam, 0, b2, false);
    CHECK(c2.z_r / c1.z_r == doctest::Approx(std::pow(2.0, 1.0 / n)).epsilon(1e-13));
    const auto U = PotentialModel::power_law(lam, n);
    const auto n1 = reflection_point_numeric(U, b1, c1.z_r / 100, c1.z_r * 100);
    const auto n2 = reflection_point_numeric(U, b2, c1.z_r / 100, c1.z_r * 100);
    CHECK(n2.z_r / n1.z_r == doctest::Approx(std::pow(2.0, 1.0 / n)).epsilon(1e-6));
    CHECK(n1.B_at_max == doctest::Approx(c1.B_at_max).epsilon(1e-6));
  }
}

TEST_CASE("intermediate reflection distance decreases with velocity") {
  auto u = PotentialModel::intermediate(kC3, kC4);
  double previous = INFINITY;
  for (double v = 1e-3; v <= 10; v *= 2) {
    auto r = reflection_point_numeric(u, BeamSpec::make(kMass, v));
    REQUIRE(r.exists);
    CHECK(r.z_r < previous);
    previous = r.z_r;
  }
}

TEST_CASE("breakdown scan") {
  std::vector<double> broad;
  for (double v = 1e-3; v <= 10; v *= 1.5) broad.push_back(v);
  auto single = breakdown_scan(PotentialModel::intermediate(kC3, kC4), kMass, broad);
  for (const auto& s : single.samples) CHECK(s.point.exists);

  std::vector<double> fine;
  for (int i = 0; i <= 400; ++i) fine.push_back(0.01 + 1e-4 * i);
  auto wall = PotentialModel::double_wall(PotentialModel::intermediate(kC3, kC4), 500e-9);
  auto scan = breakdown_scan(wall, kMass, fine);
  REQUIRE(scan.breakdown_velocity);
  CHECK(*scan.breakdown_velocity > fine.front());
  MESSAGE("breakdown at v=" << *scan.breakdown_velocity << " z=" << *scan.breakdown_distance);

  auto serial = breakdown_scan(wall, kMass, fine, Execution::Serial);
  for (std::size_t i = 0; i < fine.size(); ++i) {
    CHECK(serial.samples[i].point.exists == scan.samples[i].point.exists);
    CHECK(serial.samples[i].point.z_r == scan.samples[i].point.z_r);
  }

  double previous = INFINITY;
  for (double L : {0.5e-6, 1e-6, 2e-6}) {
    std::vector<double> grid;
    for (double v = 1e-3; v <= 0.1; v *= 1.02) grid.push_back(v);
    auto s = breakdown_scan(PotentialModel::double_wall(PotentialModel::intermediate(kC3, kC4), L), kMass, grid);
    REQUIRE(s.breakdown_velocity);
    CHECK(*s.breakdown_velocity < previous);
    previous = *s.breakdown_velocity;
  }

  CHECK_THROWS_AS(breakdown_scan(wall, kMass, {0.2, 0.1}), Error);
}
