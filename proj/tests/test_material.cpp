#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qreflect/constants.hpp"
#include "qreflect/error.hpp"
#include "qreflect/material.hpp"

using namespace qreflect;

namespace {

const std::string data_dir = QREFLECT_DATA_DIR;

OpticalResponse bundled_alpha() { return OpticalResponse::load(data_dir + "/argon_metastable_polarizability.txt"); }
OpticalResponse bundled_eps() { return OpticalResponse::load(data_dir + "/silicon_nitride_permittivity.txt"); }

std::string parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    OpticalResponse::parse(in, "mem");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) return e.what();
    return std::string("wrong kind: ") + e.what();
  }
  return "no error";
}

// Composite Simpson on v = 1/u over u in (0, 1], very fine grid.
double c4_integral_simpson(double e) {
  auto f = [e](double v) {
    const double root = std::sqrt(v * v - 1 + e);
    return (2 / (v * v) - 1 / std::pow(v, 4)) * (e * v - root) / (e * v + root) -
           (1 / std::pow(v, 4)) * (v - root) / (v + root);
  };
  auto g = [&](double u) { return u == 0 ? 2 * (e - 1) / (e + 1) : f(1 / u) / (u * u); };
  const int n = 200000;
  double sum = g(0) + g(1);
  for (int i = 1; i < n; ++i) sum += g(static_cast<double>(i) / n) * (i % 2 ? 4 : 2);
  return sum / (3.0 * n);
}

}  // namespace

TEST_CASE("matsubara frequencies") {
  CHECK(matsubara_frequency(300, 0) == 0.0);
  CHECK(matsubara_frequency(300, 1) == doctest::Approx(246779025515306.06).epsilon(1e-14));
  CHECK(matsubara_frequency(600, 1) == doctest::Approx(2 * matsubara_frequency(300, 1)).epsilon(1e-15));
}

TEST_CASE("oscillator responses") {
  auto a = OpticalResponse::oscillator_model(ResponseQuantity::Polarizability, {{4.0, 2.0, 0.5}});
  CHECK(a.at(0) == 1.0);
  CHECK(a.at(1e12) < 1e-23);
  CHECK(a.at(3.0) == doctest::Approx(4.0 / (4 + 9 + 1.5)));
  auto e = OpticalResponse::oscillator_model(ResponseQuantity::Permittivity, {{4.0, 2.0, 0.0}});
  CHECK(e.at(0) == 2.0);
  CHECK(e.at(1e12) == doctest::Approx(1.0));
}

TEST_CASE("tabulated responses") {
  auto t = OpticalResponse::tabulated(ResponseQuantity::Permittivity, 8.0, {{1.0, 6.0}, {3.0, 2.0}});
  CHECK(t.at(0) == 8.0);
  CHECK(t.at(2.0) == doctest::Approx(4.0));
  CHECK(t.at(2.0) <= 6.0);
  CHECK(t.at(2.0) >= 2.0);
  CHECK(t.at(6.0) == doctest::Approx(1.0 + 1.0 / 4));
  CHECK_THROWS_AS(t.at(0.5), Error);
  CHECK_THROWS_AS(t.at(-1.0), Error);
  auto a = OpticalResponse::tabulated(ResponseQuantity::Polarizability, 3.0, {{1.0, 2.0}, {2.0, 1.0}});
  CHECK(a.at(4.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(OpticalResponse::tabulated(ResponseQuantity::Permittivity, 8.0, {{2.0, 6.0}, {1.0, 2.0}}), Error);
  CHECK_THROWS_AS(OpticalResponse::tabulated(ResponseQuantity::Permittivity, 8.0, {{1.0, 6.0}, {2.0, 7.0}}), Error);
}

TEST_CASE("material file parsing") {
  auto alpha = bundled_alpha();
  CHECK(alpha.kind() == ResponseKind::Oscillator);
  CHECK(alpha.static_value() == doctest::Approx(5.7247575253e-39).epsilon(1e-9));
  auto eps = bundled_eps();
  CHECK(eps.static_value() == doctest::Approx(7.6).epsilon(1e-12));

  std::istringstream grid("quantity permittivity\nkind grid\nstatic_value 5\ngrid 1e14 4 # note\ngrid 1e15 2\n");
  auto g = OpticalResponse::parse(grid, "mem");
  CHECK(g.grid().size() == 2);

  CHECK(parse_error("kind oscillator\nquantity polarizability\nstatic_value 1\noscillator 1 1 x\n").find("mem:4") == 0);
  CHECK(parse_error("quantity permittivity\nkind grid\nstatic_value 2\noscillator 1 1 0\n").find("mem:4") == 0);
  CHECK(parse_error("quantity permittivity\nkind oscillator\nstatic_value 3\noscillator 1 1 0\n").find("disagrees") !=
        std::string::npos);
  CHECK(parse_error("quantity permittivity\nkind oscillator\n").find("static_value") != std::string::npos);
  CHECK(parse_error("colour blue\n").find("mem:1") == 0);
  CHECK(parse_error("quantity permittivity\nkind grid\nstatic_value 2\ngrid 1 3\n") != "no error");
}

TEST_CASE("C3 vanishing cases") {
  ThermalConfig th{300, 200};
  auto eps = bundled_eps();
  auto zero_alpha = OpticalResponse::constant(ResponseQuantity::Polarizability, 0.0);
  CHECK(c3_coefficient(zero_alpha, eps, th).value == 0.0);
  auto vacuum = OpticalResponse::constant(ResponseQuantity::Permittivity, 1.0);
  CHECK(c3_coefficient(bundled_alpha(), vacuum, th).value == 0.0);
}

TEST_CASE("C3 bundled data and truncation") {
  auto alpha = bundled_alpha();
  auto eps = bundled_eps();
  auto r = c3_coefficient(alpha, eps, {300, 2000});
  MESSAGE("C3 = " << r.value << " (reference 8.1296e-49), tail " << r.tail_estimate);
  CHECK(r.value > 0);
  CHECK(std::abs(std::log10(r.value / 8.1296e-49)) < 1.0);
  CHECK(r.terms == 2001);
  auto r2 = c3_coefficient(alpha, eps, {300, 4000});
  CHECK(std::abs(r2.value - r.value) < r.tail_estimate);
  CHECK(r.tail_estimate < 1e-3 * r.value);
  CHECK(r.truncation_warning == (r.last_term_ratio > kTruncationWarningRatio));
  auto coarse = c3_coefficient(alpha, eps, {300, 10});
  CHECK(coarse.truncation_warning);
}

TEST_CASE("C3 serial and parallel agree bitwise") {
  auto alpha = bundled_alpha();
  auto eps = bundled_eps();
  auto s = c3_coefficient(alpha, eps, {300, 3000}, Execution::Serial);
  auto p = c3_coefficient(alpha, eps, {300, 3000}, Execution::Parallel);
  CHECK(s.value == p.value);
  CHECK(s.tail_estimate == p.tail_estimate);
}

TEST_CASE("C3 temperature linearity with constant responses") {
  auto alpha = OpticalResponse::constant(ResponseQuantity::Polarizability, 3e-39);
  auto eps = OpticalResponse::constant(ResponseQuantity::Permittivity, 5.0);
  auto a = c3_coefficient(alpha, eps, {300, 50});
  auto b = c3_coefficient(alpha, eps, {600, 50});
  CHECK(b.value == 2 * a.value);
  CHECK(std::isinf(a.tail_estimate));
}

TEST_CASE("C3 monotone in polarizability oscillator strength") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> log_s(-10, -6), log_w(14.5, 16.5), scale(1.01, 3.0);
  auto eps = bundled_eps();
  for (int trial = 0; trial < 20; ++trial) {
    const double s = std::pow(10, log_s(rng));
    const double w = std::pow(10, log_w(rng));
    auto lo = OpticalResponse::oscillator_model(ResponseQuantity::Polarizability, {{s, w, 0}});
    auto hi = OpticalResponse::oscillator_model(ResponseQuantity::Polarizability, {{s * scale(rng), w, 0}});
    CHECK(c3_coefficient(hi, eps, {300, 500}).value >= c3_coefficient(lo, eps, {300, 500}).value);
  }
}

TEST_CASE("C4 coefficient") {
  CHECK(c4_fresnel_integral(1.0) == 0.0);
  CHECK(c4_fresnel_integral(1e12) == doctest::Approx(2.0).epsilon(1e-5));
  for (double e : {1.5, 7.6, 1e6}) CHECK(c4_fresnel_integral(e) == doctest::Approx(c4_integral_simpson(e)).epsilon(1e-8));

  double previous = 0.0;
  for (double e = 1.25; e <= 20.0; e += 0.25) {
    const double v = c4_fresnel_integral(e);
    CHECK(v > previous);
    previous = v;
  }

  const double c4 = c4_coefficient(bundled_alpha().static_value(), bundled_eps().static_value());
  MESSAGE("C4 = " << c4 << " (reference 1.1778e-55)");
  CHECK(std::abs(std::log10(c4 / 1.1778e-55)) < 1.0);
  CHECK_THROWS_AS(c4_coefficient(-1.0, 2.0), Error);
  CHECK_THROWS_AS(c4_coefficient(1e-39, 0.5), Error);
}
