#pragma once

// Surface potentials U(z) with derivatives up to third order, and the beam
// kinematics they act on. z is the distance from the surface in metres.

#include <array>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qreflect/material.hpp"
#include "qreflect/numerics.hpp"

namespace qreflect {

/// U and its first three derivatives at one point.
using PotentialJet = std::array<double, 4>;

struct BeamSpec {
  double mass = 0.0;    // kg
  double v_perp = 0.0;  // m/s

  static BeamSpec make(double mass, double v_perp);  // validates
  double energy() const;       // E = m v^2 / 2
  double wave_number() const;  // K = m v / hbar
};

/// Fresnel coefficients on the imaginary frequency axis.
struct FresnelPair {
  double r_s = 0.0;
  double r_p = 0.0;
};
FresnelPair fresnel_rs_rp(double k_par, double xi, double eps_at_xi);

/// The full thermal Casimir-Polder potential. Matsubara frequencies and
/// the responses at them are computed once at construction.
///
/// For n >= 1 the k-integral is rewritten with kappa = k0 + t/(2z),
/// k0 = xi/c, which pulls out exp(-2 k0 z) and leaves a smooth integrand in
/// t weighted by exp(-t). The n = 0 term is its xi -> 0 limit,
/// -(k_B T / 16 pi eps0) alpha(0) (eps(0)-1)/(eps(0)+1) / z^3.
/// Outside [kMinDistance, kMaxDistance] evaluation is refused below and
/// clamped to -C4/z^4 above.
class CasimirPolderModel {
 public:
  static constexpr double kMinDistance = 0.1e-9;
  static constexpr double kMaxDistance = 100e-6;

  CasimirPolderModel(OpticalResponse alpha, OpticalResponse eps, ThermalConfig thermal,
                     ToleranceSpec quad_tol = {1e-11, 0.0, 2000});

  PotentialJet jet(double z, Execution execution = Execution::Parallel) const;

  const OpticalResponse& alpha() const { return alpha_; }
  const OpticalResponse& eps() const { return eps_; }
  const ThermalConfig& thermal() const { return thermal_; }
  double c4_clamp() const { return c4_; }

 private:
  struct Term {
    double k0;     // xi_n / c
    double alpha;  // alpha(i xi_n)
    double eps;    // eps(i xi_n)
  };
  PotentialJet term_jet(const Term& term, double z) const;

  OpticalResponse alpha_;
  OpticalResponse eps_;
  ThermalConfig thermal_;
  ToleranceSpec quad_tol_;
  double static_coefficient_ = 0.0;  // n = 0 term is -static_coefficient_/z^3
  double c4_ = 0.0;
  std::vector<Term> terms_;
};

class PotentialModel;

namespace potentials {

/// U1 for z < 0, U2 for z >= 0.
struct Step {
  double U1 = 0.0, U2 = 0.0;
};
/// lambda z^n + U0.
struct PowerLaw {
  double lambda = 0.0;
  int n = 1;
  double U0 = 0.0;
};
struct NonRetarded {
  double C3 = 0.0;
};
struct Retarded {
  double C4 = 0.0;
};
/// -C4 / (z^3 (z + C4/C3)).
struct Intermediate {
  double C3 = 0.0, C4 = 0.0;
};
struct CasimirPolderFull {
  std::shared_ptr<const CasimirPolderModel> model;
};
/// inner(z) + inner(L - z).
struct DoubleWall {
  std::shared_ptr<const PotentialModel> inner;
  double L = 0.0;
};
/// inner(shift - z): the surface seen from the other side, shifted.
struct Flipped {
  std::shared_ptr<const PotentialModel> inner;
  double shift = 0.0;
};

}  // namespace potentials

class PotentialModel {
 public:
  using Variant = std::variant<potentials::Step, potentials::PowerLaw, potentials::NonRetarded,
                               potentials::Retarded, potentials::Intermediate,
                               potentials::CasimirPolderFull, potentials::DoubleWall,
                               potentials::Flipped>;

  static PotentialModel step(double U1, double U2);
  static PotentialModel power_law(double lambda, int n, double U0 = 0.0);
  static PotentialModel constant(double U0) { return power_law(0.0, 1, U0); }
  static PotentialModel non_retarded(double C3);
  static PotentialModel retarded(double C4);
  static PotentialModel intermediate(double C3, double C4);
  static PotentialModel casimir_polder(std::shared_ptr<const CasimirPolderModel> model);
  static PotentialModel double_wall(const PotentialModel& inner, double L);
  static PotentialModel flipped(const PotentialModel& inner, double shift);

  /// U(z). DomainError where the variant is singular or outside its window.
  double evaluate(double z) const { return jet(z)[0]; }
  /// d^order U / dz^order for order 0..3.
  double derivative(double z, int order) const;
  PotentialJet jet(double z) const;

  const Variant& variant() const { return variant_; }
  std::string name() const;

 private:
  explicit PotentialModel(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

}  // namespace qreflect
