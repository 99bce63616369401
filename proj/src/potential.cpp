#include "qreflect/potential.hpp"

#include <cmath>
#include <sstream>

#include "qreflect/constants.hpp"
#include "qreflect/error.hpp"

namespace qreflect {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << what << " must be positive and finite (got " << value << ")";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
}

void require_distance(double z, const char* variant) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    std::ostringstream msg;
    msg << variant << " potential is singular at z=" << z << " (need z > 0)";
    throw Error(ErrorKind::DomainError, msg.str());
  }
}

/// d^k/dz^k of coeff * z^p for k = 0..3.
PotentialJet power_jet(double coeff, double p, double z) {
  PotentialJet j{};
  double factor = coeff;
  for (int k = 0; k < 4; ++k) {
    j[k] = factor * std::pow(z, p - k);
    factor *= p - k;
  }
  return j;
}

PotentialJet mirrored(PotentialJet j) {
  j[1] = -j[1];
  j[3] = -j[3];
  return j;
}

PotentialJet intermediate_jet(double C3, double C4, double z) {
  // -C4 * f * h with f = z^-3, h = (z + a)^-1; Leibniz rule keeps every
  // term of one sign.
  const double a = C4 / C3;
  const PotentialJet f = power_jet(1.0, -3.0, z);
  const PotentialJet h = power_jet(1.0, -1.0, z + a);
  constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  PotentialJet j{};
  for (int k = 0; k < 4; ++k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += binom[k][i] * f[i] * h[k - i];
    j[k] = -C4 * s;
  }
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------

BeamSpec BeamSpec::make(double mass, double v_perp) {
  require_positive(mass, "beam mass");
  require_positive(v_perp, "perpendicular velocity");
  return {mass, v_perp};
}

double BeamSpec::energy() const { return 0.5 * mass * v_perp * v_perp; }

double BeamSpec::wave_number() const { return mass * v_perp / constants::hbar; }

FresnelPair fresnel_rs_rp(double k_par, double xi, double eps_at_xi) {
  const double k0 = xi / constants::c;
  const double kappa = std::sqrt(k_par * k_par + k0 * k0);
  const double kappa_p = std::sqrt(k_par * k_par + eps_at_xi * k0 * k0);
  if (std::isinf(eps_at_xi)) return {-1.0, 1.0};
  if (kappa + kappa_p == 0.0) return {0.0, (eps_at_xi - 1.0) / (eps_at_xi + 1.0)};
  return {(kappa - kappa_p) / (kappa + kappa_p),
          (eps_at_xi * kappa - kappa_p) / (eps_at_xi * kappa + kappa_p)};
}

// ---------------------------------------------------------------------------

CasimirPolderModel::CasimirPolderModel(OpticalResponse alpha, OpticalResponse eps,
                                       ThermalConfig thermal, ToleranceSpec quad_tol)
    : alpha_(std::move(alpha)), eps_(std::move(eps)), thermal_(thermal), quad_tol_(quad_tol) {
  thermal_.validate();
  quad_tol_.validate();
  if (alpha_.quantity() != ResponseQuantity::Polarizability ||
      eps_.quantity() != ResponseQuantity::Permittivity)
    throw Error(ErrorKind::InvalidArgument, "Casimir-Polder model: expected (polarizability, permittivity)");

  const double a0 = alpha_.static_value();
  const double e0 = eps_.static_value();
  static_coefficient_ = constants::k_B * thermal_.temperature / (16.0 * constants::pi * constants::eps0) *
                        a0 * (e0 - 1.0) / (e0 + 1.0);
  c4_ = (a0 > 0.0 && e0 > 1.0) ? c4_coefficient(a0, e0) : 0.0;

  terms_.reserve(static_cast<std::size_t>(thermal_.n_matsubara));
  for (int n = 1; n <= thermal_.n_matsubara; ++n) {
    const double xi = matsubara_frequency(thermal_.temperature, n);
    terms_.push_back({xi / constants::c, alpha_.at(xi), eps_.at(xi)});
  }
}

PotentialJet CasimirPolderModel::term_jet(const Term& term, double z) const {
  const double k0 = term.k0;
  const double em1 = term.eps - 1.0;
  if (term.alpha == 0.0 || em1 == 0.0) return {};
  const double k02 = k0 * k0;
  const double inv2z = 0.5 / z;
  auto integrand = [&](double t) -> Vec4 {
    const double kappa = k0 + t * inv2z;
    const double k2 = kappa * kappa;
    const double kappa_p = std::sqrt(k2 + em1 * k02);
    const double rs = -em1 * k02 / ((kappa + kappa_p) * (kappa + kappa_p));
    const double denom = term.eps * kappa + kappa_p;
    const double rp = em1 * ((term.eps + 1.0) * k2 - k02) / (denom * denom);
    const double base = std::exp(-t) * (k02 * rs - (2.0 * k2 - k02) * rp);
    const double m = -2.0 * kappa;
    return {base, base * m, base * m * m, base * m * m * m};
  };
  const auto integral = quad_semi_infinite4(integrand, 0.0, quad_tol_).value;
  const double prefactor = constants::k_B * thermal_.temperature / (4.0 * constants::pi * constants::eps0) *
                           term.alpha * std::exp(-2.0 * k0 * z) * inv2z;
  PotentialJet j;
  for (int k = 0; k < 4; ++k) j[k] = prefactor * integral[k];
  return j;
}

PotentialJet CasimirPolderModel::jet(double z, Execution execution) const {
  if (!(z >= kMinDistance) || !std::isfinite(z)) {
    std::ostringstream msg;
    msg << "Casimir-Polder potential evaluated at z=" << z << " below the validity window ("
        << kMinDistance << " m)";
    throw Error(ErrorKind::DomainError, msg.str());
  }
  if (z > kMaxDistance) return power_jet(-c4_, -4.0, z);

  // exp(-700) is far below any relative accuracy the sum can carry.
  std::size_t active = 0;
  while (active < terms_.size() && 2.0 * terms_[active].k0 * z <= 700.0) ++active;
  const auto parts = map_indexed<PotentialJet>(
      active, [&](std::size_t i) { return term_jet(terms_[i], z); }, execution);

  PotentialJet total = power_jet(-static_coefficient_, -3.0, z);
  for (const auto& p : parts)
    for (int k = 0; k < 4; ++k) total[k] += p[k];
  return total;
}

// ---------------------------------------------------------------------------

PotentialModel PotentialModel::step(double U1, double U2) {
  if (!std::isfinite(U1) || !std::isfinite(U2))
    throw Error(ErrorKind::InvalidArgument, "step potential levels must be finite");
  return PotentialModel(potentials::Step{U1, U2});
}

PotentialModel PotentialModel::power_law(double lambda, int n, double U0) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "power-law exponent must be nonzero");
  if (!std::isfinite(lambda) || !std::isfinite(U0))
    throw Error(ErrorKind::InvalidArgument, "power-law parameters must be finite");
  return PotentialModel(potentials::PowerLaw{lambda, n, U0});
}

PotentialModel PotentialModel::non_retarded(double C3) {
  require_positive(C3, "C3");
  return PotentialModel(potentials::NonRetarded{C3});
}

PotentialModel PotentialModel::retarded(double C4) {
  require_positive(C4, "C4");
  return PotentialModel(potentials::Retarded{C4});
}

PotentialModel PotentialModel::intermediate(double C3, double C4) {
  require_positive(C3, "C3");
  require_positive(C4, "C4");
  return PotentialModel(potentials::Intermediate{C3, C4});
}

PotentialModel PotentialModel::casimir_polder(std::shared_ptr<const CasimirPolderModel> model) {
  if (!model) throw Error(ErrorKind::InvalidArgument, "Casimir-Polder model is null");
  return PotentialModel(potentials::CasimirPolderFull{std::move(model)});
}

PotentialModel PotentialModel::double_wall(const PotentialModel& inner, double L) {
  require_positive(L, "wall separation L");
  return PotentialModel(potentials::DoubleWall{std::make_shared<const PotentialModel>(inner), L});
}

PotentialModel PotentialModel::flipped(const PotentialModel& inner, double shift) {
  if (!std::isfinite(shift)) throw Error(ErrorKind::InvalidArgument, "flip shift must be finite");
  return PotentialModel(potentials::Flipped{std::make_shared<const PotentialModel>(inner), shift});
}

PotentialJet PotentialModel::jet(double z) const {
  using namespace potentials;
  if (!std::isfinite(z)) throw Error(ErrorKind::DomainError, "potential evaluated at non-finite z");
  return std::visit(
      [z](const auto& v) -> PotentialJet {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Step>) {
          return {z < 0.0 ? v.U1 : v.U2, 0.0, 0.0, 0.0};
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          if (v.lambda == 0.0) return {v.U0, 0.0, 0.0, 0.0};
          if (v.n < 0) require_distance(z, "power-law");
          PotentialJet j{};
          double factor = v.lambda;
          for (int k = 0; k < 4; ++k) {
            j[k] = factor == 0.0 ? 0.0 : factor * std::pow(z, v.n - k);
            factor *= v.n - k;
          }
          j[0] += v.U0;
          return j;
        } else if constexpr (std::is_same_v<T, NonRetarded>) {
          require_distance(z, "non-retarded");
          return power_jet(-v.C3, -3.0, z);
        } else if constexpr (std::is_same_v<T, Retarded>) {
          require_distance(z, "retarded");
          return power_jet(-v.C4, -4.0, z);
        } else if constexpr (std::is_same_v<T, Intermediate>) {
          require_distance(z, "intermediate");
          return intermediate_jet(v.C3, v.C4, z);
        } else if constexpr (std::is_same_v<T, CasimirPolderFull>) {
          return v.model->jet(z);
        } else if constexpr (std::is_same_v<T, DoubleWall>) {
          const PotentialJet near = v.inner->jet(z);
          const PotentialJet far = mirrored(v.inner->jet(v.L - z));
          PotentialJet j;
          for (int k = 0; k < 4; ++k) j[k] = near[k] + far[k];
          return j;
        } else {
          static_assert(std::is_same_v<T, Flipped>);
          return mirrored(v.inner->jet(v.shift - z));
        }
      },
      variant_);
}

double PotentialModel::derivative(double z, int order) const {
  if (order < 0 || order > 3) throw Error(ErrorKind::InvalidArgument, "derivative order must be 0..3");
  return jet(z)[static_cast<std::size_t>(order)];
}

std::string PotentialModel::name() const {
  using namespace potentials;
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Step>) return "step";
        else if constexpr (std::is_same_v<T, PowerLaw>) return "power-law";
        else if constexpr (std::is_same_v<T, NonRetarded>) return "non-retarded";
        else if constexpr (std::is_same_v<T, Retarded>) return "retarded";
        else if constexpr (std::is_same_v<T, Intermediate>) return "intermediate";
        else if constexpr (std::is_same_v<T, CasimirPolderFull>) return "casimir-polder";
        else if constexpr (std::is_same_v<T, DoubleWall>) return "double-wall(" + v.inner->name() + ")";
        else return "flipped(" + v.inner->name() + ")";
      },
      variant_);
}

}  // namespace qreflect
