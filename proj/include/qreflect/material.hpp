#pragma once

// Optical response on the imaginary frequency axis and the Casimir-Polder
// strength coefficients derived from it.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qreflect/numerics.hpp"
#include "qreflect/parallel.hpp"

namespace qreflect {

enum class ResponseKind { Oscillator, Grid, Constant };

/// Polarizability alpha(i xi) in C m^2/V, or relative permittivity
/// eps(i xi). The oscillator model is sum_j s_j / (w_j^2 + xi^2 + g_j xi)
/// for alpha and 1 plus that sum for eps.
enum class ResponseQuantity { Polarizability, Permittivity };

struct Oscillator {
  double strength = 0.0;  // rad^2/s^2 (times C m^2/V for alpha)
  double omega = 0.0;     // rad/s
  double gamma = 0.0;     // rad/s
};

class OpticalResponse {
 public:
  static OpticalResponse oscillator_model(ResponseQuantity quantity,
                                          std::vector<Oscillator> oscillators);
  /// Grid rows (xi, value) with xi strictly increasing and positive.
  /// Linear interpolation inside the grid; beyond the last point alpha and
  /// eps - 1 fall off as xi^-2.
  static OpticalResponse tabulated(ResponseQuantity quantity, double static_value,
                                   std::vector<std::pair<double, double>> grid);
  /// Frequency-independent response, used for tests and idealised walls.
  static OpticalResponse constant(ResponseQuantity quantity, double value);

  /// Reads the material file format:
  ///
  ///     # comment
  ///     quantity polarizability | permittivity
  ///     kind oscillator | grid
  ///     static_value <value at xi = 0>
  ///     oscillator <s> <omega> <gamma>      (kind oscillator, repeatable)
  ///     grid <xi> <value>                   (kind grid, repeatable)
  ///
  /// For oscillator files static_value must agree with the model at xi = 0
  /// to 1e-6 relative. Errors are ParseError and cite the line number.
  static OpticalResponse parse(std::istream& in, const std::string& source);
  static OpticalResponse load(const std::filesystem::path& path);

  /// alpha(i xi) or eps(i xi). OutOfRange for xi < 0, and for tabulated
  /// data at 0 < xi < first grid point.
  double at(double xi) const;
  double static_value() const { return static_value_; }

  ResponseKind kind() const { return kind_; }
  ResponseQuantity quantity() const { return quantity_; }
  const std::vector<Oscillator>& oscillators() const { return oscillators_; }
  const std::vector<std::pair<double, double>>& grid() const { return grid_; }

 private:
  OpticalResponse() = default;
  void validate() const;

  ResponseKind kind_ = ResponseKind::Constant;
  ResponseQuantity quantity_ = ResponseQuantity::Polarizability;
  double static_value_ = 0.0;
  std::vector<Oscillator> oscillators_;
  std::vector<std::pair<double, double>> grid_;
};

struct ThermalConfig {
  double temperature = 300.0;  // K
  int n_matsubara = 2000;

  void validate() const;
};

/// xi_n = 2 pi n k_B T / hbar.
double matsubara_frequency(double temperature, int n);

struct C3Result {
  double value = 0.0;          // J m^3
  double tail_estimate = 0.0;  // estimated magnitude of the omitted terms n > N
  double last_term_ratio = 0.0;
  bool truncation_warning = false;
  int terms = 0;
};

/// Relative size of the last Matsubara term above which C3Result flags a
/// truncation warning.
inline constexpr double kTruncationWarningRatio = 1e-6;

/// C3 = (k_B T / 8 pi eps0) sum'_n alpha(i xi_n) (eps(i xi_n) - 1)/(eps(i xi_n) + 1)
/// with the n = 0 term halved. Terms are computed with map_indexed and
/// summed in index order. The tail estimate fits t_n ~ n^-p from t_{N/2}
/// and t_N and integrates the power law from N to infinity; it is infinite
/// when p <= 1.
C3Result c3_coefficient(const OpticalResponse& alpha, const OpticalResponse& eps,
                        const ThermalConfig& thermal,
                        Execution execution = Execution::Parallel);

/// Retarded coefficient 3 hbar c alpha(0)/(64 pi^2 eps0) times the static
/// Fresnel integral over v in [1, inf).
double c4_coefficient(double alpha_static, double eps_static,
                      const ToleranceSpec& tol = {1e-12, 0.0, 10000});

/// The dimensionless v-integral alone; 0 for eps = 1, 2 in the perfect
/// conductor limit.
double c4_fresnel_integral(double eps_static,
                           const ToleranceSpec& tol = {1e-12, 0.0, 10000});

}  // namespace qreflect
