#include "qreflect/material.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>

#include "qreflect/constants.hpp"
#include "qreflect/error.hpp"

namespace qreflect {

namespace {

double baseline(ResponseQuantity q) {
  return q == ResponseQuantity::Permittivity ? 1.0 : 0.0;
}

std::string quantity_name(ResponseQuantity q) {
  return q == ResponseQuantity::Permittivity ? "permittivity" : "polarizability";
}

}  // namespace

OpticalResponse OpticalResponse::oscillator_model(ResponseQuantity quantity,
                                                  std::vector<Oscillator> oscillators) {
  OpticalResponse r;
  r.kind_ = ResponseKind::Oscillator;
  r.quantity_ = quantity;
  r.oscillators_ = std::move(oscillators);
  r.static_value_ = baseline(quantity);
  for (const auto& o : r.oscillators_)
    if (o.omega > 0.0) r.static_value_ += o.strength / (o.omega * o.omega);
  r.validate();
  return r;
}

OpticalResponse OpticalResponse::tabulated(ResponseQuantity quantity, double static_value,
                                           std::vector<std::pair<double, double>> grid) {
  OpticalResponse r;
  r.kind_ = ResponseKind::Grid;
  r.quantity_ = quantity;
  r.static_value_ = static_value;
  r.grid_ = std::move(grid);
  r.validate();
  return r;
}

OpticalResponse OpticalResponse::constant(ResponseQuantity quantity, double value) {
  OpticalResponse r;
  r.kind_ = ResponseKind::Constant;
  r.quantity_ = quantity;
  r.static_value_ = value;
  r.validate();
  return r;
}

void OpticalResponse::validate() const {
  const double floor = baseline(quantity_);
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::InvalidArgument, quantity_name(quantity_) + " response: " + what);
  };
  if (!std::isfinite(static_value_) || static_value_ < floor)
    fail("static value must be finite and >= " + std::to_string(floor));
  switch (kind_) {
    case ResponseKind::Constant:
      break;
    case ResponseKind::Oscillator:
      if (oscillators_.empty()) fail("oscillator model needs at least one oscillator");
      for (const auto& o : oscillators_)
        if (!(o.strength >= 0.0) || !(o.omega > 0.0) || !(o.gamma >= 0.0) ||
            !std::isfinite(o.strength) || !std::isfinite(o.omega) || !std::isfinite(o.gamma))
          fail("oscillator needs strength >= 0, omega > 0, gamma >= 0");
      break;
    case ResponseKind::Grid:
      if (grid_.empty()) fail("grid needs at least one point");
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        const auto [xi, v] = grid_[i];
        if (!(xi > 0.0) || !std::isfinite(xi) || !std::isfinite(v) || v < floor)
          fail("grid points need xi > 0 and value >= " + std::to_string(floor));
        if (i > 0 && !(xi > grid_[i - 1].first)) fail("grid xi must be strictly increasing");
        const double prev = i > 0 ? grid_[i - 1].second : static_value_;
        if (v > prev) fail("grid values must be non-increasing in xi");
      }
      break;
  }
}

double OpticalResponse::at(double xi) const {
  if (!(xi >= 0.0)) {
    std::ostringstream msg;
    msg << quantity_name(quantity_) << " requested at xi=" << xi << " < 0";
    throw Error(ErrorKind::OutOfRange, msg.str());
  }
  switch (kind_) {
    case ResponseKind::Constant:
      return static_value_;
    case ResponseKind::Oscillator: {
      double sum = baseline(quantity_);
      for (const auto& o : oscillators_)
        sum += o.strength / (o.omega * o.omega + xi * xi + o.gamma * xi);
      return sum;
    }
    case ResponseKind::Grid: {
      if (xi == 0.0) return static_value_;
      const double floor = baseline(quantity_);
      if (xi < grid_.front().first) {
        std::ostringstream msg;
        msg << quantity_name(quantity_) << " requested at xi=" << xi
            << " below first grid point " << grid_.front().first;
        throw Error(ErrorKind::OutOfRange, msg.str());
      }
      if (xi >= grid_.back().first) {
        const auto [x1, v1] = grid_.back();
        return floor + (v1 - floor) * (x1 / xi) * (x1 / xi);
      }
      auto hi = std::upper_bound(grid_.begin(), grid_.end(), xi,
                                 [](double x, const auto& p) { return x < p.first; });
      auto lo = hi - 1;
      const double t = (xi - lo->first) / (hi->first - lo->first);
      return lo->second + t * (hi->second - lo->second);
    }
  }
  return 0.0;
}

OpticalResponse OpticalResponse::parse(std::istream& in, const std::string& source) {
  std::optional<ResponseQuantity> quantity;
  std::optional<ResponseKind> kind;
  std::optional<double> static_value;
  std::vector<Oscillator> oscillators;
  std::vector<std::pair<double, double>> grid;

  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::ParseError,
                source + ":" + std::to_string(line_no) + ": " + what);
  };
  auto read_numbers = [&](std::istringstream& fields, int count) {
    std::vector<double> out;
    std::string token;
    while (fields >> token) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || !std::isfinite(value)) fail("not a number: '" + token + "'");
      out.push_back(value);
    }
    if (static_cast<int>(out.size()) != count)
      fail("expected " + std::to_string(count) + " numbers, got " + std::to_string(out.size()));
    return out;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key)) continue;

    if (key == "quantity") {
      std::string value;
      fields >> value;
      if (value == "polarizability") quantity = ResponseQuantity::Polarizability;
      else if (value == "permittivity") quantity = ResponseQuantity::Permittivity;
      else fail("quantity must be 'polarizability' or 'permittivity'");
      if (std::string extra; fields >> extra) fail("trailing text after quantity");
    } else if (key == "kind") {
      std::string value;
      fields >> value;
      if (value == "oscillator") kind = ResponseKind::Oscillator;
      else if (value == "grid") kind = ResponseKind::Grid;
      else fail("kind must be 'oscillator' or 'grid'");
      if (std::string extra; fields >> extra) fail("trailing text after kind");
    } else if (key == "static_value") {
      if (static_value) fail("duplicate static_value");
      static_value = read_numbers(fields, 1)[0];
    } else if (key == "oscillator") {
      if (kind != ResponseKind::Oscillator) fail("oscillator row requires 'kind oscillator' first");
      const auto v = read_numbers(fields, 3);
      oscillators.push_back({v[0], v[1], v[2]});
    } else if (key == "grid") {
      if (kind != ResponseKind::Grid) fail("grid row requires 'kind grid' first");
      const auto v = read_numbers(fields, 2);
      grid.emplace_back(v[0], v[1]);
    } else {
      fail("unknown key '" + key + "'");
    }
  }

  line_no = 0;
  if (!quantity) fail("missing 'quantity' line");
  if (!kind) fail("missing 'kind' line");
  if (!static_value) fail("missing 'static_value' line");
  try {
    if (*kind == ResponseKind::Oscillator) {
      auto model = oscillator_model(*quantity, std::move(oscillators));
      const double rel = std::abs(model.static_value() - *static_value) /
                         std::max(std::abs(*static_value), std::numeric_limits<double>::min());
      if (rel > 1e-6) {
        std::ostringstream msg;
        msg << "static_value " << *static_value << " disagrees with oscillator sum "
            << model.static_value();
        fail(msg.str());
      }
      return model;
    }
    return tabulated(*quantity, *static_value, std::move(grid));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    throw Error(ErrorKind::ParseError, source + ": " + e.what());
  }
}

OpticalResponse OpticalResponse::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open material file " + path.string());
  return parse(in, path.string());
}

// ---------------------------------------------------------------------------

void ThermalConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw Error(ErrorKind::InvalidArgument, "temperature must be positive");
  if (n_matsubara < 1) throw Error(ErrorKind::InvalidArgument, "n_matsubara must be >= 1");
}

double matsubara_frequency(double temperature, int n) {
  return 2.0 * constants::pi * n * constants::k_B * temperature / constants::hbar;
}

C3Result c3_coefficient(const OpticalResponse& alpha, const OpticalResponse& eps,
                        const ThermalConfig& thermal, Execution execution) {
  thermal.validate();
  if (alpha.quantity() != ResponseQuantity::Polarizability ||
      eps.quantity() != ResponseQuantity::Permittivity)
    throw Error(ErrorKind::InvalidArgument, "c3_coefficient: expected (polarizability, permittivity)");

  const int n_max = thermal.n_matsubara;
  const auto terms = map_indexed<double>(
      static_cast<std::size_t>(n_max) + 1,
      [&](std::size_t n) {
        const double xi = matsubara_frequency(thermal.temperature, static_cast<int>(n));
        const double e = eps.at(xi);
        const double t = alpha.at(xi) * (e - 1.0) / (e + 1.0);
        return n == 0 ? 0.5 * t : t;
      },
      execution);

  double sum = 0.0;
  for (double t : terms) sum += t;
  const double prefactor = constants::k_B * thermal.temperature / (8.0 * constants::pi * constants::eps0);

  C3Result out;
  out.terms = n_max + 1;
  out.value = prefactor * sum;
  const double last = terms.back();
  out.last_term_ratio = sum != 0.0 ? std::abs(last / sum) : 0.0;
  out.truncation_warning = out.last_term_ratio > kTruncationWarningRatio;

  if (last == 0.0) {
    out.tail_estimate = 0.0;
  } else if (n_max >= 2) {
    const double half = terms[static_cast<std::size_t>(n_max / 2)];
    const double p = std::log(half / last) / std::log(static_cast<double>(n_max) / (n_max / 2));
    out.tail_estimate = (half > 0.0 && last > 0.0 && p > 1.0)
                            ? prefactor * last * n_max / (p - 1.0)
                            : std::numeric_limits<double>::infinity();
  } else {
    out.tail_estimate = std::numeric_limits<double>::infinity();
  }
  return out;
}

double c4_fresnel_integral(double eps_static, const ToleranceSpec& tol) {
  if (!(eps_static >= 1.0) || !std::isfinite(eps_static))
    throw Error(ErrorKind::InvalidArgument, "c4: static permittivity must be >= 1");
  if (eps_static == 1.0) return 0.0;
  const double e = eps_static;
  auto integrand = [e](double v) {
    const double root = std::sqrt(v * v - 1.0 + e);
    const double v2 = v * v;
    const double v4 = v2 * v2;
    const double rp = (e * v - root) / (e * v + root);
    // (v - root)/(v + root) with the cancellation removed.
    const double rs = -(e - 1.0) / ((v + root) * (v + root));
    return (2.0 / v2 - 1.0 / v4) * rp - rs / v4;
  };
  return quad_semi_infinite(integrand, 1.0, tol).value;
}

double c4_coefficient(double alpha_static, double eps_static, const ToleranceSpec& tol) {
  if (!(alpha_static > 0.0) || !std::isfinite(alpha_static))
    throw Error(ErrorKind::InvalidArgument, "c4: static polarizability must be > 0");
  const double prefactor = 3.0 * constants::hbar * constants::c * alpha_static /
                           (64.0 * constants::pi * constants::pi * constants::eps0);
  return prefactor * c4_fresnel_integral(eps_static, tol);
}

}  // namespace qreflect
