#include "qreflect/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "qreflect/badlands.hpp"
#include "qreflect/error.hpp"
#include "qreflect/grating.hpp"
#include "qreflect/material.hpp"
#include "qreflect/potential.hpp"
#include "qreflect/reflection.hpp"

namespace qreflect::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Entry {
  Command command;
  std::string_view name;
  std::vector<Column> columns;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {Command::Potential,
       "potential",
       {{"z", "m", "distance from the surface"},
        {"U", "J", "potential energy"},
        {"dU_dz", "J/m", "first derivative"},
        {"d2U_dz2", "J/m^2", "second derivative"},
        {"d3U_dz3", "J/m^3", "third derivative"}}},
      {Command::Coeffs,
       "coeffs",
       {{"C3", "J m^3", "non-retarded coefficient from the Matsubara sum"},
        {"C3_tail_estimate", "J m^3", "power-law estimate of the truncated Matsubara tail"},
        {"C3_last_term_ratio", "1", "last Matsubara term over the partial sum"},
        {"C3_terms", "1", "number of Matsubara terms summed"},
        {"C4", "J m^4", "retarded coefficient from static responses"},
        {"temperature", "K", "temperature of the Matsubara sum"}}},
      {Command::Badlands,
       "badlands",
       {{"z", "m", "distance from the surface"},
        {"U", "J", "potential energy"},
        {"p", "kg m/s", "local momentum"},
        {"B", "1", "badlands function"},
        {"abs_B_derivative", "1/m", "d|B|/dz"}}},
      {Command::Reflect,
       "reflect",
       {{"v", "m/s", "perpendicular velocity"},
        {"z_r", "m", "reflection point (|B| maximum)"},
        {"z_start", "m", "where the integration or slab stack starts"},
        {"re_r", "1", "real part of the reflection amplitude"},
        {"im_r", "1", "imaginary part of the reflection amplitude"},
        {"R", "1", "reflection probability |r|^2"},
        {"steps", "1", "accepted ODE steps or slab count"},
        {"rejected_steps", "1", "rejected ODE steps"}}},
      {Command::SweepVelocity,
       "sweep-velocity",
       {{"v", "m/s", "perpendicular velocity"},
        {"z_r", "m", "reflection point (|B| maximum)"},
        {"B_max", "1", "|B| at the reflection point"},
        {"R", "1", "reflection probability |r|^2"}}},
      {Command::GratingSweep,
       "grating-sweep",
       {{"theta", "rad", "grating rotation angle"},
        {"v", "m/s", "beam velocity"},
        {"abs_r", "1", "|r| at v sin(theta)"},
        {"geometric_factor", "1", "(d/p0) tan(theta)"},
        {"rate", "1", "reflection rate abs_r * geometric_factor"},
        {"T", "1", "transmission rate o/p"},
        {"rate_over_T", "1", "reflection rate over transmission rate"}}},
      {Command::Pattern,
       "pattern",
       {{"alpha", "rad", "screen angle"},
        {"I_R", "arb", "reflected-beam intensity"},
        {"I_T", "arb", "transmitted-beam intensity"}}},
  };
  return entries;
}

const Entry& entry(Command c) {
  for (const auto& e : registry())
    if (e.command == c) return e;
  throw Error(ErrorKind::InvalidArgument, "unknown command");
}

Table empty_table(Command c) {
  Table t;
  for (const auto& col : columns(c)) t.columns.push_back(col.name);
  return t;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
  out.back() = hi;
  return out;
}

json tolerance_json(const ToleranceSpec& t) { return {{"rel", t.rel}, {"abs", t.abs}, {"max_steps", t.max_steps}}; }

json open_questions() {
  return {
      {"reflection_point_special_case",
       "n=-2,-4 use z^n = -2(n-2)/(5n+8) z_c^n (the degenerate root), giving (C4/E)^(1/4) for the retarded "
       "wall; the alternative (7 C4/(3E))^(1/4) form disagrees with the numeric |B| maximum and is reported only"},
      {"linear_closed_form", "the Bessel-function ratio is used inverted (r -> 0 for steep slopes) and evaluated at the conjugate argument"},
      {"reflection_rate_factor", "(d/p0) tan(theta), i.e. a(theta)/p(theta)"},
      {"reflected_pattern", "closed-form far-field I_R; a reflected-wave phase without K s dependence is not used"},
      {"edge_cut", "default delta where (C3 d/(hbar v_z)) delta^-3 = 20 pi"},
  };
}

class Setup {
 public:
  Setup(const RunConfig& c, json& meta) : c_(c), meta_(meta) {}

  const OpticalResponse& alpha() {
    if (!alpha_) {
      if (c_.material.polarizability.empty())
        throw Error(ErrorKind::InvalidArgument, "material.polarizability is required for this run");
      alpha_ = OpticalResponse::load(c_.material.polarizability);
      meta_["parameters"]["material"]["polarizability"] = c_.material.polarizability.string();
    }
    return *alpha_;
  }

  const OpticalResponse& eps() {
    if (!eps_) {
      eps_ = OpticalResponse::load(c_.material.permittivity);
      meta_["parameters"]["material"]["permittivity"] = c_.material.permittivity.string();
    }
    return *eps_;
  }

  const C3Result& c3() {
    if (!c3_) {
      c3_ = c3_coefficient(alpha(), eps(), c_.material.thermal);
      meta_["parameters"]["material"]["temperature"] = c_.material.thermal.temperature;
      meta_["parameters"]["material"]["matsubara_terms"] = c_.material.thermal.n_matsubara;
      meta_["results"]["C3_truncation_warning"] = c3_->truncation_warning;
    }
    return *c3_;
  }

  double c4() {
    if (!c4_) c4_ = c4_coefficient(alpha().static_value(), eps().static_value());
    return *c4_;
  }

  double C3() {
    const auto& p = c_.potential;
    const double v = p.C3 ? *p.C3 : c3().value;
    meta_["parameters"]["potential"]["C3"] = v;
    meta_["parameters"]["potential"]["C3_source"] = p.C3 ? "config" : "material";
    return v;
  }

  double C4() {
    const auto& p = c_.potential;
    const double v = p.C4 ? *p.C4 : c4();
    meta_["parameters"]["potential"]["C4"] = v;
    meta_["parameters"]["potential"]["C4_source"] = p.C4 ? "config" : "material";
    return v;
  }

  PotentialModel potential() {
    const auto& p = c_.potential;
    meta_["parameters"]["potential"]["model"] = p.model;
    PotentialModel U = PotentialModel::constant(0.0);
    if (p.model == "step") {
      U = PotentialModel::step(p.U1, p.U2);
      meta_["parameters"]["potential"]["U1"] = p.U1;
      meta_["parameters"]["potential"]["U2"] = p.U2;
    } else if (p.model == "power-law") {
      U = PotentialModel::power_law(p.lambda, p.n, p.U0);
      meta_["parameters"]["potential"]["lambda"] = p.lambda;
      meta_["parameters"]["potential"]["n"] = p.n;
      meta_["parameters"]["potential"]["U0"] = p.U0;
    } else if (p.model == "non-retarded") {
      U = PotentialModel::non_retarded(C3());
    } else if (p.model == "retarded") {
      U = PotentialModel::retarded(C4());
    } else if (p.model == "intermediate") {
      const double c3 = C3();
      U = PotentialModel::intermediate(c3, C4());
    } else {
      auto model = std::make_shared<const CasimirPolderModel>(alpha(), eps(), c_.material.thermal);
      meta_["parameters"]["material"]["temperature"] = c_.material.thermal.temperature;
      meta_["parameters"]["material"]["matsubara_terms"] = c_.material.thermal.n_matsubara;
      U = PotentialModel::casimir_polder(model);
    }
    if (p.double_wall_L > 0) {
      U = PotentialModel::double_wall(U, p.double_wall_L);
      meta_["parameters"]["potential"]["double_wall_L"] = p.double_wall_L;
    }
    return U;
  }

  // Closed-form reflection point for pure power laws, or nullopt.
  std::optional<std::pair<int, double>> power_law_form() {
    const auto& p = c_.potential;
    if (p.double_wall_L > 0) return std::nullopt;
    if (p.model == "non-retarded") return std::pair{-3, -C3()};
    if (p.model == "retarded") return std::pair{-4, -C4()};
    if (p.model == "power-law" && p.U0 == 0.0) return std::pair{p.n, p.lambda};
    return std::nullopt;
  }

 private:
  const RunConfig& c_;
  json& meta_;
  std::optional<OpticalResponse> alpha_, eps_;
  std::optional<C3Result> c3_;
  std::optional<double> c4_;
};

void beam_meta(json& meta, const RunConfig& c) {
  meta["parameters"]["beam"] = {{"species", c.beam.species}, {"mass", c.beam.mass}, {"velocities", c.beam.velocities}};
}

// The |B| scan must stay on the near half of a double wall.
double scan_hi(const RunConfig& c) {
  const double L = c.potential.double_wall_L;
  return L > 0 ? std::min(c.scan.reflection_hi, 0.5 * L) : c.scan.reflection_hi;
}

const std::vector<double>& require_velocities(const RunConfig& c) {
  if (c.beam.velocities.empty())
    throw Error(ErrorKind::InvalidArgument, "this command needs beam velocities ([beam] velocity/velocities/range)");
  return c.beam.velocities;
}

double single_velocity(const RunConfig& c) {
  const auto& v = require_velocities(c);
  if (v.size() != 1) throw Error(ErrorKind::InvalidArgument, "this command takes exactly one beam velocity");
  return v.front();
}

// Evaluates f per index; physics-domain failures become fallback rows and
// are counted, everything else propagates.
template <class F, class G>
std::vector<std::vector<double>> guarded_rows(std::size_t n, F&& f, G&& fallback, Execution execution,
                                              RunOutput& o) {
  struct Row {
    std::vector<double> values;
    std::string error;
  };
  auto rows = map_indexed<Row>(
      n,
      [&](std::size_t i) {
        try {
          return Row{f(i), {}};
        } catch (const Error& e) {
          if (e.category() != ErrorCategory::Physics) throw;
          return Row{{}, std::string(to_string(e.kind())) + ": " + e.what()};
        }
      },
      execution);
  json failures = json::array();
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].error.empty()) {
      out.push_back(std::move(rows[i].values));
    } else {
      ++o.failed_points;
      failures.push_back({{"index", i}, {"error", rows[i].error}});
      out.push_back(fallback(i));
    }
  }
  o.meta["results"]["failures"] = failures;
  return out;
}

void run_potential(const RunConfig& c, RunOutput& o, Setup& s, Execution ex) {
  const auto U = s.potential();
  const auto z = log_grid(c.scan.z_min, c.scan.z_max, c.scan.z_points);
  o.meta["parameters"]["scan"] = {{"z_min", c.scan.z_min}, {"z_max", c.scan.z_max}, {"z_points", c.scan.z_points}};
  auto jets = map_indexed<PotentialJet>(z.size(), [&](std::size_t i) { return U.jet(z[i]); }, ex);
  for (std::size_t i = 0; i < z.size(); ++i)
    o.table.rows.push_back({z[i], jets[i][0], jets[i][1], jets[i][2], jets[i][3]});
}

void run_coeffs(const RunConfig& c, RunOutput& o, Setup& s) {
  const auto& r = s.c3();
  const double c4 = s.c4();
  o.table.rows.push_back({r.value, r.tail_estimate, r.last_term_ratio, static_cast<double>(r.terms), c4,
                          c.material.thermal.temperature});
  o.meta["results"]["C3"] = r.value;
  o.meta["results"]["C4"] = c4;
}

void run_badlands(const RunConfig& c, RunOutput& o, Setup& s, Execution ex) {
  const double v = single_velocity(c);
  const auto beam = BeamSpec::make(c.beam.mass, v);
  const auto U = s.potential();
  const auto z = log_grid(c.scan.z_min, c.scan.z_max, c.scan.z_points);
  o.meta["parameters"]["scan"] = {{"z_min", c.scan.z_min},
                                  {"z_max", c.scan.z_max},
                                  {"z_points", c.scan.z_points},
                                  {"reflection_lo", c.scan.reflection_lo},
                                  {"reflection_hi", scan_hi(c)}};
  o.table.rows = map_indexed<std::vector<double>>(
      z.size(),
      [&](std::size_t i) {
        const auto m = local_momentum(U, beam, z[i]);
        return std::vector<double>{z[i], U.evaluate(z[i]), m.p, badlands_B(U, beam, z[i]),
                                   badlands_abs_derivative(U, beam, z[i])};
      },
      ex);
  const auto point = reflection_point_numeric(U, beam, c.scan.reflection_lo, scan_hi(c));
  auto& res = o.meta["results"];
  res["reflection_point_exists"] = point.exists;
  if (point.exists) {
    res["z_r"] = point.z_r;
    res["B_at_max"] = point.B_at_max;
  }
  if (auto form = s.power_law_form()) {
    const auto closed = reflection_point_powerlaw(form->first, form->second, 0.0, beam, false);
    res["z_r_closed_form"] = closed.z_r;
    res["z_r_closed_form_method"] = std::string(to_string(closed.method));
    if (form->first == -4 || form->first == -2)
      res["z_r_alternative_special_form"] = reflection_point_alternative_special(form->first, form->second, 0.0, beam);
  }
}

void run_reflect(const RunConfig& c, RunOutput& o, Setup& s, Execution ex) {
  const auto& vs = require_velocities(c);
  const auto U = s.potential();
  o.meta["parameters"]["solver"] = c.scan.solver;
  o.meta["parameters"]["tolerance"] = tolerance_json(c.tolerance);
  o.meta["parameters"]["start_factor"] = c.start_factor;
  if (c.scan.solver == "multistep")
    o.meta["parameters"]["multistep"] = {{"delta", c.scan.delta}, {"z_far", c.scan.z_far}};
  auto compute = [&](std::size_t i) {
    const auto beam = BeamSpec::make(c.beam.mass, vs[i]);
    ReflectionResult r;
    if (c.scan.solver == "riccati") {
      r = riccati_reflection(U, beam, c.tolerance, c.start_factor, c.scan.reflection_lo, scan_hi(c));
    } else {
      const auto point = reflection_point_numeric(U, beam, c.scan.reflection_lo, scan_hi(c));
      if (!point.exists) throw Error(ErrorKind::NoReflectionPoint, "no reflection point for this velocity");
      // Inner parallelism is off while the outer map runs in parallel.
      r = multistep_reflection(U, beam, point.z_r + c.scan.z_far, point.z_r, c.scan.delta, Execution::Serial);
      r.z_r = point.z_r;
    }
    return std::vector<double>{vs[i],          r.z_r,      r.z_start, r.r.real(), r.r.imag(), r.R,
                               double(r.steps), double(r.rejected_steps)};
  };
  auto nan_row = [&](std::size_t i) {
    std::vector<double> row(o.table.columns.size(), kNaN);
    row[0] = vs[i];
    return row;
  };
  o.table.rows = guarded_rows(vs.size(), compute, nan_row, ex, o);
}

void run_sweep(const RunConfig& c, RunOutput& o, Setup& s, Execution ex) {
  const auto& vs = require_velocities(c);
  const auto U = s.potential();
  o.meta["parameters"]["tolerance"] = tolerance_json(c.tolerance);
  o.meta["parameters"]["start_factor"] = c.start_factor;
  auto compute = [&](std::size_t i) {
    const auto beam = BeamSpec::make(c.beam.mass, vs[i]);
    const auto point = reflection_point_numeric(U, beam, c.scan.reflection_lo, scan_hi(c));
    if (!point.exists) throw Error(ErrorKind::NoReflectionPoint, "no reflection point for this velocity");
    const auto r = riccati_reflection_at(U, beam, point.z_r, c.tolerance, c.start_factor);
    return std::vector<double>{vs[i], point.z_r, point.B_at_max, r.R};
  };
  auto nan_row = [&](std::size_t i) {
    std::vector<double> row(o.table.columns.size(), kNaN);
    row[0] = vs[i];
    return row;
  };
  o.table.rows = guarded_rows(vs.size(), compute, nan_row, ex, o);
}

void run_grating_sweep(const RunConfig& c, RunOutput& o, Setup& s, Execution ex) {
  const auto& geom = c.grating.geometry;
  const auto U = s.potential();
  const double tmax = geom.theta_max();
  const int n = c.grating.theta_points;
  o.meta["parameters"]["grating"] = {{"p0", geom.p0},
                                     {"w", geom.w},
                                     {"d", geom.d},
                                     {"slits", geom.N},
                                     {"theta_points", n},
                                     {"theta_max", tmax},
                                     {"velocities", c.grating.velocities}};
  o.meta["parameters"]["tolerance"] = tolerance_json(c.tolerance);
  // theta = 0 has no perpendicular motion: rate 0 exactly, |r| undefined.
  std::vector<std::pair<double, double>> grid;
  for (double v : c.grating.velocities)
    for (int i = 0; i < n; ++i) grid.emplace_back(tmax * i / n, v);
  auto compute = [&](std::size_t k) {
    const auto [theta, v] = grid[k];
    const double T = transmission_rate(geom, theta);
    if (theta == 0.0) return std::vector<double>{theta, v, kNaN, 0.0, 0.0, T, 0.0};
    const auto rr = reflection_rate(geom, theta, c.beam.mass, v, U, c.tolerance);
    return std::vector<double>{theta, v, rr.abs_r, rr.geometric_factor, rr.rate, T, rr.rate / T};
  };
  auto nan_row = [&](std::size_t k) {
    std::vector<double> row(o.table.columns.size(), kNaN);
    row[0] = grid[k].first;
    row[1] = grid[k].second;
    return row;
  };
  o.table.rows = guarded_rows(grid.size(), compute, nan_row, ex, o);
}

void run_pattern(const RunConfig& c, RunOutput& o, Setup& s, Execution ex) {
  const auto& pc = c.pattern;
  const auto& geom = c.grating.geometry;
  PatternSpec spec;
  spec.theta = pc.theta;
  spec.K = BeamSpec::make(c.beam.mass, pc.velocity).wave_number();
  spec.L1 = pc.L1;
  spec.L2 = pc.L2;
  spec.I0 = pc.I0;
  for (int i = 0; i < pc.alpha_points; ++i)
    spec.alpha_grid.push_back(pc.alpha_min + (pc.alpha_max - pc.alpha_min) * i / (pc.alpha_points - 1));
  const double v_z = pc.v_z.value_or(pc.velocity);

  double rate = 0.0;
  if (pc.theta > 0.0) {
    const auto U = s.potential();
    rate = reflection_rate(geom, pc.theta, c.beam.mass, pc.velocity, U, c.tolerance).rate;
  }
  const double c3 = s.C3();
  const auto reflected = pattern_reflected(spec, geom, rate, ex);
  const auto transmitted = pattern_transmitted(spec, geom, c3, v_z, pc.edge_cut, {1e-10, 0.0, 100000}, ex);
  for (std::size_t i = 0; i < spec.alpha_grid.size(); ++i)
    o.table.rows.push_back({spec.alpha_grid[i], reflected[i].intensity, transmitted.points[i].intensity});

  o.meta["parameters"]["grating"] = {{"p0", geom.p0}, {"w", geom.w}, {"d", geom.d}, {"slits", geom.N}};
  o.meta["parameters"]["pattern"] = {{"theta", pc.theta},         {"velocity", pc.velocity}, {"v_z", v_z},
                                     {"alpha_min", pc.alpha_min}, {"alpha_max", pc.alpha_max},
                                     {"alpha_points", pc.alpha_points}, {"L1", pc.L1}, {"L2", pc.L2},
                                     {"I0", pc.I0},               {"K", spec.K}};
  o.meta["results"]["reflection_rate"] = rate;
  o.meta["results"]["edge_cut"] = transmitted.edge_cut;
  o.meta["results"]["edge_cut_sensitivity"] = transmitted.edge_cut_sensitivity;
}

}  // namespace

std::string_view to_string(Command command) { return entry(command).name; }

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& e : registry())
    if (e.name == name) return e.command;
  return std::nullopt;
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> all = [] {
    std::vector<Command> v;
    for (const auto& e : registry()) v.push_back(e.command);
    return v;
  }();
  return all;
}

const std::vector<Column>& columns(Command command) { return entry(command).columns; }

std::string describe(Command command) {
  std::ostringstream out;
  out << "command: " << to_string(command) << "\n";
  out << "columns:\n";
  std::size_t name_w = 0, unit_w = 0;
  for (const auto& c : columns(command)) {
    name_w = std::max(name_w, c.name.size());
    unit_w = std::max(unit_w, c.unit.size());
  }
  for (const auto& c : columns(command)) {
    out << "  " << c.name << std::string(name_w - c.name.size() + 2, ' ') << c.unit
        << std::string(unit_w - c.unit.size() + 2, ' ') << c.description << "\n";
  }
  return out.str();
}

RunOutput execute(Command command, const RunConfig& config, Execution execution) {
  RunOutput o;
  o.table = empty_table(command);
  o.meta["command"] = std::string(to_string(command));
  o.meta["parameters"] = json::object();
  o.meta["results"] = json::object();
  o.meta["open_questions"] = open_questions();
  beam_meta(o.meta, config);
  Setup setup(config, o.meta);
  switch (command) {
    case Command::Potential: run_potential(config, o, setup, execution); break;
    case Command::Coeffs: run_coeffs(config, o, setup); break;
    case Command::Badlands: run_badlands(config, o, setup, execution); break;
    case Command::Reflect: run_reflect(config, o, setup, execution); break;
    case Command::SweepVelocity: run_sweep(config, o, setup, execution); break;
    case Command::GratingSweep: run_grating_sweep(config, o, setup, execution); break;
    case Command::Pattern: run_pattern(config, o, setup, execution); break;
  }
  o.meta["columns"] = o.table.columns;
  o.meta["rows"] = o.table.rows.size();
  o.meta["failed_points"] = o.failed_points;
  return o;
}

}  // namespace qreflect::cli
