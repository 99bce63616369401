#include "qreflect/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qreflect/error.hpp"

#ifndef QREFLECT_DATA_DIR
#define QREFLECT_DATA_DIR "data"
#endif

namespace qreflect::cli {

namespace pt = boost::property_tree;

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("QREFLECT_DATA_DIR"); env && *env) return env;
  return QREFLECT_DATA_DIR;
}

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"beam", {"species", "mass", "velocity", "velocities", "velocity_min", "velocity_max", "velocity_points",
                "velocity_spacing"}},
      {"potential", {"model", "C3", "C4", "lambda", "n", "U0", "U1", "U2", "double_wall_L"}},
      {"material", {"polarizability", "permittivity", "temperature", "matsubara_terms"}},
      {"grating", {"p0", "w", "d", "slits", "theta_points", "velocities"}},
      {"pattern", {"theta", "velocity", "v_z", "alpha_min", "alpha_max", "alpha_points", "L1", "L2", "I0",
                   "edge_cut"}},
      {"tolerance", {"rel", "abs", "max_steps", "start_factor"}},
      {"scan", {"z_min", "z_max", "z_points", "reflection_lo", "reflection_hi", "solver", "delta", "z_far"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::string source) : tree_(tree), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& where, const std::string& msg, ErrorKind kind = ErrorKind::ParseError) const {
    throw Error(kind, source_ + ": " + where + ": " + msg);
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    auto v = sec->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(*v);
  }

  double to_double(const std::string& where, const std::string& text) const {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
      fail(where, "expected a finite number, got '" + text + "'");
    return value;
  }

  void get(const std::string& section, const std::string& key, double& out) const {
    if (auto v = raw(section, key)) out = to_double(section + "." + key, *v);
  }
  void get(const std::string& section, const std::string& key, std::optional<double>& out) const {
    if (auto v = raw(section, key)) out = to_double(section + "." + key, *v);
  }
  void get(const std::string& section, const std::string& key, int& out) const {
    if (auto v = raw(section, key)) {
      int value = 0;
      auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), value);
      if (ec != std::errc() || ptr != v->data() + v->size()) fail(section + "." + key, "expected an integer, got '" + *v + "'");
      out = value;
    }
  }
  void get(const std::string& section, const std::string& key, std::string& out) const {
    if (auto v = raw(section, key)) out = *v;
  }

  std::optional<std::vector<double>> list(const std::string& section, const std::string& key) const {
    auto v = raw(section, key);
    if (!v) return std::nullopt;
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(section + "." + key, trim(item)));
    if (out.empty()) fail(section + "." + key, "empty list");
    return out;
  }

  void check_keys() const {
    for (const auto& [section, node] : tree_) {
      auto it = allowed_keys().find(section);
      if (it == allowed_keys().end()) {
        if (node.empty()) fail(section, "key outside any section");
        fail("[" + section + "]", "unknown section");
      }
      for (const auto& [key, value] : node)
        if (!it->second.count(key)) fail(section + "." + key, "unknown key");
    }
  }

  const std::string& source() const { return source_; }

 private:
  const pt::ptree& tree_;
  std::string source_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

void require_sorted(const Reader& r, const std::string& where, const std::vector<double>& grid) {
  if (grid.empty()) r.fail(where, "grid is empty", ErrorKind::InvalidArgument);
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) r.fail(where, "grid must be strictly ascending", ErrorKind::InvalidArgument);
}

std::vector<double> velocity_grid(const Reader& r) {
  const bool single = r.raw("beam", "velocity").has_value();
  const bool listed = r.raw("beam", "velocities").has_value();
  const bool ranged = r.raw("beam", "velocity_min").has_value() || r.raw("beam", "velocity_max").has_value() ||
                      r.raw("beam", "velocity_points").has_value();
  if (single + listed + ranged > 1)
    r.fail("beam", "give only one of velocity, velocities or velocity_min/max/points");
  std::vector<double> grid;
  if (single) {
    double v = 0;
    r.get("beam", "velocity", v);
    grid.push_back(v);
  } else if (listed) {
    grid = *r.list("beam", "velocities");
  } else if (ranged) {
    double lo = 0, hi = 0;
    int points = 0;
    std::string spacing = "log";
    r.get("beam", "velocity_min", lo);
    r.get("beam", "velocity_max", hi);
    r.get("beam", "velocity_points", points);
    r.get("beam", "velocity_spacing", spacing);
    if (points < 2 || !(hi > lo) || !(lo > 0))
      r.fail("beam", "velocity range needs 0 < velocity_min < velocity_max and velocity_points >= 2",
             ErrorKind::InvalidArgument);
    if (spacing != "log" && spacing != "linear") r.fail("beam.velocity_spacing", "expected log or linear");
    for (int i = 0; i < points; ++i) {
      const double f = static_cast<double>(i) / (points - 1);
      grid.push_back(spacing == "log" ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
    }
    grid.back() = hi;
  }
  if (!grid.empty()) {
    require_sorted(r, "beam velocities", grid);
    if (!(grid.front() > 0)) r.fail("beam velocities", "velocities must be positive", ErrorKind::InvalidArgument);
  }
  return grid;
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& source, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.line() << ": " << e.message();
    throw Error(ErrorKind::ParseError, msg.str());
  }
  Reader r(tree, source);
  r.check_keys();

  RunConfig c;
  c.source = source;

  // beam
  r.get("beam", "species", c.beam.species);
  const bool has_mass = r.raw("beam", "mass").has_value();
  if (!c.beam.species.empty() && has_mass) r.fail("beam", "give species or mass, not both");
  if (!c.beam.species.empty()) {
    if (c.beam.species != "argon-metastable") r.fail("beam.species", "unknown species '" + c.beam.species + "'");
    c.beam.mass = kArgonMetastableMass;
    c.material.polarizability = data_dir() / "argon_metastable_polarizability.txt";
  } else if (has_mass) {
    r.get("beam", "mass", c.beam.mass);
    if (!(c.beam.mass > 0)) r.fail("beam.mass", "mass must be positive", ErrorKind::InvalidArgument);
  } else {
    c.beam.species = "argon-metastable";
    c.beam.mass = kArgonMetastableMass;
    c.material.polarizability = data_dir() / "argon_metastable_polarizability.txt";
  }
  c.beam.velocities = velocity_grid(r);

  // potential
  auto& p = c.potential;
  r.get("potential", "model", p.model);
  static const std::set<std::string> models{"step", "power-law", "non-retarded", "retarded", "intermediate",
                                            "casimir-polder"};
  if (!models.count(p.model)) r.fail("potential.model", "unknown model '" + p.model + "'");
  r.get("potential", "C3", p.C3);
  r.get("potential", "C4", p.C4);
  r.get("potential", "lambda", p.lambda);
  r.get("potential", "n", p.n);
  r.get("potential", "U0", p.U0);
  r.get("potential", "U1", p.U1);
  r.get("potential", "U2", p.U2);
  r.get("potential", "double_wall_L", p.double_wall_L);
  if (p.C3 && !(*p.C3 >= 0)) r.fail("potential.C3", "must be >= 0", ErrorKind::InvalidArgument);
  if (p.C4 && !(*p.C4 >= 0)) r.fail("potential.C4", "must be >= 0", ErrorKind::InvalidArgument);
  if (!(p.double_wall_L >= 0)) r.fail("potential.double_wall_L", "must be >= 0", ErrorKind::InvalidArgument);

  // material
  std::string path;
  r.get("material", "polarizability", path);
  if (!path.empty()) c.material.polarizability = resolve(base_dir, path);
  path.clear();
  r.get("material", "permittivity", path);
  c.material.permittivity = path.empty() ? data_dir() / "silicon_nitride_permittivity.txt" : resolve(base_dir, path);
  r.get("material", "temperature", c.material.thermal.temperature);
  r.get("material", "matsubara_terms", c.material.thermal.n_matsubara);
  for (const auto* file : {&c.material.polarizability, &c.material.permittivity})
    if (!file->empty() && !std::filesystem::exists(*file))
      r.fail("material", "file not found: " + file->string(), ErrorKind::InvalidArgument);
  if (!(c.material.thermal.temperature > 0) || c.material.thermal.n_matsubara < 1)
    r.fail("material", "temperature must be > 0 and matsubara_terms >= 1", ErrorKind::InvalidArgument);

  // grating
  auto& g = c.grating;
  r.get("grating", "p0", g.geometry.p0);
  r.get("grating", "w", g.geometry.w);
  r.get("grating", "d", g.geometry.d);
  r.get("grating", "slits", g.geometry.N);
  r.get("grating", "theta_points", g.theta_points);
  if (auto v = r.list("grating", "velocities")) g.velocities = *v;
  require_sorted(r, "grating.velocities", g.velocities);
  if (g.theta_points < 1) r.fail("grating.theta_points", "must be >= 1", ErrorKind::InvalidArgument);
  g.geometry.validate();

  // pattern
  auto& pa = c.pattern;
  r.get("pattern", "theta", pa.theta);
  r.get("pattern", "velocity", pa.velocity);
  r.get("pattern", "v_z", pa.v_z);
  r.get("pattern", "alpha_min", pa.alpha_min);
  r.get("pattern", "alpha_max", pa.alpha_max);
  r.get("pattern", "alpha_points", pa.alpha_points);
  r.get("pattern", "L1", pa.L1);
  r.get("pattern", "L2", pa.L2);
  r.get("pattern", "I0", pa.I0);
  r.get("pattern", "edge_cut", pa.edge_cut);
  if (pa.alpha_points < 2 || !(pa.alpha_max > pa.alpha_min))
    r.fail("pattern", "need alpha_min < alpha_max and alpha_points >= 2", ErrorKind::InvalidArgument);
  if (!(pa.velocity > 0) || (pa.v_z && !(*pa.v_z > 0)))
    r.fail("pattern", "velocities must be positive", ErrorKind::InvalidArgument);

  // tolerance
  r.get("tolerance", "rel", c.tolerance.rel);
  r.get("tolerance", "abs", c.tolerance.abs);
  r.get("tolerance", "max_steps", c.tolerance.max_steps);
  r.get("tolerance", "start_factor", c.start_factor);
  c.tolerance.validate();
  if (!(c.start_factor > 1)) r.fail("tolerance.start_factor", "must be > 1", ErrorKind::InvalidArgument);

  // scan
  auto& s = c.scan;
  r.get("scan", "z_min", s.z_min);
  r.get("scan", "z_max", s.z_max);
  r.get("scan", "z_points", s.z_points);
  r.get("scan", "reflection_lo", s.reflection_lo);
  r.get("scan", "reflection_hi", s.reflection_hi);
  r.get("scan", "solver", s.solver);
  r.get("scan", "delta", s.delta);
  r.get("scan", "z_far", s.z_far);
  if (!(s.z_min > 0) || !(s.z_max > s.z_min) || s.z_points < 2)
    r.fail("scan", "need 0 < z_min < z_max and z_points >= 2", ErrorKind::InvalidArgument);
  if (!(s.reflection_lo > 0) || !(s.reflection_hi > s.reflection_lo))
    r.fail("scan", "need 0 < reflection_lo < reflection_hi", ErrorKind::InvalidArgument);
  if (s.solver != "riccati" && s.solver != "multistep") r.fail("scan.solver", "expected riccati or multistep");
  if (!(s.delta > 0) || !(s.z_far > 0)) r.fail("scan", "delta and z_far must be positive", ErrorKind::InvalidArgument);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open config file " + path.string());
  return parse_config(in, path.string(), path.parent_path());
}

}  // namespace qreflect::cli
