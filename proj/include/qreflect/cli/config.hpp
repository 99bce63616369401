#pragma once

// Run configuration for the qreflect command line tool.
//
// INI grammar, one file per run. Unknown sections or keys are rejected.
//
//   [beam]       species | mass, velocity | velocities | velocity_min/max/points/spacing
//   [potential]  model, C3, C4, lambda, n, U0, U1, U2, double_wall_L
//   [material]   polarizability, permittivity, temperature, matsubara_terms
//   [grating]    p0, w, d, slits, theta_points, velocities
//   [pattern]    theta, velocity, v_z, alpha_min, alpha_max, alpha_points, L1, L2, I0, edge_cut
//   [tolerance]  rel, abs, max_steps, start_factor
//   [scan]       z_min, z_max, z_points, reflection_lo, reflection_hi, solver, delta, z_far
//
// Lists are comma separated. Relative file paths are taken relative to the
// directory holding the config file.

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "qreflect/grating.hpp"
#include "qreflect/material.hpp"
#include "qreflect/numerics.hpp"

namespace qreflect::cli {

struct BeamConfig {
  std::string species;  // empty when mass was given directly
  double mass = 0.0;
  std::vector<double> velocities;  // ascending
};

struct PotentialConfig {
  std::string model = "intermediate";
  // Unset coefficients are computed from the material section.
  std::optional<double> C3, C4;
  double lambda = 0.0;
  int n = -3;
  double U0 = 0.0, U1 = 0.0, U2 = 0.0;
  double double_wall_L = 0.0;  // 0: single wall
};

struct MaterialConfig {
  std::filesystem::path polarizability;
  std::filesystem::path permittivity;
  ThermalConfig thermal;
};

struct GratingConfig {
  GratingGeometry geometry{1000e-9, 500e-9, 1000e-9, 1};
  int theta_points = 40;
  std::vector<double> velocities{0.1, 1.0, 10.0, 20.0};
};

struct PatternConfig {
  double theta = 0.2;
  double velocity = 1.0;
  std::optional<double> v_z;  // defaults to velocity
  double alpha_min = -0.05, alpha_max = 0.45;
  int alpha_points = 2001;
  double L1 = 1.0, L2 = 1.0, I0 = 1.0;
  double edge_cut = -1.0;  // negative: default cut
};

struct ScanConfig {
  double z_min = 1e-9, z_max = 10e-6;
  int z_points = 200;
  double reflection_lo = 0.1e-9, reflection_hi = 10e-6;
  std::string solver = "riccati";
  double delta = 1e-9;
  double z_far = 10e-6;  // multistep span above z_r
};

struct RunConfig {
  std::filesystem::path source;
  BeamConfig beam;
  PotentialConfig potential;
  MaterialConfig material;
  GratingConfig grating;
  PatternConfig pattern;
  ToleranceSpec tolerance{1e-10, 1e-12, 2'000'000};
  double start_factor = 100.0;
  ScanConfig scan;
};

inline constexpr double kArgonMetastableMass = 6.6335e-26;

/// Parse the INI text. base_dir anchors relative paths. Throws Error
/// (ParseError, InvalidArgument, OutOfRange) on any problem.
RunConfig parse_config(std::istream& in, const std::string& source, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Directory holding the bundled material files.
std::filesystem::path data_dir();

}  // namespace qreflect::cli
