// Serial reference vs OpenMP path for each data-parallel kernel.
// Argument 0 runs Execution::Serial, 1 runs Execution::Parallel.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <memory>
#include <vector>

#include "qreflect/badlands.hpp"
#include "qreflect/constants.hpp"
#include "qreflect/grating.hpp"
#include "qreflect/material.hpp"
#include "qreflect/potential.hpp"
#include "qreflect/reflection.hpp"

using namespace qreflect;

namespace {

constexpr double kC3 = 8.1296e-49;
constexpr double kC4 = 1.1778e-55;

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

const OpticalResponse& polarizability() {
  static const auto r =
      OpticalResponse::load(std::filesystem::path(QREFLECT_DATA_DIR) / "argon_metastable_polarizability.txt");
  return r;
}

const OpticalResponse& permittivity() {
  static const auto r =
      OpticalResponse::load(std::filesystem::path(QREFLECT_DATA_DIR) / "silicon_nitride_permittivity.txt");
  return r;
}

void BM_C3Sum(benchmark::State& state) {
  const ThermalConfig thermal{300.0, 200000};
  for (auto _ : state) benchmark::DoNotOptimize(c3_coefficient(polarizability(), permittivity(), thermal, mode(state)));
}
BENCHMARK(BM_C3Sum)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CasimirPolderJet(benchmark::State& state) {
  const CasimirPolderModel model(polarizability(), permittivity(), {300.0, 2000});
  for (auto _ : state) benchmark::DoNotOptimize(model.jet(50e-9, mode(state)));
}
BENCHMARK(BM_CasimirPolderJet)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Multistep(benchmark::State& state) {
  const auto U = PotentialModel::intermediate(kC3, kC4);
  const auto beam = BeamSpec::make(constants::argon_mass, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(multistep_reflection(U, beam, 10.1e-6, 0.1e-6, 0.05e-9, mode(state)));
}
BENCHMARK(BM_Multistep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BreakdownScan(benchmark::State& state) {
  const auto wall = PotentialModel::double_wall(PotentialModel::intermediate(kC3, kC4), 500e-9);
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(0.01 + 2e-4 * i);
  for (auto _ : state) benchmark::DoNotOptimize(breakdown_scan(wall, constants::argon_mass, grid, mode(state)));
}
BENCHMARK(BM_BreakdownScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TransmittedPattern(benchmark::State& state) {
  const GratingGeometry geom{1000e-9, 500e-9, 1000e-9, 10};
  PatternSpec spec;
  spec.theta = 0.1;
  spec.K = BeamSpec::make(constants::argon_mass, 1.0).wave_number();
  for (int i = 0; i < 2001; ++i) spec.alpha_grid.push_back(-0.05 + 1e-4 * 0.5 * i);
  for (auto _ : state)
    benchmark::DoNotOptimize(pattern_transmitted(spec, geom, kC3, 1.0, -1.0, {1e-10, 0.0, 100000}, mode(state)));
}
BENCHMARK(BM_TransmittedPattern)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ReflectedPattern(benchmark::State& state) {
  const GratingGeometry geom{1000e-9, 500e-9, 1000e-9, 100};
  PatternSpec spec;
  spec.theta = 0.25;
  spec.K = BeamSpec::make(constants::argon_mass, 1.0).wave_number();
  for (int i = 0; i < 200001; ++i) spec.alpha_grid.push_back(0.4 + 1e-6 * i);
  for (auto _ : state) benchmark::DoNotOptimize(pattern_reflected(spec, geom, 0.01, mode(state)));
}
BENCHMARK(BM_ReflectedPattern)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
