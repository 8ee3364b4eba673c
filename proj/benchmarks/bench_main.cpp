#include <benchmark/benchmark.h>

#include <filesystem>

#include "dynpol/curves.hpp"
#include "dynpol/magic.hpp"
#include "dynpol/polarizability.hpp"
#include "dynpol/vibsolver.hpp"

using namespace dynpol;

namespace {

std::filesystem::path data(const char* name) { return std::filesystem::path(DYNPOL_BENCH_DATA_DIR) / name; }

constexpr double kMu = 20000.0;

void BM_SolveMorse(benchmark::State& state) {
  const PotentialCurve c = load_potential(data("morse_dense.dat"));
  GridOptions o;
  o.beta = static_cast<double>(state.range(0)) / 10.0;
  const MappedGrid g = build_grid(c, kMu, 0.0, o);
  for (auto _ : state) benchmark::DoNotOptimize(solve_single(c, kMu, g));
  state.counters["points"] = static_cast<double>(g.size());
}
BENCHMARK(BM_SolveMorse)->Arg(14)->Arg(28)->Unit(benchmark::kMillisecond);

void BM_BuildTable(benchmark::State& state) {
  const PotentialCurve lo = load_potential(data("morse_dense.dat"));
  const PotentialCurve hi = load_potential(data("morse_upper.dat"));
  const TransitionDipoleCurve d = load_dipole(data("morse_pair_dipole.dat"));
  const auto a = solve_single(lo, kMu, build_grid(lo, kMu, 0.0));
  const auto b = solve_single(hi, kMu, build_grid(hi, kMu, 0.05));
  const std::vector<ExcitedSystem> ex{{&b, &d}};
  for (auto _ : state) benchmark::DoNotOptimize(build_table(a, 0, ex));
}
BENCHMARK(BM_BuildTable)->Unit(benchmark::kMillisecond);

void BM_AlphaAtomic(benchmark::State& state) {
  const AtomicModel cs = load_atomic_model(data("cs_lines.dat"));
  double w = 0.04;
  for (auto _ : state) {
    benchmark::DoNotOptimize(alpha_atomic(cs, w));
    w += 1e-12;
  }
}
BENCHMARK(BM_AlphaAtomic);

void BM_ScanPair(benchmark::State& state) {
  const AtomicModel cs = load_atomic_model(data("cs_lines.dat"));
  ScanOptions o;
  o.threads = static_cast<unsigned>(state.range(0));
  const double lo = 8000.0 / constants::hartree_in_cm1, hi = 9000.0 / constants::hartree_in_cm1;
  for (auto _ : state) benchmark::DoNotOptimize(scan_pair(cs, lo, hi, default_scan_step(), o));
  state.SetItemsProcessed(state.iterations() * 80001);
}
BENCHMARK(BM_ScanPair)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_FindMagic(benchmark::State& state) {
  const TransitionTable t = load_transition_table(data("triplet_table.dat"));
  const AtomicModel atom = load_atomic_model(data("triplet_atom.dat"));
  const double lo = 8000.0 / constants::hartree_in_cm1, hi = 11500.0 / constants::hartree_in_cm1;
  const auto m = scan(t, RotationalState::isotropic(), lo, hi, default_scan_step());
  const auto r = scan_pair(atom, lo, hi, default_scan_step());
  for (auto _ : state) benchmark::DoNotOptimize(find_magic(m, r));
}
BENCHMARK(BM_FindMagic)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
