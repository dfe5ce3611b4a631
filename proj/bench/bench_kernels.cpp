// Serial reference vs threaded kernels for the four simulators.
// Thread count follows VLAB_THREADS (or OpenMP defaults).
#include <benchmark/benchmark.h>

#include "vlab/contract.hpp"
#include "vlab/markov.hpp"
#include "vlab/parallel.hpp"
#include "vlab/presets.hpp"

using namespace vlab;

namespace {

constexpr std::size_t kPaths = 256;

const CoefficientSet& coeffs() {
  static const CoefficientSet c = coefficient_preset("smooth-kernel", 1.0);
  return c;
}

template <bool Ref>
void lifted(benchmark::State& st) {
  const TimeGrid time(1.0, static_cast<int>(st.range(0)));
  const auto x0 = SobolevPath::constant(time, 1.0);
  LiftedOptions o;
  o.store_sheets = false;
  for (auto _ : st) {
    auto e = Ref ? reference::simulate_lifted(coeffs(), ControlPath::constant(0.0), x0, time, kPaths, 1, o)
                 : simulate_lifted(coeffs(), ControlPath::constant(0.0), x0, time, kPaths, 1, o);
    benchmark::DoNotOptimize(e.data().data());
  }
}

template <bool Ref>
void direct(benchmark::State& st) {
  const TimeGrid time(1.0, static_cast<int>(st.range(0)));
  for (auto _ : st) {
    auto e = Ref ? reference::simulate_direct(coeffs(), ControlPath::constant(0.0), 1.0, time, kPaths, 1)
                 : simulate_direct(coeffs(), ControlPath::constant(0.0), 1.0, time, kPaths, 1);
    benchmark::DoNotOptimize(e.data().data());
  }
}

template <bool Ref>
void truncated(benchmark::State& st) {
  const TimeGrid g(1.0, 64), time(1.0, 128);
  const auto basis = cosine_basis(32, g);
  const auto model = separable_preset("smooth-kernel", 1.0);
  const auto proj = project_coefficients(model, SobolevPath::constant(g, 1.0), basis, time);
  const auto rep = representer_coeffs(basis, time);
  const int n = static_cast<int>(st.range(0));
  for (auto _ : st) {
    auto e = Ref ? reference::simulate_truncated(n, proj, rep, 1.0, kPaths * 4, 1, 1)
                 : simulate_truncated(n, proj, rep, 1.0, kPaths * 4, 1, 1);
    benchmark::DoNotOptimize(e.data().data());
  }
}

template <bool Ref>
void reduced(benchmark::State& st) {
  const DiscountSpec spec{{0.6, 0.4}, {0.0, 1.0}};
  const TimeGrid time(1.0, static_cast<int>(st.range(0)));
  const std::vector<double> y0{0.0, 0.0};
  const ZRule z = [](double, std::span<const double>, std::span<double> out) {
    for (auto& v : out) v = 0.1;
  };
  const auto cost = clamped_quadratic_cost(1.0);
  for (auto _ : st) {
    auto e = Ref ? reference::simulate_reduced(spec, z, cost, y0, time, kPaths * 16, 1)
                 : simulate_reduced(spec, z, cost, y0, time, kPaths * 16, 1);
    benchmark::DoNotOptimize(e.y.data());
  }
}

}  // namespace

BENCHMARK(lifted<true>)->Name("lifted/reference")->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(lifted<false>)->Name("lifted/kernel")->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(direct<true>)->Name("direct/reference")->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(direct<false>)->Name("direct/kernel")->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(truncated<true>)->Name("truncated/reference")->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(truncated<false>)->Name("truncated/kernel")->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(reduced<true>)->Name("reduced/reference")->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(reduced<false>)->Name("reduced/kernel")->Arg(200)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  apply_thread_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
