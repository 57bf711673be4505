#include <benchmark/benchmark.h>

#include "fracocp/assembly.hpp"
#include "fracocp/control.hpp"
#include "fracocp/estimator.hpp"
#include "fracocp/experiments.hpp"

using namespace fracocp;

namespace {

Mesh disk(int levels) {
  Mesh m = initial_mesh(Domain::Disk, 2);
  for (int k = 0; k < levels; ++k) m = uniform_refine(m);
  return m;
}

void BM_Stiffness(benchmark::State& state) {
  Mesh m = disk(static_cast<int>(state.range(0)));
  KernelParams p = make_kernel_params(0.75);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(m, p));
  state.counters["dofs"] = m.num_dofs;
}
BENCHMARK(BM_Stiffness)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_ComplementTerm(benchmark::State& state) {
  Mesh m = disk(static_cast<int>(state.range(0)));
  KernelParams p = make_kernel_params(0.75);
  auto rho = ComplementDensity::from_mesh(m, 0.75);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_complement_term(m, p, rho));
}
BENCHMARK(BM_ComplementTerm)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_TouchingPair(benchmark::State& state) {
  std::array<Vec2, 3> t = {Vec2(1, 0), Vec2(0, 1), Vec2(0, 0)};
  int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(common_edge_block(t, Vec2(1, 1), 0.75, n));
}
BENCHMARK(BM_TouchingPair)->Arg(5)->Arg(8)->Arg(12);

void BM_Estimator(benchmark::State& state) {
  Mesh m = disk(static_cast<int>(state.range(0)));
  ProblemSpec spec = setup_example1(0.75);
  KernelParams p = make_kernel_params(0.75);
  FeFunction y = interpolate(m, [](const Vec2& x) { return 1 - x.squaredNorm(); });
  Control u = control_update_semi(y, y, spec);
  for (auto _ : state) benchmark::DoNotOptimize(state_adjoint_indicators(m, y, y, u, spec, p, 1));
}
BENCHMARK(BM_Estimator)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_Cholesky(benchmark::State& state) {
  Mesh m = disk(static_cast<int>(state.range(0)));
  Eigen::MatrixXd A = assemble_stiffness(m, make_kernel_params(0.75));
  Eigen::MatrixXd Mu = Eigen::MatrixXd::Zero(A.rows(), A.cols());
  for (auto _ : state) {
    GalerkinSolver solver(m, A, Mu);
    benchmark::DoNotOptimize(solver.system().data());
  }
}
BENCHMARK(BM_Cholesky)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
