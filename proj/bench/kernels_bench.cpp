#include <benchmark/benchmark.h>

#include <vector>

#include "neckfield/fem.hpp"
#include "neckfield/geometry.hpp"
#include "neckfield/meshgen.hpp"
#include "neckfield/sparse.hpp"

using namespace neckfield;

namespace {

// five-point Laplacian on an m x m grid
CsrMatrix laplacian(int m) {
  std::vector<std::pair<int, int>> entries;
  auto id = [m](int i, int j) { return i * m + j; };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      entries.push_back({id(i, j), id(i, j)});
      if (i > 0) entries.push_back({id(i, j), id(i - 1, j)});
      if (i + 1 < m) entries.push_back({id(i, j), id(i + 1, j)});
      if (j > 0) entries.push_back({id(i, j), id(i, j - 1)});
      if (j + 1 < m) entries.push_back({id(i, j), id(i, j + 1)});
    }
  CsrMatrix a = CsrMatrix::from_pattern(m * m, m * m, entries);
  for (int r = 0; r < a.rows; ++r)
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) a.val[k] = a.col[k] == r ? 4.001 : -1.0;
  return a;
}

template <bool Parallel>
void BM_Spmv(benchmark::State& state) {
  const CsrMatrix a = laplacian(static_cast<int>(state.range(0)));
  std::vector<double> x(a.rows, 1.0), y(a.rows);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::parallel::spmv(a, x.data(), y.data());
    else kernels::serial::spmv(a, x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(a.val.size()));
}

template <bool Parallel>
void BM_Dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n, 1.5), y(n, 0.5);
  for (auto _ : state) {
    double d = Parallel ? kernels::parallel::dot(x.data(), y.data(), n)
                        : kernels::serial::dot(x.data(), y.data(), n);
    benchmark::DoNotOptimize(d);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

template <bool Parallel>
void BM_Axpy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n, 1.5), y(n, 0.5);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::parallel::axpy(1e-9, x.data(), y.data(), n);
    else kernels::serial::axpy(1e-9, x.data(), y.data(), n);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

template <bool Parallel>
void BM_Xpby(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n, 1.5), y(n, 0.5);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::parallel::xpby(x.data(), 0.5, y.data(), n);
    else kernels::serial::xpby(x.data(), 0.5, y.data(), n);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

const Mesh& neck_mesh() {
  static const Mesh mesh = [] {
    const DomainSpec domain = symmetric_domain(1e-3);
    return build_mesh(domain, profile_from_domain(domain, 0.25), GradingPolicy{});
  }();
  return mesh;
}

template <bool Parallel>
void BM_Assemble(benchmark::State& state) {
  const Mesh& mesh = neck_mesh();
  const RobinProblem problem{&mesh, 1e-3, odd_boundary_data(1e-3), 0};
  for (auto _ : state) {
    AssembledSystem sys = assemble(problem, Parallel);
    benchmark::DoNotOptimize(sys.rhs.data());
  }
  state.counters["nodes"] = static_cast<double>(mesh.nodes.size());
}

}  // namespace

BENCHMARK(BM_Spmv<false>)->Arg(256)->Arg(1024)->Name("spmv/serial");
BENCHMARK(BM_Spmv<true>)->Arg(256)->Arg(1024)->Name("spmv/parallel");
BENCHMARK(BM_Dot<false>)->Arg(1 << 16)->Arg(1 << 22)->Name("dot/serial");
BENCHMARK(BM_Dot<true>)->Arg(1 << 16)->Arg(1 << 22)->Name("dot/parallel");
BENCHMARK(BM_Axpy<false>)->Arg(1 << 16)->Arg(1 << 22)->Name("axpy/serial");
BENCHMARK(BM_Axpy<true>)->Arg(1 << 16)->Arg(1 << 22)->Name("axpy/parallel");
BENCHMARK(BM_Xpby<false>)->Arg(1 << 16)->Arg(1 << 22)->Name("xpby/serial");
BENCHMARK(BM_Xpby<true>)->Arg(1 << 16)->Arg(1 << 22)->Name("xpby/parallel");
BENCHMARK(BM_Assemble<false>)->Unit(benchmark::kMillisecond)->Name("assemble/serial");
BENCHMARK(BM_Assemble<true>)->Unit(benchmark::kMillisecond)->Name("assemble/parallel");

BENCHMARK_MAIN();
