#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "neckfield/errors.hpp"
#include "neckfield/sparse.hpp"

using namespace neckfield;

namespace {

// 2D five-point Laplacian plus a small shift, n = m * m unknowns
CsrMatrix laplacian(int m, double shift = 1e-3) {
  const int n = m * m;
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
  CsrMatrix a = CsrMatrix::from_pattern(n, n, entries);
  for (int r = 0; r < n; ++r)
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) a.val[k] = a.col[k] == r ? 4.0 + shift : -1.0;
  return a;
}

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double true_residual(const LinearOperator& op, const std::vector<double>& b,
                     const std::vector<double>& x) {
  std::vector<double> ax;
  op.apply(x, ax, false);
  double r = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    r += (b[i] - ax[i]) * (b[i] - ax[i]);
    nb += b[i] * b[i];
  }
  return std::sqrt(r / nb);
}

}  // namespace

TEST_CASE("pattern construction sorts and deduplicates columns") {
  const CsrMatrix a = CsrMatrix::from_pattern(2, 3, {{1, 2}, {0, 1}, {1, 0}, {0, 1}});
  CHECK(a.row_ptr == std::vector<int>{0, 1, 3});
  CHECK(a.col == std::vector<int>{1, 0, 2});
  CHECK(a.find(1, 2) == 2);
  CHECK(a.find(0, 0) == -1);
  CHECK(a.at(0, 0) == 0.0);
}

TEST_CASE("serial and parallel kernels are bit-identical") {
  // long enough to span several dot chunks
  const CsrMatrix a = laplacian(150);
  const std::size_t n = std::size_t(a.rows);
  REQUIRE(n > 4 * kernels::kDotChunk);
  const auto x = random_vector(n, 1), y = random_vector(n, 2);

  CHECK(kernels::serial::dot(x.data(), y.data(), n) == kernels::parallel::dot(x.data(), y.data(), n));

  std::vector<double> s(n), p(n);
  kernels::serial::spmv(a, x.data(), s.data());
  kernels::parallel::spmv(a, x.data(), p.data());
  CHECK(s == p);

  s = y;
  p = y;
  kernels::serial::axpy(0.37, x.data(), s.data(), n);
  kernels::parallel::axpy(0.37, x.data(), p.data(), n);
  CHECK(s == p);

  kernels::serial::xpby(x.data(), -1.3, s.data(), n);
  kernels::parallel::xpby(x.data(), -1.3, p.data(), n);
  CHECK(s == p);
}

TEST_CASE("kernels agree with direct formulas") {
  const std::vector<double> x{1, 2, 3}, y{4, -5, 6};
  CHECK(kernels::serial::dot(x.data(), y.data(), 3) == 12.0);
  std::vector<double> z = y;
  kernels::serial::axpy(2.0, x.data(), z.data(), 3);
  CHECK(z == std::vector<double>{6, -1, 12});
  kernels::serial::xpby(x.data(), 0.5, z.data(), 3);
  CHECK(z == std::vector<double>{4, 1.5, 9});
}

TEST_CASE("operator entries include the rank-one terms") {
  LinearOperator op;
  op.matrix = laplacian(4);
  op.low_rank.push_back({{1, 5, 7}, {1.0, -2.0, 0.5}, 0.25});
  CHECK(op.entry(1, 5) == doctest::Approx(-1.0 - 0.5));
  CHECK(op.entry(1, 7) == doctest::Approx(0.125));
  CHECK(op.entry(5, 5) == doctest::Approx(4.001 + 1.0));
  CHECK(op.diagonal()[7] == doctest::Approx(4.001 + 0.0625));

  const auto x = random_vector(16, 3);
  std::vector<double> ax;
  op.apply(x, ax);
  for (int i = 0; i < 16; ++i) {
    double want = 0.0;
    for (int j = 0; j < 16; ++j) want += op.entry(i, j) * x[j];
    CHECK(ax[i] == doctest::Approx(want).epsilon(1e-14));
  }
  std::vector<double> serial;
  op.apply(x, serial, false);
  CHECK(serial == ax);
}

TEST_CASE("symmetry check") {
  CsrMatrix a = laplacian(5);
  CHECK(a.is_symmetric());
  a.val[a.find(0, 1)] += 1e-3;
  CHECK(!a.is_symmetric());
  CHECK(a.is_symmetric(1e-2));
}

TEST_CASE("pcg reaches the tolerance with every preconditioner") {
  LinearOperator op;
  op.matrix = laplacian(40);
  op.low_rank.push_back({{0, 1, 2, 3}, {1, 1, 1, 1}, 2.0});
  const int n = op.size();
  const auto b = random_vector(std::size_t(n), 4);

  const JacobiPreconditioner jacobi(op);
  const IncompleteCholesky ic(op);
  std::vector<double> tent(std::size_t(n), 0.0);
  for (int i = 0; i < n / 2; ++i) tent[std::size_t(i)] = 1.0;
  const CoarseCorrectedJacobi coarse(op, {tent});

  std::vector<std::vector<double>> solutions;
  for (const Preconditioner* m : {static_cast<const Preconditioner*>(&jacobi),
                                  static_cast<const Preconditioner*>(&ic),
                                  static_cast<const Preconditioner*>(&coarse)}) {
    std::vector<double> x(std::size_t(n), 0.0);
    const SolveStats s = pcg(op, b, x, *m, {1e-10, 0, true});
    CHECK(s.relative_residual <= 1e-10);
    CHECK(true_residual(op, b, x) <= 1e-10);
    CHECK(s.history.size() >= 2);
    solutions.push_back(x);
  }
  for (std::size_t i = 0; i < solutions[0].size(); ++i) {
    CHECK(solutions[1][i] == doctest::Approx(solutions[0][i]).epsilon(1e-6));
    CHECK(solutions[2][i] == doctest::Approx(solutions[0][i]).epsilon(1e-6));
  }
}

TEST_CASE("pcg is bit-identical serial and parallel") {
  LinearOperator op;
  op.matrix = laplacian(100);
  const auto b = random_vector(std::size_t(op.size()), 5);
  const JacobiPreconditioner m(op);
  std::vector<double> xs(b.size(), 0.0), xp(b.size(), 0.0);
  const SolveStats ss = pcg(op, b, xs, m, {1e-10, 0, false});
  const SolveStats sp = pcg(op, b, xp, m, {1e-10, 0, true});
  CHECK(xs == xp);
  CHECK(ss.iterations == sp.iterations);
  CHECK(ss.history == sp.history);
}

TEST_CASE("pcg reports the residual history when the cap is reached") {
  LinearOperator op;
  op.matrix = laplacian(30);
  const auto b = random_vector(std::size_t(op.size()), 6);
  const JacobiPreconditioner m(op);
  std::vector<double> x(b.size(), 0.0);
  try {
    pcg(op, b, x, m, {1e-12, 3, true});
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(!e.residual_history().empty());
    CHECK(e.residual_history().size() <= 4);
  }
}

TEST_CASE("zero right-hand side returns immediately") {
  LinearOperator op;
  op.matrix = laplacian(5);
  const std::vector<double> b(25, 0.0);
  std::vector<double> x(25, 0.0);
  const SolveStats s = pcg(op, b, x, JacobiPreconditioner(op), {});
  CHECK(s.iterations == 0);
  for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("extended residual resolves cancellation between large entries") {
  // (1e8 + 1) x - 1e8 x with x = 1 + 2^-30: each product needs 57 bits
  LinearOperator op;
  op.matrix = CsrMatrix::from_pattern(1, 2, {{0, 0}, {0, 1}});
  op.matrix.val = {1e8 + 1.0, -1e8};
  const double x = 1.0 + std::ldexp(1.0, -30);
  std::vector<double> r;
  op.residual({0.0}, {x, x}, r);
  CHECK(r[0] == -x);

  LinearOperator lap;
  lap.matrix = laplacian(20);
  lap.low_rank.push_back({{0, 3, 9}, {1.0, 2.0, -1.0}, 0.5});
  const auto v = random_vector(400, 7), b = random_vector(400, 8);
  std::vector<double> ax;
  lap.apply(v, ax);
  lap.residual(b, v, r);
  for (int i = 0; i < 400; ++i) CHECK(r[i] == doctest::Approx(b[i] - ax[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("penalty systems converge with the coarse correction") {
  // penalty (I - 1 1^T / |S|) on the first grid row, as for a free inclusion
  const int m = 60;
  for (double penalty : {1e4, 1e6}) {
    LinearOperator op;
    op.matrix = laplacian(m);
    LowRankTerm term;
    for (int i = 0; i < m; ++i) {
      op.matrix.val[op.matrix.find(i, i)] += penalty;
      term.index.push_back(i);
      term.value.push_back(1.0);
    }
    term.coeff = -penalty / m;
    op.low_rank.push_back(term);
    std::vector<double> tent(std::size_t(m * m));
    for (int i = 0; i < m * m; ++i) tent[std::size_t(i)] = std::max(0.0, 1.0 - (i / m) / 10.0);
    const CoarseCorrectedJacobi pre(op, {tent});

    const auto b = random_vector(std::size_t(m * m), 8);
    std::vector<double> x(b.size(), 0.0);
    const SolveStats s = pcg(op, b, x, pre, {1e-10, 0, true});
    CHECK(s.relative_residual <= 1e-10);
    CHECK(true_residual(op, b, x) <= 1e-9);
  }
}
