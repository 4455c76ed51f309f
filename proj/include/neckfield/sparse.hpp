#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace neckfield {

/// Compressed sparse row matrix with sorted column indices.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  double at(int i, int j) const;
  std::vector<double> diagonal() const;
  bool is_symmetric(double rel_tol = 0.0) const;

  /// Builds the pattern from (row, col) pairs; values start at zero.
  static CsrMatrix from_pattern(int rows, int cols, std::vector<std::pair<int, int>> entries);
  /// Position of entry (i, j) in val, or -1.
  int find(int i, int j) const;
};

/// coeff * v v^T with a sparse vector v.
struct LowRankTerm {
  std::vector<int> index;
  std::vector<double> value;
  double coeff = 0.0;
};

/// Sparse matrix plus a short list of symmetric rank-one updates.
struct LinearOperator {
  CsrMatrix matrix;
  std::vector<LowRankTerm> low_rank;

  int size() const { return matrix.rows; }
  void apply(const std::vector<double>& x, std::vector<double>& y, bool parallel = true) const;
  /// r = b - A x with extended-precision accumulation, rounded once per row.
  void residual(const std::vector<double>& b, const std::vector<double>& x,
                std::vector<double>& r) const;
  std::vector<double> diagonal() const;
  /// Entry (i, j) including the low-rank terms (slow; for tests).
  double entry(int i, int j) const;
};

namespace kernels {

/// Dot products sum fixed-size chunks and then add the chunk sums in order,
/// so serial and parallel results are bit-identical for any thread count.
inline constexpr std::size_t kDotChunk = 4096;

namespace serial {
void spmv(const CsrMatrix& a, const double* x, double* y);
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void xpby(const double* x, double beta, double* y, std::size_t n);
}  // namespace serial

namespace parallel {
void spmv(const CsrMatrix& a, const double* x, double* y);
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void xpby(const double* x, double beta, double* y, std::size_t n);
}  // namespace parallel

}  // namespace kernels

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(const std::vector<double>& r, std::vector<double>& z) const = 0;
};

class JacobiPreconditioner : public Preconditioner {
 public:
  explicit JacobiPreconditioner(const LinearOperator& op);
  void apply(const std::vector<double>& r, std::vector<double>& z) const override;

 private:
  std::vector<double> inv_diag_;
};

/// Jacobi plus an additive correction on a few coarse vectors:
/// z = D^-1 r + P (P^T A P)^-1 P^T r.
class CoarseCorrectedJacobi : public Preconditioner {
 public:
  CoarseCorrectedJacobi(const LinearOperator& op, std::vector<std::vector<double>> coarse);
  void apply(const std::vector<double>& r, std::vector<double>& z) const override;

 private:
  JacobiPreconditioner jacobi_;
  std::vector<std::vector<double>> coarse_;
  std::vector<double> coarse_inverse_;  // dense, row-major
};

/// Incomplete Cholesky with zero fill on the sparse part of the operator.
class IncompleteCholesky : public Preconditioner {
 public:
  explicit IncompleteCholesky(const LinearOperator& op);
  void apply(const std::vector<double>& r, std::vector<double>& z) const override;

 private:
  CsrMatrix lower_;  // L with the diagonal stored last in each row
};

struct SolverOptions {
  double tol = 1e-10;
  int max_iterations = 0;  // 0 selects 50 * sqrt(n)
  bool parallel = true;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;
};

/// Preconditioned conjugate gradients on A x = b starting from x. The
/// reported residual is the true residual recomputed at exit. Throws
/// SolverError when the cap is reached.
SolveStats pcg(const LinearOperator& a, const std::vector<double>& b, std::vector<double>& x,
               const Preconditioner& m, const SolverOptions& options);

}  // namespace neckfield
