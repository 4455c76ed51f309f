#include "neckfield/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "neckfield/errors.hpp"

namespace neckfield {

int CsrMatrix::find(int i, int j) const {
  const auto first = col.begin() + row_ptr[i];
  const auto last = col.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? static_cast<int>(it - col.begin()) : -1;
}

double CsrMatrix::at(int i, int j) const {
  const int k = find(i, j);
  return k < 0 ? 0.0 : val[k];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(rows, 0.0);
  for (int i = 0; i < rows; ++i) d[i] = at(i, i);
  return d;
}

bool CsrMatrix::is_symmetric(double rel_tol) const {
  if (rows != cols) return false;
  for (int i = 0; i < rows; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const double a = val[k], b = at(col[k], i);
      if (std::abs(a - b) > rel_tol * std::max(std::abs(a), std::abs(b))) return false;
    }
  return true;
}

CsrMatrix CsrMatrix::from_pattern(int rows, int cols, std::vector<std::pair<int, int>> entries) {
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(rows + 1, 0);
  m.col.reserve(entries.size());
  for (const auto& [i, j] : entries) {
    if (i < 0 || i >= rows || j < 0 || j >= cols) throw std::out_of_range("pattern entry out of range");
    ++m.row_ptr[i + 1];
    m.col.push_back(j);
  }
  for (int i = 0; i < rows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  m.val.assign(m.col.size(), 0.0);
  return m;
}

namespace kernels {

namespace serial {

void spmv(const CsrMatrix& a, const double* x, double* y) {
  for (int i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[i] = s;
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  double total = 0.0;
  for (std::size_t lo = 0; lo < n; lo += kDotChunk) {
    const std::size_t hi = std::min(n, lo + kDotChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
    total += s;
  }
  return total;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

}  // namespace serial

namespace parallel {

void spmv(const CsrMatrix& a, const double* x, double* y) {
  const int n = a.rows;
#pragma omp parallel for schedule(static) if (n > 20000)
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[i] = s;
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  const std::size_t chunks = (n + kDotChunk - 1) / kDotChunk;
  std::vector<double> partial(chunks, 0.0);
  const long long nc = static_cast<long long>(chunks);
#pragma omp parallel for schedule(static) if (n > 4 * kDotChunk)
  for (long long c = 0; c < nc; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kDotChunk;
    const std::size_t hi = std::min(n, lo + kDotChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
    partial[c] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const long long m = static_cast<long long>(n);
#pragma omp parallel for schedule(static) if (n > 20000)
  for (long long i = 0; i < m; ++i) y[i] += alpha * x[i];
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
  const long long m = static_cast<long long>(n);
#pragma omp parallel for schedule(static) if (n > 20000)
  for (long long i = 0; i < m; ++i) y[i] = x[i] + beta * y[i];
}

}  // namespace parallel

}  // namespace kernels

void LinearOperator::apply(const std::vector<double>& x, std::vector<double>& y,
                           bool parallel) const {
  y.resize(matrix.rows);
  if (parallel)
    kernels::parallel::spmv(matrix, x.data(), y.data());
  else
    kernels::serial::spmv(matrix, x.data(), y.data());
  for (const auto& t : low_rank) {
    double s = 0.0;
    for (std::size_t k = 0; k < t.index.size(); ++k) s += t.value[k] * x[t.index[k]];
    s *= t.coeff;
    for (std::size_t k = 0; k < t.index.size(); ++k) y[t.index[k]] += s * t.value[k];
  }
}

void LinearOperator::residual(const std::vector<double>& b, const std::vector<double>& x,
                              std::vector<double>& r) const {
  const int n = matrix.rows;
  std::vector<long double> acc(b.begin(), b.end());
  // rows are independent, so the result does not depend on the thread count
#pragma omp parallel for schedule(static) if (n > 20000)
  for (int i = 0; i < n; ++i) {
    long double s = 0.0L;
    for (int k = matrix.row_ptr[i]; k < matrix.row_ptr[i + 1]; ++k)
      s += static_cast<long double>(matrix.val[k]) * x[matrix.col[k]];
    acc[i] -= s;
  }
  for (const auto& t : low_rank) {
    long double s = 0.0L;
    for (std::size_t k = 0; k < t.index.size(); ++k)
      s += static_cast<long double>(t.value[k]) * x[t.index[k]];
    s *= t.coeff;
    for (std::size_t k = 0; k < t.index.size(); ++k) acc[t.index[k]] -= s * t.value[k];
  }
  r.resize(n);
  for (int i = 0; i < n; ++i) r[i] = static_cast<double>(acc[i]);
}

std::vector<double> LinearOperator::diagonal() const {
  std::vector<double> d = matrix.diagonal();
  for (const auto& t : low_rank)
    for (std::size_t k = 0; k < t.index.size(); ++k) d[t.index[k]] += t.coeff * t.value[k] * t.value[k];
  return d;
}

double LinearOperator::entry(int i, int j) const {
  double a = matrix.at(i, j);
  for (const auto& t : low_rank) {
    double vi = 0.0, vj = 0.0;
    for (std::size_t k = 0; k < t.index.size(); ++k) {
      if (t.index[k] == i) vi = t.value[k];
      if (t.index[k] == j) vj = t.value[k];
    }
    a += t.coeff * vi * vj;
  }
  return a;
}

JacobiPreconditioner::JacobiPreconditioner(const LinearOperator& op) {
  const auto d = op.diagonal();
  inv_diag_.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0))
      throw SolverError("operator has a nonpositive diagonal entry at row " + std::to_string(i), {});
    inv_diag_[i] = 1.0 / d[i];
  }
}

void JacobiPreconditioner::apply(const std::vector<double>& r, std::vector<double>& z) const {
  z.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
}

namespace {

// In-place inverse of a small SPD matrix by Gauss-Jordan elimination.
std::vector<double> small_inverse(std::vector<double> a, int n) {
  std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (a[piv * n + c] == 0.0) throw SolverError("singular coarse matrix", {});
    for (int k = 0; k < n; ++k) {
      std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(inv[c * n + k], inv[piv * n + k]);
    }
    const double d = a[c * n + c];
    for (int k = 0; k < n; ++k) {
      a[c * n + k] /= d;
      inv[c * n + k] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r * n + c];
      if (f == 0.0) continue;
      for (int k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[c * n + k];
        inv[r * n + k] -= f * inv[c * n + k];
      }
    }
  }
  return inv;
}

}  // namespace

CoarseCorrectedJacobi::CoarseCorrectedJacobi(const LinearOperator& op,
                                             std::vector<std::vector<double>> coarse)
    : jacobi_(op), coarse_(std::move(coarse)) {
  const int m = static_cast<int>(coarse_.size());
  std::vector<double> ac(static_cast<std::size_t>(m) * m);
  std::vector<double> tmp;
  for (int j = 0; j < m; ++j) {
    op.apply(coarse_[j], tmp, false);
    for (int i = 0; i < m; ++i)
      ac[i * m + j] = kernels::serial::dot(coarse_[i].data(), tmp.data(), tmp.size());
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < i; ++j) ac[i * m + j] = ac[j * m + i] = 0.5 * (ac[i * m + j] + ac[j * m + i]);
  coarse_inverse_ = small_inverse(ac, m);
}

void CoarseCorrectedJacobi::apply(const std::vector<double>& r, std::vector<double>& z) const {
  jacobi_.apply(r, z);
  const int m = static_cast<int>(coarse_.size());
  std::vector<double> proj(m), coef(m, 0.0);
  for (int i = 0; i < m; ++i) proj[i] = kernels::serial::dot(coarse_[i].data(), r.data(), r.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) coef[i] += coarse_inverse_[i * m + j] * proj[j];
  for (int i = 0; i < m; ++i) kernels::serial::axpy(coef[i], coarse_[i].data(), z.data(), z.size());
}

IncompleteCholesky::IncompleteCholesky(const LinearOperator& op) {
  const CsrMatrix& a = op.matrix;
  const int n = a.rows;
  const auto diag = op.diagonal();
  // lower pattern, diagonal last in each row
  std::vector<std::pair<int, int>> entries;
  for (int i = 0; i < n; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      if (a.col[k] <= i) entries.emplace_back(i, a.col[k]);
  for (int i = 0; i < n; ++i) entries.emplace_back(i, i);
  for (double shift = 0.0;; shift = shift == 0.0 ? 1e-3 : 4.0 * shift) {
    if (shift > 1.0) throw SolverError("incomplete Cholesky broke down", {});
    lower_ = CsrMatrix::from_pattern(n, n, entries);
    for (int i = 0; i < n; ++i)
      for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
        if (a.col[k] < i) lower_.val[lower_.find(i, a.col[k])] = a.val[k];
    for (int i = 0; i < n; ++i) lower_.val[lower_.row_ptr[i + 1] - 1] = diag[i] * (1.0 + shift);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const int ri0 = lower_.row_ptr[i], ri1 = lower_.row_ptr[i + 1] - 1;
      for (int k = ri0; k < ri1; ++k) {
        const int j = lower_.col[k];
        // L_ij = (A_ij - sum_{m<j} L_im L_jm) / L_jj over the shared pattern
        double s = lower_.val[k];
        int p = ri0, q = lower_.row_ptr[j];
        const int qend = lower_.row_ptr[j + 1] - 1;
        while (p < k && q < qend) {
          if (lower_.col[p] == lower_.col[q]) {
            s -= lower_.val[p] * lower_.val[q];
            ++p;
            ++q;
          } else if (lower_.col[p] < lower_.col[q]) {
            ++p;
          } else {
            ++q;
          }
        }
        lower_.val[k] = s / lower_.val[qend];
      }
      double d = lower_.val[ri1];
      for (int k = ri0; k < ri1; ++k) d -= lower_.val[k] * lower_.val[k];
      if (!(d > 0.0)) {
        ok = false;
        break;
      }
      lower_.val[ri1] = std::sqrt(d);
    }
    if (ok) break;
  }
}

void IncompleteCholesky::apply(const std::vector<double>& r, std::vector<double>& z) const {
  const int n = lower_.rows;
  z = r;
  for (int i = 0; i < n; ++i) {
    double s = z[i];
    const int last = lower_.row_ptr[i + 1] - 1;
    for (int k = lower_.row_ptr[i]; k < last; ++k) s -= lower_.val[k] * z[lower_.col[k]];
    z[i] = s / lower_.val[last];
  }
  for (int i = n - 1; i >= 0; --i) {
    const int last = lower_.row_ptr[i + 1] - 1;
    z[i] /= lower_.val[last];
    const double zi = z[i];
    for (int k = lower_.row_ptr[i]; k < last; ++k) z[lower_.col[k]] -= lower_.val[k] * zi;
  }
}

SolveStats pcg(const LinearOperator& a, const std::vector<double>& b, std::vector<double>& x,
               const Preconditioner& m, const SolverOptions& options) {
  const std::size_t n = b.size();
  if (!(options.tol >= 1e-14 && options.tol <= 1e-6))
    throw std::invalid_argument("solver tolerance must lie in [1e-14, 1e-6]");
  x.resize(n, 0.0);
  const bool par = options.parallel;
  auto dot = [par](const std::vector<double>& u, const std::vector<double>& v) {
    return par ? kernels::parallel::dot(u.data(), v.data(), u.size())
               : kernels::serial::dot(u.data(), v.data(), u.size());
  };
  auto axpy = [par](double alpha, const std::vector<double>& u, std::vector<double>& v) {
    par ? kernels::parallel::axpy(alpha, u.data(), v.data(), u.size())
        : kernels::serial::axpy(alpha, u.data(), v.data(), u.size());
  };
  SolveStats stats;
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    stats.history.push_back(0.0);
    return stats;
  }
  const int cap = options.max_iterations > 0
                      ? options.max_iterations
                      : static_cast<int>(std::ceil(50.0 * std::sqrt(static_cast<double>(n))));
  std::vector<double> r(n), z(n), p(n), q(n);
  // true residual in extended precision: restarts from it refine the iterate
  // past the double-precision floor of b - A x when A has large penalty entries
  auto residual = [&]() {
    a.residual(b, x, r);
    return std::sqrt(dot(r, r)) / bnorm;
  };
  double res = residual();
  stats.history.push_back(res);
  m.apply(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= cap; ++it) {
    if (res <= options.tol) break;
    a.apply(p, q, par);
    const double pq = dot(p, q);
    if (!(pq > 0.0))
      throw SolverError("operator is not positive definite along a search direction",
                        stats.history);
    const double alpha = rz / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    res = std::sqrt(dot(r, r)) / bnorm;
    stats.iterations = it;
    if (res <= options.tol) {
      res = residual();  // confirm with the true residual
      stats.history.push_back(res);
      if (res <= options.tol) break;
      m.apply(r, z);
      p = z;
      rz = dot(r, z);
      continue;
    }
    stats.history.push_back(res);
    m.apply(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    par ? kernels::parallel::xpby(z.data(), beta, p.data(), n)
        : kernels::serial::xpby(z.data(), beta, p.data(), n);
  }
  stats.relative_residual = res;
  if (res > options.tol)
  {
    char msg[128];
    std::snprintf(msg, sizeof msg, "conjugate gradients stalled at relative residual %.3e after %d iterations",
                  res, stats.iterations);
    throw SolverError(msg, stats.history);
  }
  return stats;
}

}  // namespace neckfield
