#pragma once

// Brute-force FID reference for tests. Plain row-major double matrices, a
// double-loop covariance and a Denman-Beavers square root of Sa * Sb; shares
// no code with the library.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace transart::test::oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix identity(std::size_t d) {
  Matrix m(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1.0;
  return m;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size(), k = b.size(), m = b[0].size();
  Matrix c(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][p] * b[p][j];
  return c;
}

// Gauss-Jordan with partial pivoting.
inline Matrix inverse(Matrix a) {
  const std::size_t d = a.size();
  Matrix inv = identity(d);
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) throw std::runtime_error("singular matrix");
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double diag = a[col][col];
    for (std::size_t j = 0; j < d; ++j) {
      a[col][j] /= diag;
      inv[col][j] /= diag;
    }
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

// Y_{k+1} = (Y_k + Z_k^-1) / 2, Z_{k+1} = (Z_k + Y_k^-1) / 2, Y -> sqrt(A).
inline Matrix denman_beavers_sqrt(const Matrix& a, int iterations = 100) {
  Matrix y = a;
  Matrix z = identity(a.size());
  for (int it = 0; it < iterations; ++it) {
    const Matrix y_inv = inverse(y);
    const Matrix z_inv = inverse(z);
    double change = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < a.size(); ++j) {
        const double ny = 0.5 * (y[i][j] + z_inv[i][j]);
        change = std::max(change, std::abs(ny - y[i][j]));
        y[i][j] = ny;
        z[i][j] = 0.5 * (z[i][j] + y_inv[i][j]);
      }
    }
    if (change < 1e-14) break;
  }
  return y;
}

struct Moments {
  std::vector<double> mean;
  Matrix cov;
};

inline Moments moments(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size(), d = rows[0].size();
  Moments m{std::vector<double>(d, 0.0), Matrix(d, std::vector<double>(d, 0.0))};
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) m.mean[j] += r[j];
  for (double& v : m.mean) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (const auto& r : rows) s += (r[i] - m.mean[i]) * (r[j] - m.mean[j]);
      m.cov[i][j] = s / static_cast<double>(n - 1);
    }
  }
  return m;
}

inline double fid(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  const std::size_t d = ma.mean.size();
  double mean_term = 0.0, trace = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    mean_term += (ma.mean[j] - mb.mean[j]) * (ma.mean[j] - mb.mean[j]);
    trace += ma.cov[j][j] + mb.cov[j][j];
  }
  const Matrix root = denman_beavers_sqrt(multiply(ma.cov, mb.cov));
  double trace_root = 0.0;
  for (std::size_t j = 0; j < d; ++j) trace_root += root[j][j];
  return mean_term + trace - 2.0 * trace_root;
}

}  // namespace transart::test::oracle
