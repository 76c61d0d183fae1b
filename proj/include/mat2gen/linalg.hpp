#pragma once

// Small dense kernels: one-sided Jacobi SVD for binary64 data, fraction-free
// elimination and reduced row echelon form for Gaussian rationals.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "mat2gen/scalar.hpp"

namespace mat2gen::linalg {

/// Column-major dense matrix.
template <class T>
class Dense {
 public:
  Dense() = default;
  Dense(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<T> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const T> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

namespace detail {

inline double abs2(double x) { return x * x; }
inline double abs2(const Cplx& z) { return std::norm(z); }
inline double conj_of(double x) { return x; }
inline Cplx conj_of(const Cplx& z) { return std::conj(z); }

}  // namespace detail

template <class T>
struct SvdResult {
  std::vector<double> sigma;  // descending
  Dense<T> v;                 // right singular vectors, column k pairs with sigma[k]
};

/// One-sided (Hestenes) Jacobi SVD. Works on a copy of `a`; accurate to a few
/// ulps relative to the largest singular value, and to high relative accuracy
/// on well-conditioned column sets.
template <class T>
SvdResult<T> jacobi_svd(Dense<T> a, bool want_v = true) {
  const std::size_t m = a.rows(), n = a.cols();
  Dense<T> v;
  if (want_v) {
    v = Dense<T>(n, n);
    for (std::size_t k = 0; k < n; ++k) v(k, k) = T(1);
  }
  constexpr double eps = 2.220446049250313e-16;
  constexpr int max_sweeps = 80;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0, beta = 0;
        T gamma{};
        for (std::size_t i = 0; i < m; ++i) {
          alpha += detail::abs2(a(i, p));
          beta += detail::abs2(a(i, q));
          gamma += detail::conj_of(a(i, p)) * a(i, q);
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        // Phase-align column q so the inner product becomes real, then rotate.
        const T phase = detail::conj_of(gamma) / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const T ap = a(i, p);
          const T aq = a(i, q) * phase;
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        if (want_v) {
          for (std::size_t i = 0; i < n; ++i) {
            const T vp = v(i, p);
            const T vq = v(i, q) * phase;
            v(i, p) = c * vp - s * vq;
            v(i, q) = s * vp + c * vq;
          }
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += detail::abs2(a(i, j));
    norms[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });
  SvdResult<T> out;
  out.sigma.reserve(n);
  for (std::size_t k : order) out.sigma.push_back(norms[k]);
  if (want_v) {
    out.v = Dense<T>(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, order[k]);
  }
  return out;
}

/// Singular values, descending, padded with zeros to a.cols() entries.
/// Wide inputs are transposed first: one-sided Jacobi on more columns than
/// rows keeps rotating columns that are pure rounding noise.
template <class T>
std::vector<double> singular_values(Dense<T> a) {
  if (a.rows() >= a.cols()) return jacobi_svd(std::move(a), false).sigma;
  Dense<T> h(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) h(j, i) = detail::conj_of(a(i, j));
  std::vector<double> s = jacobi_svd(std::move(h), false).sigma;
  s.resize(a.cols(), 0.0);
  return s;
}

/// Numerical rank: count of singular values above tol * sigma_max
/// (zero when sigma_max is zero).
inline int numerical_rank(std::span<const double> sigma, double tol) {
  if (sigma.empty() || sigma.front() == 0.0) return 0;
  const double cut = tol * sigma.front();
  return static_cast<int>(std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > cut; }));
}

/// Exact rank by Bareiss fraction-free elimination. Every division in the
/// recurrence is exact, so intermediate entries stay minors of the input.
inline int bareiss_rank(std::vector<std::vector<GaussRational>> m) {
  const std::size_t rows = m.size();
  if (rows == 0) return 0;
  const std::size_t cols = m.front().size();
  GaussRational prev(1);
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t piv = rank;
    while (piv < rows && m[piv][col].is_zero()) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        m[i][j] = (m[rank][col] * m[i][j] - m[i][col] * m[rank][j]) / prev;
      }
      m[i][col] = GaussRational{};
    }
    prev = m[rank][col];
    ++rank;
  }
  return static_cast<int>(rank);
}

/// Basis of the right kernel {x : m x = 0} via reduced row echelon form.
inline std::vector<std::vector<GaussRational>> exact_kernel(std::vector<std::vector<GaussRational>> m,
                                                            std::size_t cols) {
  const std::size_t rows = m.size();
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows; ++col) {
    std::size_t piv = r;
    while (piv < rows && m[piv][col].is_zero()) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    const GaussRational inv = GaussRational(1) / m[r][col];
    for (std::size_t j = col; j < cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][col].is_zero()) continue;
      const GaussRational f = m[i][col];
      for (std::size_t j = col; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivot_cols.push_back(col);
    ++r;
  }
  std::vector<std::vector<GaussRational>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (std::find(pivot_cols.begin(), pivot_cols.end(), free) != pivot_cols.end()) continue;
    std::vector<GaussRational> x(cols);
    x[free] = GaussRational(1);
    for (std::size_t k = 0; k < pivot_cols.size(); ++k) x[pivot_cols[k]] = -m[k][free];
    basis.push_back(std::move(x));
  }
  return basis;
}

}  // namespace mat2gen::linalg
