#pragma once

// 2x2 matrices over either scalar backend, r-tuples of them, points of the
// projective line, and the handful of linear-algebra primitives everything
// else is built from.

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "mat2gen/errors.hpp"
#include "mat2gen/linalg.hpp"
#include "mat2gen/scalar.hpp"

namespace mat2gen {

/// Default tolerance for every operation that takes one.
inline constexpr double default_tol = 1e-9;

/// [[a, b], [c, d]]
template <Scalar S>
struct Mat2 {
  S a{}, b{}, c{}, d{};

  static Mat2 identity() { return {S(1), S(0), S(0), S(1)}; }
  static Mat2 zero() { return {S(0), S(0), S(0), S(0)}; }
  static Mat2 scalar(const S& s) { return {s, S(0), S(0), s}; }
  static Mat2 diag(const S& x, const S& y) { return {x, S(0), S(0), y}; }

  Mat2 operator-() const { return {-a, -b, -c, -d}; }
  Mat2& operator+=(const Mat2& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    d += o.d;
    return *this;
  }
  Mat2& operator-=(const Mat2& o) {
    a -= o.a;
    b -= o.b;
    c -= o.c;
    d -= o.d;
    return *this;
  }
  friend Mat2 operator+(Mat2 x, const Mat2& y) { return x += y; }
  friend Mat2 operator-(Mat2 x, const Mat2& y) { return x -= y; }
  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
  }
  friend Mat2 operator*(const S& s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }
  friend bool operator==(const Mat2& x, const Mat2& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }

  S trace() const { return a + d; }
  S det() const { return a * d - b * c; }

  /// Row-major coordinates (a, b, c, d).
  std::array<S, 4> vec() const { return {a, b, c, d}; }

  friend std::ostream& operator<<(std::ostream& os, const Mat2& m) {
    return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
  }
};

using FMat = Mat2<Cplx>;
using QMat = Mat2<GaussRational>;

template <Scalar S>
Mat2<S> mat_mul(const Mat2<S>& x, const Mat2<S>& y) {
  return x * y;
}

template <Scalar S>
S trace(const Mat2<S>& x) {
  return x.trace();
}

template <Scalar S>
S det(const Mat2<S>& x) {
  return x.det();
}

template <Scalar S>
Mat2<S> commutator(const Mat2<S>& x, const Mat2<S>& y) {
  return x * y - y * x;
}

/// Frobenius norm (a double approximation on the exact backend).
template <Scalar S>
double frobenius(const Mat2<S>& m) {
  const double a = magnitude(m.a), b = magnitude(m.b), c = magnitude(m.c), d = magnitude(m.d);
  return std::sqrt(a * a + b * b + c * c + d * d);
}

template <Scalar S>
bool is_exact_zero(const Mat2<S>& m) {
  return is_exact_zero(m.a) && is_exact_zero(m.b) && is_exact_zero(m.c) && is_exact_zero(m.d);
}

/// Adjugate-based inverse. Throws singular_conjugator on an exactly singular matrix.
template <Scalar S>
Mat2<S> inverse(const Mat2<S>& m) {
  const S dt = m.det();
  if (is_exact_zero(dt)) throw singular_conjugator("matrix is singular");
  const S inv = S(1) / dt;
  return {inv * m.d, -(inv * m.b), -(inv * m.c), inv * m.a};
}

/// Scalar test: exact on the exact backend; on binary64 the off-diagonal
/// entries and a - d must all be within tol * ||m||.
template <Scalar S>
bool is_scalar(const Mat2<S>& m, double tol = default_tol) {
  if constexpr (is_exact_v<S>) {
    return m.b.is_zero() && m.c.is_zero() && m.a == m.d;
  } else {
    const double bound = tol * frobenius(m);
    return std::abs(m.b) <= bound && std::abs(m.c) <= bound && std::abs(m.a - m.d) <= bound;
  }
}

/// An ordered r-tuple of matrices over one backend, r >= 1.
template <Scalar S>
class MatTuple {
 public:
  using scalar_type = S;

  MatTuple() = default;
  explicit MatTuple(std::vector<Mat2<S>> ms) : ms_(std::move(ms)) {
    if (ms_.empty()) throw std::invalid_argument("a matrix tuple needs r >= 1");
  }
  MatTuple(std::initializer_list<Mat2<S>> ms) : MatTuple(std::vector<Mat2<S>>(ms)) {}

  std::size_t r() const { return ms_.size(); }
  /// r = 1 is accepted for plumbing but lies outside the r >= 2 regime.
  bool below_min_arity() const { return ms_.size() < 2; }

  const Mat2<S>& operator[](std::size_t i) const { return ms_[i]; }
  Mat2<S>& operator[](std::size_t i) { return ms_[i]; }
  auto begin() const { return ms_.begin(); }
  auto end() const { return ms_.end(); }
  auto begin() { return ms_.begin(); }
  auto end() { return ms_.end(); }
  const std::vector<Mat2<S>>& matrices() const { return ms_; }

  friend bool operator==(const MatTuple& x, const MatTuple& y) { return x.ms_ == y.ms_; }

 private:
  std::vector<Mat2<S>> ms_;
};

using FTuple = MatTuple<Cplx>;
using QTuple = MatTuple<GaussRational>;

/// A point (p : q) of the projective line, stored in canonical form: p = 1
/// when |p| >= |q| (binary64) or p != 0 (exact), and q = 1 otherwise.
template <Scalar S>
class ProjLine {
 public:
  ProjLine(S p, S q) {
    if (is_exact_zero(p) && is_exact_zero(q)) throw std::invalid_argument("(0:0) is not a point of P^1");
    bool scale_by_p;
    if constexpr (is_exact_v<S>)
      scale_by_p = !p.is_zero();
    else
      scale_by_p = std::abs(p) >= std::abs(q);
    if (scale_by_p) {
      q_ = q / p;
      p_ = S(1);
    } else {
      p_ = p / q;
      q_ = S(1);
    }
  }

  const S& p() const { return p_; }
  const S& q() const { return q_; }

  /// Whether the representative has p = 1 (the chart {p != 0} in the exact
  /// sense; in binary64 the larger coordinate is the one set to 1).
  bool p_normalized() const { return p_ == S(1); }

  /// Unit-norm representative (binary64 view).
  std::array<Cplx, 2> unit() const {
    Cplx p = scalar_traits<S>::to_complex(p_), q = scalar_traits<S>::to_complex(q_);
    const double n = std::hypot(std::abs(p), std::abs(q));
    return {p / n, q / n};
  }

  /// g . L
  ProjLine transformed(const Mat2<S>& g) const { return {g.a * p_ + g.b * q_, g.c * p_ + g.d * q_}; }

  friend bool operator==(const ProjLine& x, const ProjLine& y) { return x.p_ == y.p_ && x.q_ == y.q_; }

  friend std::ostream& operator<<(std::ostream& os, const ProjLine& l) {
    return os << '(' << l.p_ << ':' << l.q_ << ')';
  }

 private:
  S p_;
  S q_;
};

using FLine = ProjLine<Cplx>;
using QLine = ProjLine<GaussRational>;

/// Chordal distance |p1 q2 - p2 q1| between unit representatives.
template <Scalar S>
double line_distance(const ProjLine<S>& x, const ProjLine<S>& y) {
  auto u = x.unit(), v = y.unit();
  return std::abs(u[0] * v[1] - u[1] * v[0]);
}

/// Canonical ordering: p-normalized lines before q-normalized ones, then by
/// the free coordinate's (re, im).
template <Scalar S>
bool canonical_less(const ProjLine<S>& x, const ProjLine<S>& y) {
  const bool xp = x.p_normalized(), yp = y.p_normalized();
  if (xp != yp) return xp;
  const S& fx = xp ? x.q() : x.p();
  const S& fy = yp ? y.q() : y.p();
  if constexpr (is_exact_v<S>) {
    return lex_less(fx, fy);
  } else {
    if (fx.real() != fy.real()) return fx.real() < fy.real();
    return fx.imag() < fy.imag();
  }
}

/// Whether L is an eigenline of m: m v parallel to v. Exact on the exact
/// backend; on binary64 |det[v, m v]| <= tol * ||m|| for the unit representative.
template <Scalar S>
bool is_eigenline(const Mat2<S>& m, const ProjLine<S>& line, double tol = default_tol) {
  if constexpr (is_exact_v<S>) {
    const S& p = line.p();
    const S& q = line.q();
    const S mp = m.a * p + m.b * q, mq = m.c * p + m.d * q;
    return (p * mq - q * mp).is_zero();
  } else {
    auto [p, q] = line.unit();
    const Cplx mp = m.a * p + m.b * q, mq = m.c * p + m.d * q;
    return std::abs(p * mq - q * mp) <= tol * frobenius(m);
  }
}

/// Eigenlines of a binary64 matrix: all lines when the matrix is scalar
/// within tol, otherwise the one or two 1-dimensional eigenspaces.
struct Eigenlines {
  bool all_lines = false;
  std::vector<FLine> lines;  // canonical order
};

namespace detail {

// Null line of the singular-ish matrix m - lambda I, taken from its larger row.
inline FLine null_line(const FMat& m, Cplx lambda) {
  const Cplx r1a = m.a - lambda, r1b = m.b;
  const Cplx r2a = m.c, r2b = m.d - lambda;
  const double n1 = std::norm(r1a) + std::norm(r1b);
  const double n2 = std::norm(r2a) + std::norm(r2b);
  if (n1 >= n2) return {r1b, -r1a};
  return {r2b, -r2a};
}

}  // namespace detail

template <Scalar S>
Eigenlines eigenlines(const Mat2<S>& m, double tol = default_tol) {
  if constexpr (is_exact_v<S>) {
    throw unsupported_backend("eigenlines needs binary64 data; eigenvalues may leave Q(i)");
  } else {
    Eigenlines out;
    if (is_scalar(m, tol)) {
      out.all_lines = true;
      return out;
    }
    const Cplx half_tr = 0.5 * (m.a + m.d);
    const Cplx half_diff = 0.5 * (m.a - m.d);
    const Cplx root = std::sqrt(half_diff * half_diff + m.b * m.c);
    const Cplx l1 = half_tr + root, l2 = half_tr - root;
    if (std::abs(l1 - l2) <= tol * frobenius(m)) {
      out.lines.push_back(detail::null_line(m, half_tr));
    } else {
      out.lines.push_back(detail::null_line(m, l1));
      out.lines.push_back(detail::null_line(m, l2));
      if (canonical_less(out.lines[1], out.lines[0])) std::swap(out.lines[0], out.lines[1]);
    }
    return out;
  }
}

template <Scalar S>
using Vec4 = std::array<S, 4>;

/// Rank of the span of length-4 vectors. Exact backend: fraction-free
/// elimination. binary64: number of singular values above tol * sigma_max.
template <Scalar S>
int rank_of_span(std::span<const Vec4<S>> vectors, double tol = default_tol) {
  if (vectors.empty()) return 0;
  if constexpr (is_exact_v<S>) {
    std::vector<std::vector<GaussRational>> rows;
    rows.reserve(vectors.size());
    for (const auto& v : vectors) rows.emplace_back(v.begin(), v.end());
    return linalg::bareiss_rank(std::move(rows));
  } else {
    linalg::Dense<Cplx> m(vectors.size(), 4);
    for (std::size_t i = 0; i < vectors.size(); ++i)
      for (std::size_t j = 0; j < 4; ++j) m(i, j) = vectors[i][j];
    const auto sigma = linalg::singular_values(std::move(m));
    return linalg::numerical_rank(sigma, tol);
  }
}

template <Scalar S>
int rank_of_span(const std::vector<Vec4<S>>& vectors, double tol = default_tol) {
  return rank_of_span<S>(std::span<const Vec4<S>>(vectors), tol);
}

/// Convert an exact tuple to binary64.
inline FTuple to_float(const QTuple& t) {
  std::vector<FMat> ms;
  ms.reserve(t.r());
  for (const auto& m : t)
    ms.push_back({m.a.to_complex(), m.b.to_complex(), m.c.to_complex(), m.d.to_complex()});
  return FTuple(std::move(ms));
}

}  // namespace mat2gen
