#pragma once

// Conjugation invariants of matrix tuples and the orbit-level operations
// built on them: the trace coordinates, the traceless retraction, the chart
// of traceless pairs, semisimplification and intertwiner search.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "mat2gen/errors.hpp"
#include "mat2gen/generation.hpp"
#include "mat2gen/linalg.hpp"
#include "mat2gen/mat2.hpp"

namespace mat2gen {

/// Trace coordinates Tr A_i, Tr A_i^2, Tr A_i A_j (i<j), Tr A_i A_j A_l (i<j<l).
/// Indices are 0-based.
template <Scalar S>
struct SibInvariants {
  std::size_t r = 0;
  std::vector<S> t1;
  std::vector<S> t2;
  std::map<std::pair<int, int>, S> t11;
  std::map<std::array<int, 3>, S> t111;

  /// All coordinates in a fixed order: t1, t2, t11, t111.
  std::vector<S> flatten() const {
    std::vector<S> out(t1.begin(), t1.end());
    out.insert(out.end(), t2.begin(), t2.end());
    for (const auto& [k, v] : t11) out.push_back(v);
    for (const auto& [k, v] : t111) out.push_back(v);
    return out;
  }

  static std::size_t count(std::size_t r) { return 2 * r + r * (r - 1) / 2 + r * (r - 1) * (r - 2) / 6; }
};

template <Scalar S>
SibInvariants<S> sibirskii(const MatTuple<S>& t) {
  SibInvariants<S> inv;
  const int r = static_cast<int>(t.r());
  inv.r = t.r();
  for (int i = 0; i < r; ++i) {
    inv.t1.push_back(t[i].trace());
    inv.t2.push_back((t[i] * t[i]).trace());
  }
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      const Mat2<S> ij = t[i] * t[j];
      inv.t11.emplace(std::pair{i, j}, ij.trace());
      for (int l = j + 1; l < r; ++l) inv.t111.emplace(std::array{i, j, l}, (ij * t[l]).trace());
    }
  }
  return inv;
}

/// Largest coordinate deviation, each scaled by max(1, |x|, |y|).
template <Scalar S>
double invariant_deviation(const SibInvariants<S>& x, const SibInvariants<S>& y) {
  if (x.r != y.r) throw wrong_arity("invariants of tuples of different length");
  const auto fx = x.flatten(), fy = y.flatten();
  double worst = 0;
  for (std::size_t k = 0; k < fx.size(); ++k) {
    const double scale = std::max({1.0, magnitude(fx[k]), magnitude(fy[k])});
    worst = std::max(worst, magnitude(S(fx[k] - fy[k])) / scale);
  }
  return worst;
}

/// Equality of invariants: exact on the exact backend, relative deviation
/// within tol on binary64.
template <Scalar S>
bool invariants_equal(const SibInvariants<S>& x, const SibInvariants<S>& y, double tol = default_tol) {
  if constexpr (is_exact_v<S>) {
    return x.r == y.r && x.flatten() == y.flatten();
  } else {
    return invariant_deviation(x, y) <= tol;
  }
}

/// A_i -> A_i - s (Tr A_i / 2) I. At s = 1 every entry is traceless.
template <Scalar S>
MatTuple<S> traceless_retract(const MatTuple<S>& t, const real_t<S>& s) {
  if (s < 0 || s > 1) throw std::invalid_argument("retraction parameter must lie in [0, 1]");
  const S factor = scalar_traits<S>::from_real(s) / S(2);
  std::vector<Mat2<S>> out;
  out.reserve(t.r());
  for (const auto& m : t) out.push_back(m - Mat2<S>::scalar(factor * m.trace()));
  return MatTuple<S>(std::move(out));
}

/// (z1, z2, x) = (Tr A1^2, Tr A2^2, Tr A1 A2) for a traceless pair.
template <class S>
struct B2Coords {
  S z1{}, z2{}, x{};

  /// x^2 - z1 z2; the pair generates exactly when this is nonzero.
  S quadric() const { return x * x - z1 * z2; }
  friend bool operator==(const B2Coords& a, const B2Coords& b) {
    return a.z1 == b.z1 && a.z2 == b.z2 && a.x == b.x;
  }
};

template <Scalar S>
bool is_traceless(const Mat2<S>& m, double tol = default_tol) {
  if constexpr (is_exact_v<S>)
    return m.trace().is_zero();
  else
    return std::abs(m.trace()) <= tol * std::max(1.0, frobenius(m));
}

template <Scalar S>
B2Coords<S> b2_coords(const MatTuple<S>& t, double tol = default_tol) {
  if (t.r() != 2) throw wrong_arity("b2_coords needs a pair");
  if (!is_traceless(t[0], tol) || !is_traceless(t[1], tol)) throw not_traceless("b2_coords needs traceless matrices");
  return {(t[0] * t[0]).trace(), (t[1] * t[1]).trace(), (t[0] * t[1]).trace()};
}

namespace detail {

template <Scalar S>
std::optional<S> chart_sqrt(const S& w) {
  if constexpr (is_exact_v<S>)
    return exact_sqrt(w);
  else
    return principal_sqrt(w);
}

// A_lead = diag(a, -a) with a^2 = z_lead / 2, A_other = [[d, 1], [c, -d]].
template <Scalar S>
std::optional<std::pair<Mat2<S>, Mat2<S>>> diagonal_chart(const S& z_lead, const S& z_other, const S& x) {
  auto a = chart_sqrt(S(z_lead / S(2)));
  if (!a) return std::nullopt;
  const S d = x / (S(2) * *a);
  const S c = z_other / S(2) - d * d;
  return std::pair{Mat2<S>::diag(*a, -*a), Mat2<S>{d, S(1), c, -d}};
}

}  // namespace detail

/// A traceless pair with the given coordinates. Charts: diag(a, -a) in the
/// slot of the larger nonzero z (ties to z1), the companion entry fixed by
/// the other two coordinates; ([[0,1],[0,0]], [[0,0],[x,0]]) when z1 = z2 = 0.
/// The exact backend needs square roots in Q(i); when both diagonal charts
/// fail it tries the root-free charts for z1 z2 = 0 and a chart built on
/// sqrt(x^2 - z1 z2), then throws no_exact_realization.
template <Scalar S>
MatTuple<S> realize_b2(const B2Coords<S>& c) {
  const bool z1_zero = is_exact_zero(c.z1), z2_zero = is_exact_zero(c.z2);
  if (z1_zero && z2_zero) {
    return MatTuple<S>{Mat2<S>{S(0), S(1), S(0), S(0)}, Mat2<S>{S(0), S(0), c.x, S(0)}};
  }
  const bool lead_z1 = !z1_zero && (z2_zero || magnitude(c.z1) >= magnitude(c.z2));
  auto try_lead1 = [&]() -> std::optional<MatTuple<S>> {
    if (z1_zero) return std::nullopt;
    auto p = detail::diagonal_chart(c.z1, c.z2, c.x);
    if (!p) return std::nullopt;
    return MatTuple<S>{p->first, p->second};
  };
  auto try_lead2 = [&]() -> std::optional<MatTuple<S>> {
    if (z2_zero) return std::nullopt;
    auto p = detail::diagonal_chart(c.z2, c.z1, c.x);
    if (!p) return std::nullopt;
    return MatTuple<S>{p->second, p->first};
  };
  auto first = lead_z1 ? try_lead1() : try_lead2();
  if (first) return *first;
  auto second = lead_z1 ? try_lead2() : try_lead1();
  if (second) return *second;

  // Only reached on the exact backend.
  const Mat2<S> nil{S(0), S(1), S(0), S(0)};
  const bool x_zero = is_exact_zero(c.x);
  if (z1_zero || z2_zero) {
    const S& z = z1_zero ? c.z2 : c.z1;
    Mat2<S> other = x_zero ? Mat2<S>{S(0), S(1), z / S(2), S(0)} : Mat2<S>{S(0), z / (S(2) * c.x), c.x, S(0)};
    Mat2<S> first_m = x_zero ? Mat2<S>::zero() : nil;
    return z1_zero ? MatTuple<S>{first_m, other} : MatTuple<S>{other, first_m};
  }
  // A1 = [[0,1],[z1/2,0]], A2 = [[0,q],[x - q z1/2, 0]] with z1 q^2 - 2 x q + z2 = 0.
  if (auto w = detail::chart_sqrt(S(c.x * c.x - c.z1 * c.z2))) {
    const S q = (c.x + *w) / c.z1;
    return MatTuple<S>{Mat2<S>{S(0), S(1), c.z1 / S(2), S(0)}, Mat2<S>{S(0), q, c.x - q * c.z1 / S(2), S(0)}};
  }
  throw no_exact_realization("none of z1/2, z2/2, x^2 - z1 z2 is a square in Q(i)");
}

/// Simultaneous conjugation A_i -> g A_i g^-1.
template <Scalar S>
MatTuple<S> conjugate(const MatTuple<S>& t, const Mat2<S>& g, double tol = default_tol) {
  if constexpr (is_exact_v<S>) {
    if (g.det().is_zero()) throw singular_conjugator("conjugator is singular");
  } else {
    const double n = frobenius(g);
    if (!(std::abs(g.det()) > tol * n * n)) throw singular_conjugator("conjugator is numerically singular");
  }
  const Mat2<S> gi = inverse(g);
  std::vector<Mat2<S>> out;
  out.reserve(t.r());
  for (const auto& m : t) out.push_back(g * m * gi);
  return MatTuple<S>(std::move(out));
}

/// Unitary matrix whose first column spans the line.
inline FMat unitary_from_line(const FLine& line) {
  auto [p, q] = line.unit();
  return {p, -std::conj(q), q, std::conj(p)};
}

/// Closed-orbit representative: generating tuples are returned unchanged;
/// otherwise the tuple is brought to simultaneous upper-triangular form by a
/// unitary change of basis and replaced by its diagonal part.
template <Scalar S>
MatTuple<S> semisimplify(const MatTuple<S>& t, double tol = default_tol) {
  if constexpr (is_exact_v<S>) {
    throw unsupported_backend("semisimplify needs binary64 data");
  } else {
    if (generates_by_span(t, tol).generates) return t;
    std::vector<FMat> out;
    out.reserve(t.r());
    const LineQuery<Cplx> q = common_eigenline(t, tol);
    if (q.kind == LineKind::all_lines) {
      for (const auto& m : t) out.push_back(FMat::diag(m.a, m.d));
      return FTuple(std::move(out));
    }
    if (q.kind != LineKind::line)
      throw inconsistent_classification("non-generating tuple without a common eigenline");
    const FMat g = unitary_from_line(*q.line);
    const FMat gh{std::conj(g.a), std::conj(g.c), std::conj(g.b), std::conj(g.d)};
    for (const auto& m : t) {
      const FMat u = gh * m * g;
      if (std::abs(u.c) > tol * std::max(1.0, frobenius(m)))
        throw inconsistent_classification("triangularization left a lower-left residual above tolerance");
      out.push_back(FMat::diag(u.a, u.d));
    }
    return FTuple(std::move(out));
  }
}

template <Scalar S>
struct ConjugatorResult {
  std::optional<Mat2<S>> g;  // G with G A_i G^-1 = B_i, when one exists
  int kernel_dim = 0;        // dimension of {G : G A_i = B_i G}
  bool non_generic = false;  // kernel >= 2 but no invertible element was found
  double residual = 0;       // max_i ||G A_i G^-1 - B_i|| / max(1, ||B_i||)
};

namespace detail {

// Rows of G A - B G = 0 in the unknowns (g11, g12, g21, g22).
template <Scalar S>
std::array<std::array<S, 4>, 4> intertwiner_rows(const Mat2<S>& a, const Mat2<S>& b) {
  const S z(0);
  return {{{a.a - b.a, a.c, -b.b, z},
           {a.b, a.d - b.a, z, -b.b},
           {-b.c, z, a.a - b.d, a.c},
           {z, -b.c, a.b, a.d - b.d}}};
}

template <Scalar S>
double conjugation_residual(const MatTuple<S>& s, const MatTuple<S>& t, const Mat2<S>& g) {
  const Mat2<S> gi = inverse(g);
  double worst = 0;
  for (std::size_t i = 0; i < s.r(); ++i) {
    const Mat2<S> diff = g * s[i] * gi - t[i];
    worst = std::max(worst, frobenius(diff) / std::max(1.0, frobenius(t[i])));
  }
  return worst;
}

}  // namespace detail

/// Solve G A_i = B_i G for G and return an invertible solution if one exists.
/// When the solution space has dimension >= 2, the basis and a fixed list of
/// pairwise combinations (at most 10 candidates) are tried.
template <Scalar S>
ConjugatorResult<S> find_conjugator(const MatTuple<S>& s, const MatTuple<S>& t, double tol = default_tol) {
  if (s.r() != t.r()) throw wrong_arity("find_conjugator needs tuples of equal length");
  ConjugatorResult<S> out;
  std::vector<std::array<S, 4>> basis;
  if constexpr (is_exact_v<S>) {
    std::vector<std::vector<GaussRational>> rows;
    for (std::size_t i = 0; i < s.r(); ++i)
      for (const auto& row : detail::intertwiner_rows(s[i], t[i])) rows.emplace_back(row.begin(), row.end());
    for (auto& v : linalg::exact_kernel(std::move(rows), 4)) basis.push_back({v[0], v[1], v[2], v[3]});
  } else {
    linalg::Dense<Cplx> m(4 * s.r(), 4);
    for (std::size_t i = 0; i < s.r(); ++i) {
      const double scale = std::max(1.0, frobenius(s[i]) + frobenius(t[i]));
      const auto rows = detail::intertwiner_rows(s[i], t[i]);
      for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t j = 0; j < 4; ++j) m(4 * i + k, j) = rows[k][j] / scale;
    }
    const auto svd = linalg::jacobi_svd(std::move(m));
    const int rank = linalg::numerical_rank(svd.sigma, tol);
    for (int k = rank; k < 4; ++k) basis.push_back({svd.v(0, k), svd.v(1, k), svd.v(2, k), svd.v(3, k)});
  }
  out.kernel_dim = static_cast<int>(basis.size());
  if (basis.empty()) return out;

  std::vector<std::array<S, 4>> candidates(basis.begin(), basis.end());
  const std::array<S, 3> weights{S(1), S(-1), S(2)};
  for (std::size_t i = 0; i < basis.size() && candidates.size() < 10; ++i) {
    for (std::size_t j = i + 1; j < basis.size() && candidates.size() < 10; ++j) {
      for (const S& w : weights) {
        if (candidates.size() >= 10) break;
        std::array<S, 4> c;
        for (std::size_t k = 0; k < 4; ++k) c[k] = basis[i][k] + w * basis[j][k];
        candidates.push_back(c);
      }
    }
  }
  for (const auto& c : candidates) {
    Mat2<S> g{c[0], c[1], c[2], c[3]};
    bool invertible;
    if constexpr (is_exact_v<S>) {
      invertible = !g.det().is_zero();
    } else {
      const double n = frobenius(g);
      invertible = n > 0 && std::abs(g.det()) > tol * n * n;
    }
    if (!invertible) continue;
    // Normalize: exact -> first nonzero entry 1; binary64 -> unit Frobenius
    // norm with the largest entry real and positive.
    if constexpr (is_exact_v<S>) {
      for (const S& e : c) {
        if (!e.is_zero()) {
          g = (S(1) / e) * g;
          break;
        }
      }
    } else {
      std::size_t big = 0;
      for (std::size_t k = 1; k < 4; ++k)
        if (std::abs(c[k]) > std::abs(c[big])) big = k;
      g = (std::conj(c[big]) / (std::abs(c[big]) * frobenius(g))) * g;
    }
    out.g = g;
    out.residual = detail::conjugation_residual(s, t, g);
    return out;
  }
  out.non_generic = out.kernel_dim >= 2;
  return out;
}

template <Scalar S>
bool is_diagonal(const MatTuple<S>& t) {
  return std::all_of(t.begin(), t.end(),
                     [](const Mat2<S>& m) { return is_exact_zero(m.b) && is_exact_zero(m.c); });
}

/// Same point of the quotient: the semisimplifications have equal invariants.
/// On the exact backend only pairs that need no semisimplification (both
/// generating or both diagonal) are decided; others raise unsupported_backend.
template <Scalar S>
bool orbit_equivalent(const MatTuple<S>& s, const MatTuple<S>& t, double tol = default_tol) {
  if (s.r() != t.r()) throw wrong_arity("orbit_equivalent needs tuples of equal length");
  if constexpr (is_exact_v<S>) {
    const bool both_diag = is_diagonal(s) && is_diagonal(t);
    const bool both_gen = generates_by_span(s).generates && generates_by_span(t).generates;
    if (!both_diag && !both_gen)
      throw unsupported_backend("orbit comparison of non-semisimple exact tuples needs binary64 data");
    return invariants_equal(sibirskii(s), sibirskii(t));
  } else {
    return invariants_equal(sibirskii(semisimplify(s, tol)), sibirskii(semisimplify(t, tol)), tol);
  }
}

}  // namespace mat2gen
