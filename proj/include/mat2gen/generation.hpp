#pragma once

// Generation tests for tuples of 2x2 matrices and the stratification of the
// non-generating locus into commuting tuples and tuples with a common
// eigenline but some nonzero commutator.

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "mat2gen/errors.hpp"
#include "mat2gen/mat2.hpp"

namespace mat2gen {

/// A word in the tuple entries, by 0-based index; the empty word is I.
using Word = std::vector<int>;

template <Scalar S>
Mat2<S> evaluate(const MatTuple<S>& t, const Word& w) {
  Mat2<S> m = Mat2<S>::identity();
  for (int i : w) m = m * t[static_cast<std::size_t>(i)];
  return m;
}

struct SpanResult {
  bool generates = false;
  int span_dim = 0;
  std::vector<Word> basis;  // words spanning the generated algebra
  int rounds = 0;           // extension rounds that grew the span
};

/// Span closure of the unital algebra generated by the tuple: start from {I}
/// and right-multiply the newest basis words by every entry until the rank
/// stops growing.
template <Scalar S>
SpanResult generates_by_span(const MatTuple<S>& t, double tol = default_tol) {
  // On binary64 the generators are rescaled to unit norm; the generated
  // algebra is unchanged and the relative rank threshold becomes scale-free.
  std::vector<Mat2<S>> gens(t.begin(), t.end());
  if constexpr (!is_exact_v<S>) {
    for (auto& g : gens) {
      const double n = frobenius(g);
      if (n > 0) g = Cplx(1.0 / n) * g;
    }
  }
  SpanResult out;
  std::vector<Vec4<S>> vecs{Mat2<S>::identity().vec()};
  std::vector<Mat2<S>> mats{Mat2<S>::identity()};
  out.basis.push_back({});
  int rank = 1;
  std::vector<std::size_t> frontier{0};
  while (!frontier.empty() && rank < 4) {
    std::vector<std::size_t> next;
    for (std::size_t f : frontier) {
      for (std::size_t i = 0; i < gens.size() && rank < 4; ++i) {
        Mat2<S> cand = mats[f] * gens[i];
        vecs.push_back(cand.vec());
        const int r = rank_of_span<S>(vecs, tol);
        if (r > rank) {
          rank = r;
          mats.push_back(cand);
          Word w = out.basis[f];
          w.push_back(static_cast<int>(i));
          out.basis.push_back(std::move(w));
          next.push_back(mats.size() - 1);
        } else {
          vecs.pop_back();
        }
      }
    }
    if (!next.empty()) ++out.rounds;
    frontier = std::move(next);
  }
  out.span_dim = rank;
  out.generates = rank == 4;
  return out;
}

enum class LineKind { none, line, all_lines };

template <Scalar S>
struct LineQuery {
  LineKind kind = LineKind::none;
  std::optional<ProjLine<S>> line;
};

/// Whether every commutator vanishes: exactly on the exact backend,
/// ||[A_i, A_j]|| <= tol ||A_i|| ||A_j|| on binary64.
template <Scalar S>
bool pairwise_commuting(const MatTuple<S>& t, double tol = default_tol) {
  for (std::size_t i = 0; i < t.r(); ++i) {
    for (std::size_t j = i + 1; j < t.r(); ++j) {
      const Mat2<S> c = commutator(t[i], t[j]);
      if constexpr (is_exact_v<S>) {
        if (!is_exact_zero(c)) return false;
      } else {
        if (frobenius(c) > tol * frobenius(t[i]) * frobenius(t[j])) return false;
      }
    }
  }
  return true;
}

namespace detail {

// Image of a nonzero rank-1 matrix, from its larger column.
template <Scalar S>
ProjLine<S> image_line(const Mat2<S>& m) {
  if constexpr (is_exact_v<S>) {
    if (!m.a.is_zero() || !m.c.is_zero()) return {m.a, m.c};
    return {m.b, m.d};
  } else {
    if (std::norm(m.a) + std::norm(m.c) >= std::norm(m.b) + std::norm(m.d)) return {m.a, m.c};
    return {m.b, m.d};
  }
}

// Largest commutator relative to the entry norms, if any exceeds tol.
template <Scalar S>
std::optional<Mat2<S>> dominant_commutator(const MatTuple<S>& t, double tol) {
  std::optional<Mat2<S>> best;
  double best_rel = 0;
  for (std::size_t i = 0; i < t.r(); ++i) {
    for (std::size_t j = i + 1; j < t.r(); ++j) {
      const Mat2<S> c = commutator(t[i], t[j]);
      if constexpr (is_exact_v<S>) {
        if (!is_exact_zero(c)) return c;
      } else {
        const double scale = frobenius(t[i]) * frobenius(t[j]);
        const double rel = scale > 0 ? frobenius(c) / scale : 0.0;
        if (rel > tol && rel > best_rel) {
          best_rel = rel;
          best = c;
        }
      }
    }
  }
  return best;
}

}  // namespace detail

template <Scalar S>
bool is_incident(const MatTuple<S>& t, const ProjLine<S>& line, double tol = default_tol) {
  for (const auto& m : t)
    if (!is_eigenline(m, line, tol)) return false;
  return true;
}

/// The common eigenline of a tuple: all lines when every entry is scalar,
/// otherwise the first candidate line that is an eigenline of every entry.
/// Candidates are the image of the dominant commutator (in the
/// eigen-shared stratum this is the common line) followed by the eigenlines
/// of the first non-scalar entry.
template <Scalar S>
LineQuery<S> common_eigenline(const MatTuple<S>& t, double tol = default_tol) {
  if constexpr (is_exact_v<S>) {
    throw unsupported_backend("common_eigenline needs binary64 data");
  } else {
    const FMat* first = nullptr;
    for (const auto& m : t) {
      if (!is_scalar(m, tol)) {
        first = &m;
        break;
      }
    }
    if (first == nullptr) return {LineKind::all_lines, std::nullopt};
    std::vector<FLine> candidates;
    if (auto c = detail::dominant_commutator(t, tol)) candidates.push_back(detail::image_line(*c));
    const Eigenlines e = eigenlines(*first, tol);
    candidates.insert(candidates.end(), e.lines.begin(), e.lines.end());
    for (const auto& line : candidates)
      if (is_incident(t, line, tol)) return {LineKind::line, line};
    return {LineKind::none, std::nullopt};
  }
}

enum class StratumTag { generating, eigen_shared, commuting };

inline std::string_view to_string(StratumTag tag) {
  switch (tag) {
    case StratumTag::generating:
      return "GENERATING";
    case StratumTag::eigen_shared:
      return "EIGEN_SHARED";
    case StratumTag::commuting:
      return "COMMUTING";
  }
  return "?";
}

template <Scalar S>
struct Stratum {
  StratumTag tag = StratumTag::generating;
  int span_dim = 0;
  std::vector<Word> basis;          // spanning words, GENERATING only
  std::optional<ProjLine<S>> line;  // common eigenline, EIGEN_SHARED only
};

/// Locate a tuple in U(r), T(r) or W(r).
template <Scalar S>
Stratum<S> classify(const MatTuple<S>& t, double tol = default_tol) {
  Stratum<S> out;
  SpanResult span = generates_by_span(t, tol);
  out.span_dim = span.span_dim;
  if (span.generates) {
    out.tag = StratumTag::generating;
    out.basis = std::move(span.basis);
    return out;
  }
  if (pairwise_commuting(t, tol)) {
    out.tag = StratumTag::commuting;
    return out;
  }
  out.tag = StratumTag::eigen_shared;
  if constexpr (is_exact_v<S>) {
    // All commutators of a triangularizable tuple are nilpotent with image the
    // common line, so the line is rational.
    auto c = detail::dominant_commutator(t, tol);
    ProjLine<S> line = detail::image_line(*c);
    if (!is_incident(t, line, tol))
      throw inconsistent_classification("span test reports non-generating but no common eigenline exists");
    out.line = line;
  } else {
    LineQuery<S> q = common_eigenline(t, tol);
    if (q.kind != LineKind::line)
      throw inconsistent_classification(
          "span test reports non-generating but no common eigenline was found within tolerance");
    out.line = q.line;
  }
  return out;
}

template <Scalar S>
struct FriedlandTerms {
  S lhs;
  S rhs;
  bool generates = false;
  double gap = 0;       // |lhs - rhs|
  double threshold = 0; // tol * (1 + |lhs| + |rhs|), zero on the exact backend
};

/// Terms of the two-generator criterion: the pair fails to generate exactly
/// when [2 Tr(A1 A2) - Tr A1 Tr A2]^2 = [2 Tr A1^2 - (Tr A1)^2][2 Tr A2^2 - (Tr A2)^2].
template <Scalar S>
FriedlandTerms<S> friedland_terms(const Mat2<S>& a1, const Mat2<S>& a2, double tol = default_tol) {
  const S t1 = a1.trace(), t2 = a2.trace();
  const S t12 = (a1 * a2).trace();
  const S s1 = (a1 * a1).trace(), s2 = (a2 * a2).trace();
  const S two(2);
  const S u = two * t12 - t1 * t2;
  FriedlandTerms<S> out{u * u, (two * s1 - t1 * t1) * (two * s2 - t2 * t2)};
  out.gap = magnitude(S(out.lhs - out.rhs));
  if constexpr (is_exact_v<S>) {
    out.generates = !(out.lhs == out.rhs);
  } else {
    out.threshold = tol * (1.0 + std::abs(out.lhs) + std::abs(out.rhs));
    out.generates = out.gap > out.threshold;
  }
  return out;
}

template <Scalar S>
bool friedland_generates(const Mat2<S>& a1, const Mat2<S>& a2, double tol = default_tol) {
  return friedland_terms(a1, a2, tol).generates;
}

}  // namespace mat2gen
