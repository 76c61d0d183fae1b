#pragma once

// Parametrizations of the non-generating strata and the comparison maps
// between spheres and generating tuples, with Jacobian-rank machinery for
// checking the dimensions of the charts.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "mat2gen/errors.hpp"
#include "mat2gen/generation.hpp"
#include "mat2gen/invariants.hpp"
#include "mat2gen/linalg.hpp"
#include "mat2gen/mat2.hpp"
#include "mat2gen/random.hpp"

namespace mat2gen {

using CVec = std::vector<Cplx>;

/// (a_1 A + b_1 I, ..., A, ..., a_r A + b_r I) with A in slot `slot` (0-based).
/// coeffs holds the r - 1 pairs (a_k, b_k) for the other slots, in order.
template <Scalar S>
MatTuple<S> t_chart(std::size_t slot, const Mat2<S>& base, const std::vector<std::pair<S, S>>& coeffs,
                    double tol = default_tol) {
  if (is_scalar(base, tol)) throw scalar_base("t_chart: base matrix is scalar");
  const std::size_t r = coeffs.size() + 1;
  if (slot >= r) throw std::out_of_range("t_chart: slot out of range");
  std::vector<Mat2<S>> out;
  out.reserve(r);
  std::size_t k = 0;
  for (std::size_t i = 0; i < r; ++i) {
    if (i == slot) {
      out.push_back(base);
    } else {
      const auto& [a, b] = coeffs[k++];
      out.push_back(a * base + Mat2<S>::scalar(b));
    }
  }
  return MatTuple<S>(std::move(out));
}

/// Circle action: b -> conj(lambda) b, c -> lambda c on every entry.
inline FTuple s1_act(Cplx lambda, const FTuple& t) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12) throw not_unit_modulus("s1_act: |lambda| != 1");
  std::vector<FMat> out;
  out.reserve(t.r());
  const Cplx lb = std::conj(lambda);
  for (const auto& m : t) out.push_back({m.a, lb * m.b, lambda * m.c, m.d});
  return FTuple(std::move(out));
}

inline double vec_norm(const CVec& v) {
  double s = 0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

inline void require_on_sphere(const CVec& v, const char* what) {
  if (v.empty() || std::abs(vec_norm(v) - 1.0) > 1e-12) throw not_on_sphere(std::string(what) + ": point is not on the unit sphere");
}

/// (b, c) -> ([[0, b_k], [c_k, 0]])_k followed by diag(1, -1).
inline FTuple i_map(const CVec& b, const CVec& c) {
  require_on_sphere(b, "i_map");
  require_on_sphere(c, "i_map");
  if (b.size() != c.size()) throw wrong_arity("i_map: b and c differ in length");
  std::vector<FMat> out;
  out.reserve(b.size() + 1);
  for (std::size_t k = 0; k < b.size(); ++k) out.push_back({0.0, b[k], c[k], 0.0});
  out.push_back(FMat::diag(1.0, -1.0));
  return FTuple(std::move(out));
}

/// [[a, b], [c, d]] -> [[-d, c], [b, -a]] on every entry: -1 times
/// conjugation by [[0, -1], [1, 0]].
template <Scalar S>
MatTuple<S> tau_map(const MatTuple<S>& t) {
  std::vector<Mat2<S>> out;
  out.reserve(t.r());
  for (const auto& m : t) out.push_back({-m.d, m.c, m.b, -m.a});
  return MatTuple<S>(std::move(out));
}

/// (b, c) -> (conj c, conj b).
inline std::pair<CVec, CVec> sigma_map(const CVec& b, const CVec& c) {
  require_on_sphere(b, "sigma_map");
  require_on_sphere(c, "sigma_map");
  CVec nb(c.size()), nc(b.size());
  std::transform(c.begin(), c.end(), nb.begin(), [](Cplx z) { return std::conj(z); });
  std::transform(b.begin(), b.end(), nc.begin(), [](Cplx z) { return std::conj(z); });
  return {nb, nc};
}

/// lambda . (b, c) = (conj(lambda) b, lambda c).
inline std::pair<CVec, CVec> sphere_act(Cplx lambda, const CVec& b, const CVec& c) {
  CVec nb(b), nc(c);
  for (auto& z : nb) z = std::conj(lambda) * z;
  for (auto& z : nc) z = lambda * z;
  return {nb, nc};
}

/// b -> ([[0, b_k], [1, 0]])_k followed by diag(1, -1).
template <Scalar S>
MatTuple<S> j_map(const std::vector<S>& b) {
  std::vector<Mat2<S>> out;
  out.reserve(b.size() + 1);
  for (const auto& bk : b) out.push_back({S(0), bk, S(1), S(0)});
  out.push_back(Mat2<S>::diag(S(1), S(-1)));
  return MatTuple<S>(std::move(out));
}

/// Local trivialization of the common-eigenline map over the standard chart
/// {p != 0} (chart 0) or {q != 0} (chart 1): returns the line and the tuple
/// conjugated so that the line becomes (1:0).
struct Trivialization {
  FLine line;
  FTuple fiber;
};

inline Trivialization p_trivialize(const FTuple& t, int chart, double tol = default_tol) {
  if (chart != 0 && chart != 1) throw std::invalid_argument("p_trivialize: chart must be 0 or 1");
  const Stratum<Cplx> s = classify(t, tol);
  if (s.tag != StratumTag::eigen_shared) throw wrong_stratum("p_trivialize: tuple is not in the eigen-shared stratum");
  const FLine line = *s.line;
  auto [p, q] = line.unit();
  FMat g;
  if (chart == 0) {
    if (std::abs(p) <= tol) throw line_outside_chart("p_trivialize: line is outside chart {p != 0}");
    g = {1.0, 0.0, q / p, 1.0};
  } else {
    if (std::abs(q) <= tol) throw line_outside_chart("p_trivialize: line is outside chart {q != 0}");
    g = {p / q, -1.0, 1.0, 0.0};
  }
  return {line, conjugate(t, inverse(g), tol)};
}

// ---------------------------------------------------------------------------
// Charts as real maps and their Jacobian ranks

enum class ChartKind { t_chart, w_fiber, incidence_fiber, j_map, i_map, t_defining };

inline std::string chart_name(ChartKind k, std::size_t index = 0) {
  switch (k) {
    case ChartKind::t_chart:
      return "T_CHART_" + std::to_string(index + 1);
    case ChartKind::w_fiber:
      return "W_FIBER";
    case ChartKind::incidence_fiber:
      return "INCIDENCE_FIBER";
    case ChartKind::j_map:
      return "J_MAP";
    case ChartKind::i_map:
      return "I_MAP";
    case ChartKind::t_defining:
      return "T_DEFINING";
  }
  return "?";
}

struct ChartSpec {
  ChartKind kind = ChartKind::t_chart;
  std::size_t r = 2;
  std::size_t index = 0;  // slot of the base matrix for T_CHART

  std::string name() const { return chart_name(kind, index); }

  /// Real rank of the chart differential at a generic point. For T_DEFINING
  /// (the commutator equations) this is 8r minus the real dimension of T(r).
  int expected_rank() const {
    const int rr = static_cast<int>(r);
    switch (kind) {
      case ChartKind::t_chart:
        return 4 * rr + 4;
      case ChartKind::w_fiber:
        return 6 * rr;
      case ChartKind::incidence_fiber:
        return 6 * rr + 2;
      case ChartKind::j_map:
        return 2 * (rr - 1);
      case ChartKind::i_map:
        return 2 * (2 * rr - 3);
      case ChartKind::t_defining:
        return 8 * rr - (4 * rr + 4);
    }
    return -1;
  }

  int parameter_count() const {
    const int rr = static_cast<int>(r);
    switch (kind) {
      case ChartKind::t_chart:
        return 8 + 4 * (rr - 1);
      case ChartKind::w_fiber:
        return 6 * rr;
      case ChartKind::incidence_fiber:
        return 2 + 6 * rr;
      case ChartKind::j_map:
        return 2 * (rr - 1);
      case ChartKind::i_map:
        return 2 * (2 * rr - 3);
      case ChartKind::t_defining:
        return 8 * rr;
    }
    return 0;
  }
};

/// A parameter point of a chart. I_MAP additionally carries its anchor on
/// S^{2r-3} x S^{2r-3}; the parameters are tangent coordinates there.
struct ChartPoint {
  std::vector<double> params;
  CVec anchor_b;
  CVec anchor_c;
};

namespace detail {

inline Cplx cp(const std::vector<double>& x, std::size_t k) { return {x[k], x[k + 1]}; }

inline FMat mat_at(const std::vector<double>& x, std::size_t k) {
  return {cp(x, k), cp(x, k + 2), cp(x, k + 4), cp(x, k + 6)};
}

inline FMat upper_at(const std::vector<double>& x, std::size_t k) { return {cp(x, k), cp(x, k + 2), 0.0, cp(x, k + 4)}; }

inline void push(std::vector<double>& out, const FMat& m) {
  for (const Cplx& z : {m.a, m.b, m.c, m.d}) {
    out.push_back(z.real());
    out.push_back(z.imag());
  }
}

inline std::vector<double> flatten(const FTuple& t) {
  std::vector<double> out;
  out.reserve(8 * t.r());
  for (const auto& m : t) push(out, m);
  return out;
}

// Orthonormal basis (as complex vectors) of the real tangent space of the unit
// sphere in C^n at `anchor`: real-orthogonal complement of the anchor.
inline std::vector<CVec> sphere_tangent_basis(const CVec& anchor) {
  const std::size_t n = anchor.size();
  std::vector<CVec> basis;
  auto real_dot = [](const CVec& x, const CVec& y) {
    double s = 0;
    for (std::size_t k = 0; k < x.size(); ++k) s += (std::conj(x[k]) * y[k]).real();
    return s;
  };
  std::vector<CVec> done{anchor};
  for (std::size_t k = 0; k < 2 * n && basis.size() + 1 < 2 * n; ++k) {
    CVec e(n, 0.0);
    e[k / 2] = (k % 2 == 0) ? Cplx(1.0, 0.0) : Cplx(0.0, 1.0);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& d : done) {
        const double p = real_dot(d, e);
        for (std::size_t j = 0; j < n; ++j) e[j] -= p * d[j];
      }
    const double nn = vec_norm(e);
    if (nn < 1e-8) continue;
    for (auto& z : e) z /= nn;
    done.push_back(e);
    basis.push_back(e);
  }
  return basis;
}

inline CVec sphere_chart(const CVec& anchor, const std::vector<CVec>& basis, const std::vector<double>& s,
                         std::size_t offset) {
  CVec v(anchor);
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += s[offset + k] * basis[k][j];
  const double n = vec_norm(v);
  for (auto& z : v) z /= n;
  return v;
}

inline double max_commutator(const FTuple& t) {
  double worst = 0;
  for (std::size_t i = 0; i < t.r(); ++i)
    for (std::size_t j = i + 1; j < t.r(); ++j) worst = std::max(worst, frobenius(commutator(t[i], t[j])));
  return worst;
}

}  // namespace detail

/// Evaluate a chart as a real map R^n -> R^m.
inline std::vector<double> evaluate_chart(const ChartSpec& spec, const ChartPoint& pt,
                                          const std::vector<double>& x) {
  const std::size_t r = spec.r;
  switch (spec.kind) {
    case ChartKind::t_chart: {
      const FMat base = detail::mat_at(x, 0);
      std::vector<std::pair<Cplx, Cplx>> coeffs;
      for (std::size_t k = 0; k + 1 < r; ++k) coeffs.emplace_back(detail::cp(x, 8 + 4 * k), detail::cp(x, 10 + 4 * k));
      // Bypass the scalar-base guard: perturbed points near a valid sample are fine.
      std::vector<FMat> out;
      std::size_t k = 0;
      for (std::size_t i = 0; i < r; ++i) {
        if (i == spec.index) {
          out.push_back(base);
        } else {
          out.push_back(coeffs[k].first * base + FMat::scalar(coeffs[k].second));
          ++k;
        }
      }
      return detail::flatten(FTuple(std::move(out)));
    }
    case ChartKind::w_fiber: {
      std::vector<FMat> out;
      for (std::size_t i = 0; i < r; ++i) out.push_back(detail::upper_at(x, 6 * i));
      return detail::flatten(FTuple(std::move(out)));
    }
    case ChartKind::incidence_fiber: {
      const Cplx z = detail::cp(x, 0);
      const FMat g{1.0, 0.0, z, 1.0}, gi{1.0, 0.0, -z, 1.0};
      std::vector<FMat> out;
      for (std::size_t i = 0; i < r; ++i) out.push_back(g * detail::upper_at(x, 2 + 6 * i) * gi);
      return detail::flatten(FTuple(std::move(out)));
    }
    case ChartKind::j_map: {
      std::vector<Cplx> b;
      for (std::size_t k = 0; k + 1 < r; ++k) b.push_back(detail::cp(x, 2 * k));
      return detail::flatten(j_map(b));
    }
    case ChartKind::i_map: {
      const auto tb = detail::sphere_tangent_basis(pt.anchor_b);
      const auto tc = detail::sphere_tangent_basis(pt.anchor_c);
      const CVec b = detail::sphere_chart(pt.anchor_b, tb, x, 0);
      const CVec c = detail::sphere_chart(pt.anchor_c, tc, x, tb.size());
      return detail::flatten(i_map(b, c));
    }
    case ChartKind::t_defining: {
      std::vector<FMat> ms;
      for (std::size_t i = 0; i < r; ++i) ms.push_back(detail::mat_at(x, 8 * i));
      std::vector<double> out;
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) detail::push(out, commutator(ms[i], ms[j]));
      return out;
    }
  }
  return {};
}

/// A generic sample point of the chart, drawn from the stream.
inline ChartPoint generic_chart_point(const ChartSpec& spec, CounterRng& rng) {
  ChartPoint pt;
  const std::size_t r = spec.r;
  switch (spec.kind) {
    case ChartKind::i_map: {
      auto sphere = [&] {
        CVec v(r - 1);
        for (auto& z : v) z = rng.complex_normal();
        const double n = vec_norm(v);
        for (auto& z : v) z /= n;
        return v;
      };
      pt.anchor_b = sphere();
      pt.anchor_c = sphere();
      pt.params.assign(static_cast<std::size_t>(spec.parameter_count()), 0.0);
      return pt;
    }
    case ChartKind::t_defining: {
      // A point of T(r): slot 0 carries the base, the rest are a_k A + b_k I.
      const FMat base = random_matrix(rng);
      std::vector<std::pair<Cplx, Cplx>> coeffs;
      for (std::size_t k = 0; k + 1 < r; ++k) coeffs.emplace_back(rng.complex_normal(), rng.complex_normal());
      pt.params = detail::flatten(t_chart<Cplx>(0, base, coeffs));
      return pt;
    }
    default:
      break;
  }
  pt.params.resize(static_cast<std::size_t>(spec.parameter_count()));
  for (auto& v : pt.params) v = rng.normal();
  return pt;
}

struct RankEntry {
  ChartSpec chart;
  std::vector<double> sigma;  // singular values, descending
  int observed_rank = 0;      // count of sigma_k / sigma_1 > 1e-6
  double gap_low = 0;         // sigma_expected / sigma_1
  double gap_high = 0;        // sigma_{expected+1} / sigma_1, 0 when absent
  bool pass = false;
};

inline constexpr double rank_keep_ratio = 1e-6;
inline constexpr double rank_drop_ratio = 1e-9;
inline constexpr double jacobian_step = 1e-5;

namespace detail {

inline void check_margin(const ChartSpec& spec, const ChartPoint& pt, double h) {
  const double margin = 10.0 * h;
  const auto& x = pt.params;
  switch (spec.kind) {
    case ChartKind::t_chart: {
      const FMat base = mat_at(x, 0);
      const FMat traceless = base - FMat::scalar(0.5 * base.trace());
      if (frobenius(traceless) < margin) throw margin_violation("T_CHART sample: base is within 10h of the scalars");
      return;
    }
    case ChartKind::w_fiber:
    case ChartKind::incidence_fiber: {
      const std::size_t off = spec.kind == ChartKind::w_fiber ? 0 : 2;
      std::vector<FMat> ms;
      for (std::size_t i = 0; i < spec.r; ++i) ms.push_back(upper_at(x, off + 6 * i));
      if (max_commutator(FTuple(std::move(ms))) < margin)
        throw margin_violation(spec.name() + " sample: commutators are within 10h of zero");
      return;
    }
    case ChartKind::i_map:
      require_on_sphere(pt.anchor_b, "I_MAP anchor");
      require_on_sphere(pt.anchor_c, "I_MAP anchor");
      return;
    case ChartKind::t_defining: {
      const FMat base = mat_at(x, 0);
      const FMat traceless = base - FMat::scalar(0.5 * base.trace());
      if (frobenius(traceless) < margin) throw margin_violation("T_DEFINING sample: first entry is within 10h of the scalars");
      return;
    }
    case ChartKind::j_map:
      return;
  }
}

}  // namespace detail

/// Central-difference Jacobian of the chart at `pt`, its singular values and
/// the rank by the fixed gap rule.
inline RankEntry numeric_jacobian_rank(const ChartSpec& spec, const ChartPoint& pt, double h = jacobian_step) {
  if (pt.params.size() != static_cast<std::size_t>(spec.parameter_count()))
    throw std::invalid_argument("numeric_jacobian_rank: parameter count does not match the chart");
  detail::check_margin(spec, pt, h);
  const std::size_t n = pt.params.size();
  const std::size_t m = evaluate_chart(spec, pt, pt.params).size();
  linalg::Dense<double> jac(m, n);
  std::vector<double> xp = pt.params, xm = pt.params;
  for (std::size_t k = 0; k < n; ++k) {
    xp[k] += h;
    xm[k] -= h;
    const auto fp = evaluate_chart(spec, pt, xp);
    const auto fm = evaluate_chart(spec, pt, xm);
    for (std::size_t i = 0; i < m; ++i) jac(i, k) = (fp[i] - fm[i]) / (2.0 * h);
    xp[k] = pt.params[k];
    xm[k] = pt.params[k];
  }
  RankEntry e;
  e.chart = spec;
  e.sigma = linalg::singular_values(std::move(jac));
  const double s1 = e.sigma.empty() ? 0.0 : e.sigma.front();
  const int expected = spec.expected_rank();
  if (s1 > 0) {
    e.observed_rank = static_cast<int>(
        std::count_if(e.sigma.begin(), e.sigma.end(), [&](double s) { return s / s1 > rank_keep_ratio; }));
    e.gap_low = expected >= 1 && static_cast<std::size_t>(expected) <= e.sigma.size() ? e.sigma[expected - 1] / s1 : 0.0;
    e.gap_high = static_cast<std::size_t>(expected) < e.sigma.size() ? e.sigma[expected] / s1 : 0.0;
  }
  e.pass = s1 > 0 && e.observed_rank == expected && e.gap_low > rank_keep_ratio && e.gap_high < rank_drop_ratio;
  return e;
}

}  // namespace mat2gen
