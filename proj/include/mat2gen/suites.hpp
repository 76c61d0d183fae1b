#pragma once

// Verification suites. Each check draws sample k from its own counter-based
// stream keyed on (seed, check, k), so results do not depend on the worker
// count; per-sample outcomes are reduced in index order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "mat2gen/b2_model.hpp"
#include "mat2gen/generation.hpp"
#include "mat2gen/invariants.hpp"
#include "mat2gen/polynomial.hpp"
#include "mat2gen/random.hpp"
#include "mat2gen/strata.hpp"

namespace mat2gen {

using ojson = nlohmann::ordered_json;

/// Outcome of one sample of one check.
struct Outcome {
  bool ok = true;
  double residual = 0;
  std::string note;  // first failure note is kept in the report
};

struct Check {
  std::string name;
  std::uint64_t count = 0;
  std::uint64_t failures = 0;
  double worst_residual = 0;
  double threshold = 0;  // residual bound, 0 for predicate or bit-exact checks
  std::string first_failure;

  bool pass() const { return failures == 0 && count > 0; }

  void record(const Outcome& o) {
    ++count;
    if (std::isnan(o.residual)) {
      worst_residual = o.residual;
    } else if (!std::isnan(worst_residual)) {
      worst_residual = std::max(worst_residual, o.residual);
    }
    if (!o.ok) {
      if (failures == 0) first_failure = o.note.empty() ? "sample " + std::to_string(count - 1) : o.note;
      ++failures;
    }
  }

  ojson to_json() const {
    ojson j;
    j["name"] = name;
    j["count"] = count;
    j["failures"] = failures;
    j["worst_residual"] = std::isnan(worst_residual) ? ojson("nan") : ojson(worst_residual);
    j["threshold"] = threshold;
    j["pass"] = pass();
    if (failures > 0) j["first_failure"] = first_failure;
    return j;
  }
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;

  bool pass() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
  }

  ojson to_json() const {
    ojson j;
    j["suite"] = suite;
    j["pass"] = pass();
    ojson arr = ojson::array();
    for (const auto& c : checks) arr.push_back(c.to_json());
    j["checks"] = std::move(arr);
    return j;
  }
};

enum class SuiteName { ranks, maps, equivalences, b2, montecarlo };

inline std::string_view to_string(SuiteName s) {
  switch (s) {
    case SuiteName::ranks:
      return "ranks";
    case SuiteName::maps:
      return "maps";
    case SuiteName::equivalences:
      return "equivalences";
    case SuiteName::b2:
      return "b2";
    case SuiteName::montecarlo:
      return "montecarlo";
  }
  return "?";
}

struct SuiteParams {
  std::uint64_t seed = 0;
  std::size_t r_min = 2;
  std::optional<std::size_t> r_max;    // suite default when absent
  std::optional<std::uint64_t> samples;  // suite default when absent
  unsigned threads = 1;
  double tol = default_tol;
};

/// Seed of the stream family belonging to one named check.
inline std::uint64_t check_seed(std::uint64_t seed, std::string_view check) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : check) h = (h ^ ch) * 0x100000001b3ull;
  return mix64(seed ^ h);
}

/// Run fn(k) for k in [0, n) on `threads` workers, feeding results to
/// `check` in index order.
inline void run_samples(Check& check, std::uint64_t n, unsigned threads,
                        const std::function<Outcome(std::uint64_t)>& fn) {
  constexpr std::uint64_t block = 1 << 14;
  threads = std::max(1u, threads);
  std::vector<Outcome> buf;
  for (std::uint64_t start = 0; start < n; start += block) {
    const std::uint64_t len = std::min(block, n - start);
    buf.assign(len, Outcome{});
    auto work = [&](unsigned w) {
      for (std::uint64_t k = w; k < len; k += threads) {
        try {
          buf[k] = fn(start + k);
        } catch (const std::exception& e) {
          buf[k] = {false, 0.0, std::string("exception: ") + e.what()};
        }
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
      for (auto& t : pool) t.join();
    }
    for (const auto& o : buf) check.record(o);
  }
}

// ---------------------------------------------------------------------------
// Constructed tuple families

enum class EdgeFamily { upper, scalar, diagonal, nilpotent };
inline constexpr std::array<EdgeFamily, 4> edge_families{EdgeFamily::upper, EdgeFamily::scalar, EdgeFamily::diagonal,
                                                         EdgeFamily::nilpotent};

inline std::string_view to_string(EdgeFamily f) {
  switch (f) {
    case EdgeFamily::upper:
      return "upper";
    case EdgeFamily::scalar:
      return "scalar";
    case EdgeFamily::diagonal:
      return "diagonal";
    case EdgeFamily::nilpotent:
      return "nilpotent";
  }
  return "?";
}

struct Constructed {
  FTuple tuple;
  FMat conjugator;  // the tuple is conjugator . (base tuple) . conjugator^-1
  StratumTag tag;   // stratum by construction
};

/// A non-generating tuple of the given family, conjugated by a random matrix
/// with condition number at most max_cond. Upper-triangular samples have a
/// nonzero commutator with overwhelming probability; the tag records it.
inline Constructed construct_family(EdgeFamily f, std::size_t r, CounterRng& rng, double max_cond = 100.0) {
  const FMat g = random_conjugator(rng, max_cond);
  std::vector<FMat> base;
  switch (f) {
    case EdgeFamily::upper:
      for (std::size_t i = 0; i < r; ++i) base.push_back({rng.complex_normal(), rng.complex_normal(), 0.0, rng.complex_normal()});
      break;
    case EdgeFamily::scalar:
      for (std::size_t i = 0; i < r; ++i) base.push_back(FMat::scalar(rng.complex_normal()));
      break;
    case EdgeFamily::diagonal:
      for (std::size_t i = 0; i < r; ++i) base.push_back(FMat::diag(rng.complex_normal(), rng.complex_normal()));
      break;
    case EdgeFamily::nilpotent: {
      const FMat n{0.0, rng.complex_normal(), 0.0, 0.0};
      base.push_back(n);
      for (std::size_t i = 1; i < r; ++i) base.push_back(rng.complex_normal() * n + FMat::scalar(rng.complex_normal()));
      break;
    }
  }
  FTuple bt(std::move(base));
  FTuple t = conjugate(bt, g);
  StratumTag tag = StratumTag::commuting;
  if (f == EdgeFamily::upper && !pairwise_commuting(bt)) tag = StratumTag::eigen_shared;
  if (f == EdgeFamily::upper && r == 1) tag = StratumTag::commuting;
  return {std::move(t), g, tag};
}

// ---------------------------------------------------------------------------
// Individual checks. Each takes the sample count explicitly so acceptance
// tests can pin their own sizes.

namespace checks {

inline Check burnside_random(std::size_t r, std::uint64_t n, std::uint64_t seed, unsigned threads, double tol) {
  Check c{"burnside_equivalence_gaussian_r" + std::to_string(r)};
  const std::uint64_t s = check_seed(seed, c.name);
  run_samples(c, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s, k);
    const FTuple t = random_tuple(rng, r);
    const bool gen = generates_by_span(t, tol).generates;
    const bool none = common_eigenline(t, tol).kind == LineKind::none;
    return Outcome{gen == none, 0.0, gen == none ? "" : "sample " + std::to_string(k) + ": span and eigenline tests disagree"};
  });
  return c;
}

inline Check burnside_edges(std::size_t r, std::uint64_t n, std::uint64_t seed, unsigned threads, double tol) {
  Check c{"burnside_equivalence_edge_families_r" + std::to_string(r)};
  const std::uint64_t s = check_seed(seed, c.name);
  run_samples(c, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s, k);
    const EdgeFamily f = edge_families[k % edge_families.size()];
    const Constructed ct = construct_family(f, r, rng);
    const bool gen = generates_by_span(ct.tuple, tol).generates;
    const bool none = common_eigenline(ct.tuple, tol).kind == LineKind::none;
    const Stratum<Cplx> st = classify(ct.tuple, tol);
    bool ok = gen == none && !gen && st.tag == ct.tag;
    if (ok && st.tag == StratumTag::eigen_shared)
      ok = line_distance(*st.line, FLine(1.0, 0.0).transformed(ct.conjugator)) <= 1e3 * tol;
    return Outcome{ok, 0.0, ok ? "" : "family " + std::string(to_string(f)) + " sample " + std::to_string(k)};
  });
  return c;
}

/// Exact two-generator criterion against the exact span test. Samples cycle
/// through random pairs, constructed non-generating pairs and exact
/// perturbations of those off the degenerate locus.
inline Check friedland_exact(std::uint64_t n, std::uint64_t seed, unsigned threads) {
  Check c{"friedland_vs_span_exact"};
  const std::uint64_t s = check_seed(seed, c.name);
  run_samples(c, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s, k);
    QTuple t;
    if (k % 3 == 0) {
      t = random_rational_tuple(rng, 2);
    } else {
      QMat g;
      do {
        g = random_rational_matrix(rng);
      } while (g.det().is_zero());
      QMat u1 = random_rational_matrix(rng), u2 = random_rational_matrix(rng);
      u1.c = GaussRational{};
      u2.c = GaussRational{};
      if (k % 3 == 2) {
        // Move off the locus by 10^-j in one lower-left entry.
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, 1 + rng.below(30));
        u2.c = GaussRational(mpq_class(mpz_class(1), p));
      }
      t = conjugate(QTuple{u1, u2}, g);
    }
    const bool fr = friedland_generates(t[0], t[1]);
    const bool sp = generates_by_span(t).generates;
    return Outcome{fr == sp, 0.0, fr == sp ? "" : "sample " + std::to_string(k) + ": criterion and span test disagree"};
  });
  return c;
}

/// Hand-picked pairs on and next to the degenerate locus.
inline Check friedland_curated() {
  Check c{"friedland_vs_span_curated"};
  using Q = GaussRational;
  std::vector<QTuple> pairs{
      {QMat::diag(1, -1), QMat{0, 1, 1, 0}},
      {QMat::identity(), QMat::identity()},
      {QMat{1, 1, 0, 1}, QMat::identity()},
      {QMat{0, 1, 0, 0}, QMat{1, 1, 0, 1}},
      {QMat{1, 2, 0, 3}, QMat{4, 5, 0, 6}},
      {QMat::diag(1, -1), QMat::diag(1, -1)},
      {QMat::zero(), QMat::zero()},
      {QMat{0, 1, 0, 0}, QMat{0, 0, 1, 0}},
      {QMat{2, 1, 0, 0}, QMat{Q(0), Q(0), Q(0), Q::i()}},
  };
  for (int j = 1; j <= 40; j += 3) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(j));
    const Q eps(mpq_class(mpz_class(1), p));
    pairs.push_back({QMat{1, 2, 0, 3}, QMat{Q(4), Q(5), eps, Q(6)}});
    pairs.push_back({QMat{0, 1, 0, 0}, QMat{Q(1), Q(1), eps, Q(1)}});
    pairs.push_back({QMat::diag(1, 1), QMat{Q(0), eps, eps, Q(0)}});
  }
  for (const auto& t : pairs) {
    const bool fr = friedland_generates(t[0], t[1]);
    const bool sp = generates_by_span(t).generates;
    c.record({fr == sp, 0.0, fr == sp ? "" : "curated pair disagrees"});
  }
  return c;
}

inline Check sibirskii_conjugation(std::size_t r_min, std::size_t r_max, std::uint64_t n, std::uint64_t seed,
                                   unsigned threads, double bound = 1e-9) {
  Check c{"sibirskii_conjugation_invariance", 0, 0, 0, bound};
  const std::uint64_t s = check_seed(seed, c.name);
  run_samples(c, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s, k);
    const std::size_t r = r_min + k % (r_max - r_min + 1);
    const FTuple t = random_tuple(rng, r);
    const FMat g = random_conjugator(rng, 100.0);
    const double dev = invariant_deviation(sibirskii(conjugate(t, g)), sibirskii(t));
    return Outcome{dev <= bound, dev};
  });
  return c;
}

inline Check sibirskii_conjugation_exact(std::uint64_t n, std::uint64_t seed, unsigned threads) {
  Check c{"sibirskii_conjugation_invariance_exact"};
  const std::uint64_t s = check_seed(seed, c.name);
  run_samples(c, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s, k);
    const QTuple t = random_rational_tuple(rng, 2 + k % 3, 20);
    QMat g;
    do {
      g = random_rational_matrix(rng, 20);
    } while (g.det().is_zero());
    return Outcome{invariants_equal(sibirskii(conjugate(t, g)), sibirskii(t))};
  });
  return c;
}

inline Check classify_invariance(std::size_t r_min, std::size_t r_max, std::uint64_t n, std::uint64_t seed,
                                 unsigned threads, double tol) {
  Check c{"classify_conjugation_and_permutation_invariance"};
  const std::uint64_t s = check_seed(seed, c.name);
  run_samples(c, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s, k);
    const std::size_t r = r_min + k % (r_max - r_min + 1);
    FTuple t = (k % 5 == 4) ? random_tuple(rng, r) : construct_family(edge_families[k % 4], r, rng, 10.0).tuple;
    const FMat g = random_conjugator(rng, 10.0);
    const Stratum<Cplx> a = classify(t, tol);
    const Stratum<Cplx> b = classify(conjugate(t, g), tol);
    std::vector<FMat> rev(t.begin(), t.end());
    std::reverse(rev.begin(), rev.end());
    const Stratum<Cplx> p = classify(FTuple(rev), tol);
    bool ok = a.tag == b.tag && a.tag == p.tag && a.span_dim == b.span_dim;
    double res = 0;
    if (ok && a.tag == StratumTag::eigen_shared) {
      res = line_distance(*b.line, a.line->transformed(g));
      ok = res <= 1e3 * tol;
    }
    return Outcome{ok, res};
  });
  return c;
}

inline Check semisimplify_invariants(std::size_t r_min, std::size_t r_max, std::uint64_t n, std::uint64_t seed,
                                     unsigned threads, double tol, double bound = 1e-9) {
  Check c{"semisimplify_preserves_invariants", 0, 0, 0, bound};
  const std::uint64_t s = check_seed(seed, c.name);
  run_samples(c, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s, k);
    const std::size_t r = r_min + k % (r_max - r_min + 1);
    const Constructed ct = construct_family(edge_families[k % 4], r, rng, 10.0);
    const FTuple ss = semisimplify(ct.tuple, tol);
    bool diag = true;
    for (const auto& m : ss) diag = diag && m.b == Cplx{} && m.c == Cplx{};
    const double dev = invariant_deviation(sibirskii(ss), sibirskii(ct.tuple));
    return Outcome{diag && dev <= bound, dev, diag ? "" : "output not exactly diagonal"};
  });
  return c;
}

struct SeparationCounts {
  Check conjugate_pairs{"orbit_separation_conjugate_pairs", 0, 0, 0, 1e-8};
  Check distinct_pairs{"orbit_separation_distinct_pairs"};
};

inline SeparationCounts orbit_separation(std::size_t r_min, std::size_t r_max, std::uint64_t n, std::uint64_t seed,
                                         unsigned threads, double tol, double bound = 1e-8) {
  SeparationCounts out;
  out.conjugate_pairs.threshold = bound;
  const std::uint64_t s = check_seed(seed, "orbit_separation");
  run_samples(out.conjugate_pairs, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s, k);
    const std::size_t r = r_min + k % (r_max - r_min + 1);
    const FTuple a = random_tuple(rng, r);
    const FMat g = random_conjugator(rng, 100.0);
    const ConjugatorResult<Cplx> res = find_conjugator(a, conjugate(a, g), tol);
    bool ok = generates_by_span(a, tol).generates && res.kernel_dim == 1 && res.g.has_value() && res.residual <= bound;
    double resid = res.residual;
    if (ok) {
      // Recovered conjugator agrees with g up to a scalar.
      const FMat& h = *res.g;
      const Cplx alpha = (std::conj(g.a) * h.a + std::conj(g.b) * h.b + std::conj(g.c) * h.c + std::conj(g.d) * h.d) /
                         (std::norm(g.a) + std::norm(g.b) + std::norm(g.c) + std::norm(g.d));
      const double scal = frobenius(FMat(h - alpha * g)) / frobenius(h);
      resid = std::max(resid, scal);
      ok = scal <= bound;
    }
    return Outcome{ok, resid, ok ? "" : "kernel dim " + std::to_string(res.kernel_dim)};
  });
  run_samples(out.distinct_pairs, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s ^ 0x5bd1e995ull, k);
    const std::size_t r = r_min + k % (r_max - r_min + 1);
    const FTuple a = random_tuple(rng, r);
    const FTuple b = random_tuple(rng, r);
    const bool distinct = !invariants_equal(sibirskii(a), sibirskii(b), tol);
    const ConjugatorResult<Cplx> res = find_conjugator(a, b, tol);
    const bool ok = distinct && !res.g.has_value() && res.kernel_dim == 0;
    return Outcome{ok, 0.0, ok ? "" : "kernel dim " + std::to_string(res.kernel_dim)};
  });
  return out;
}

inline Check freeness(std::size_t r_min, std::size_t r_max, std::uint64_t n, std::uint64_t seed, unsigned threads,
                      double tol) {
  Check c{"freeness_self_intertwiners_scalar"};
  const std::uint64_t s = check_seed(seed, c.name);
  run_samples(c, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s, k);
    const std::size_t r = r_min + k % (r_max - r_min + 1);
    const FTuple a = random_tuple(rng, r);
    const ConjugatorResult<Cplx> res = find_conjugator(a, a, tol);
    bool ok = generates_by_span(a, tol).generates && res.kernel_dim == 1 && res.g.has_value();
    double resid = 0;
    if (ok) {
      resid = frobenius(FMat(*res.g - FMat::scalar(0.5 * res.g->trace()))) / frobenius(*res.g);
      ok = resid <= 1e-9;
    }
    return Outcome{ok, resid};
  });
  return c;
}

/// Float samples skip the scalar family: at s = 1 its retraction is pure
/// rounding noise. The exact variant covers every family.
inline Check retraction_preserves_stratum(std::size_t r_min, std::size_t r_max, std::uint64_t n, std::uint64_t seed,
                                          unsigned threads, double tol) {
  Check c{"retraction_preserves_stratum"};
  const std::uint64_t s = check_seed(seed, c.name);
  run_samples(c, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s, k);
    const std::size_t r = r_min + k % (r_max - r_min + 1);
    constexpr std::array<EdgeFamily, 3> fams{EdgeFamily::upper, EdgeFamily::diagonal, EdgeFamily::nilpotent};
    const FTuple t = (k % 4 == 3) ? random_tuple(rng, r) : construct_family(fams[k % 4], r, rng, 10.0).tuple;
    const StratumTag tag = classify(t, tol).tag;
    for (double sp : {0.0, 0.25, 0.5, 0.75, 1.0})
      if (classify(traceless_retract(t, sp), tol).tag != tag) return Outcome{false, 0.0, "s = " + std::to_string(sp)};
    return Outcome{};
  });
  return c;
}

/// Exact tuple of the given family conjugated by a random rational matrix.
inline QTuple construct_family_exact(EdgeFamily f, std::size_t r, CounterRng& rng, long bound = 20) {
  QMat g;
  do {
    g = random_rational_matrix(rng, bound);
  } while (g.det().is_zero());
  auto q = [&] { return random_gauss_rational(rng, bound); };
  std::vector<QMat> base;
  switch (f) {
    case EdgeFamily::upper:
      for (std::size_t i = 0; i < r; ++i) base.push_back({q(), q(), GaussRational{}, q()});
      break;
    case EdgeFamily::scalar:
      for (std::size_t i = 0; i < r; ++i) base.push_back(QMat::scalar(q()));
      break;
    case EdgeFamily::diagonal:
      for (std::size_t i = 0; i < r; ++i) base.push_back(QMat::diag(q(), q()));
      break;
    case EdgeFamily::nilpotent: {
      const QMat n{GaussRational{}, q(), GaussRational{}, GaussRational{}};
      base.push_back(n);
      for (std::size_t i = 1; i < r; ++i) base.push_back(q() * n + QMat::scalar(q()));
      break;
    }
  }
  return conjugate(QTuple(std::move(base)), g);
}

inline Check retraction_preserves_stratum_exact(std::size_t r_min, std::size_t r_max, std::uint64_t n,
                                                std::uint64_t seed, unsigned threads) {
  Check c{"retraction_preserves_stratum_exact"};
  const std::uint64_t s = check_seed(seed, c.name);
  run_samples(c, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s, k);
    const std::size_t r = r_min + k % (r_max - r_min + 1);
    const QTuple t = (k % 5 == 4) ? random_rational_tuple(rng, r, 20) : construct_family_exact(edge_families[k % 4], r, rng);
    const StratumTag tag = classify(t).tag;
    for (long num : {0L, 1L, 2L, 3L, 4L})
      if (classify(traceless_retract(t, mpq_class(num, 4))).tag != tag)
        return Outcome{false, 0.0, "s = " + std::to_string(num) + "/4"};
    return Outcome{};
  });
  return c;
}

// --- maps -------------------------------------------------------------------

inline CVec random_sphere_point(CounterRng& rng, std::size_t n) {
  CVec v(n);
  for (auto& z : v) z = rng.complex_normal();
  const double nn = vec_norm(v);
  for (auto& z : v) z /= nn;
  return v;
}

inline double tuple_distance(const FTuple& x, const FTuple& y) {
  double worst = 0;
  for (std::size_t i = 0; i < x.r(); ++i) worst = std::max(worst, frobenius(FMat(x[i] - y[i])) / std::max(1.0, frobenius(y[i])));
  return worst;
}

inline std::vector<Check> maps(std::size_t r_min, std::size_t r_max, std::uint64_t n, std::uint64_t seed,
                               unsigned threads, double tol) {
  std::vector<Check> out;
  auto r_of = [&](std::uint64_t k) { return std::max<std::size_t>(2, r_min) + k % (r_max - std::max<std::size_t>(2, r_min) + 1); };
  auto add = [&](std::string name, double threshold, const std::function<Outcome(CounterRng&, std::size_t)>& fn) {
    Check c{std::move(name), 0, 0, 0, threshold};
    const std::uint64_t s = check_seed(seed, c.name);
    run_samples(c, n, threads, [&](std::uint64_t k) {
      CounterRng rng(s, k);
      return fn(rng, r_of(k));
    });
    out.push_back(std::move(c));
  };

  add("s1_action_equals_diag_conjugation", 1e-12, [&](CounterRng& rng, std::size_t r) {
    const Cplx lam = rng.unit_circle();
    const FTuple t = random_tuple(rng, r);
    const double d = tuple_distance(s1_act(lam, t), conjugate(t, FMat::diag(1.0, lam)));
    return Outcome{d <= 1e-12, d};
  });
  add("i_map_s1_equivariance_bit_exact", 0, [&](CounterRng& rng, std::size_t r) {
    const CVec b = random_sphere_point(rng, r - 1), c = random_sphere_point(rng, r - 1);
    const Cplx lam = rng.unit_circle();
    auto [lb, lc] = sphere_act(lam, b, c);
    FTuple lhs = i_map(lb, lc);
    FTuple rhs = s1_act(lam, i_map(b, c));
    return Outcome{lhs == rhs, tuple_distance(lhs, rhs)};
  });
  add("i_map_image_generates", 0, [&](CounterRng& rng, std::size_t r) {
    const CVec b = random_sphere_point(rng, r - 1), c = random_sphere_point(rng, r - 1);
    return Outcome{classify(i_map(b, c), tol).tag == StratumTag::generating};
  });
  add("tau_after_i_equals_i_after_swap_bit_exact", 0, [&](CounterRng& rng, std::size_t r) {
    const CVec b = random_sphere_point(rng, r - 1), c = random_sphere_point(rng, r - 1);
    const FTuple lhs = tau_map(i_map(b, c)), rhs = i_map(c, b);
    return Outcome{lhs == rhs, tuple_distance(lhs, rhs)};
  });
  add("tau_equals_negated_conjugation", 1e-12, [&](CounterRng& rng, std::size_t r) {
    const FTuple t = random_tuple(rng, r);
    FTuple ref = conjugate(t, FMat{0.0, -1.0, 1.0, 0.0});
    for (auto& m : ref) m = -m;
    const double d = tuple_distance(tau_map(t), ref);
    return Outcome{d <= 1e-12, d};
  });
  add("tau_involution_bit_exact", 0, [&](CounterRng& rng, std::size_t r) {
    const FTuple t = random_tuple(rng, r);
    return Outcome{tau_map(tau_map(t)) == t};
  });
  add("tau_preserves_stratum", 0, [&](CounterRng& rng, std::size_t r) {
    const FTuple t = rng.uniform() < 0.5 ? random_tuple(rng, r)
                                         : construct_family(edge_families[rng.below(4)], r, rng, 10.0).tuple;
    return Outcome{classify(t, tol).tag == classify(tau_map(t), tol).tag};
  });
  add("sigma_involution_bit_exact", 0, [&](CounterRng& rng, std::size_t r) {
    const CVec b = random_sphere_point(rng, r - 1), c = random_sphere_point(rng, r - 1);
    auto [b1, c1] = sigma_map(b, c);
    auto [b2, c2] = sigma_map(b1, c1);
    return Outcome{b2 == b && c2 == c};
  });
  add("sigma_s1_equivariance", 1e-9, [&](CounterRng& rng, std::size_t r) {
    const CVec b = random_sphere_point(rng, r - 1), c = random_sphere_point(rng, r - 1);
    const Cplx lam = rng.unit_circle();
    auto [lb, lc] = sphere_act(lam, b, c);
    auto lhs = sigma_map(lb, lc);
    auto [sb, sc] = sigma_map(b, c);
    auto rhs = sphere_act(lam, sb, sc);
    double d = 0;
    for (std::size_t k = 0; k < b.size(); ++k)
      d = std::max({d, std::abs(lhs.first[k] - rhs.first[k]), std::abs(lhs.second[k] - rhs.second[k])});
    return Outcome{d <= 1e-9, d};
  });
  add("j_map_random_generates", 0, [&](CounterRng& rng, std::size_t r) {
    CVec b(r - 1);
    const double scale = std::pow(10.0, -6.0 * rng.uniform());
    for (auto& z : b) z = scale * rng.complex_normal();
    const StratumTag tag = classify(j_map(b), tol).tag;
    return Outcome{tag == StratumTag::generating};
  });
  {
    // j^-1(non-generating) = {0} on a grid of small coordinates.
    Check c{"j_map_grid_preimage_of_nongenerating_is_origin"};
    const std::array<Cplx, 5> vals{0.0, 1.0, -1.0, Cplx(0, 1), Cplx(0.5, -0.25)};
    for (std::size_t r = std::max<std::size_t>(2, r_min); r <= std::min<std::size_t>(r_max, 4); ++r) {
      std::size_t total = 1;
      for (std::size_t k = 0; k + 1 < r; ++k) total *= vals.size();
      for (std::size_t code = 0; code < total; ++code) {
        CVec b(r - 1);
        std::size_t x = code;
        bool zero = true;
        for (auto& z : b) {
          z = vals[x % vals.size()];
          x /= vals.size();
          zero = zero && z == Cplx{};
        }
        const Stratum<Cplx> st = classify(j_map(b), tol);
        bool ok = zero ? (st.tag == StratumTag::eigen_shared && st.line && line_distance(*st.line, FLine(0.0, 1.0)) <= tol)
                       : st.tag == StratumTag::generating;
        c.record({ok, 0.0, ok ? "" : "grid point " + std::to_string(code)});
      }
    }
    out.push_back(std::move(c));
  }
  add("p_equivariance", 1e-9, [&](CounterRng& rng, std::size_t r) {
    const Constructed ct = construct_family(EdgeFamily::upper, r, rng, 10.0);
    const FMat g = random_conjugator(rng, 10.0);
    const Stratum<Cplx> a = classify(ct.tuple, tol), b = classify(conjugate(ct.tuple, g), tol);
    if (a.tag != StratumTag::eigen_shared || b.tag != StratumTag::eigen_shared) return Outcome{false, 0.0, "not in W(r)"};
    const double d = line_distance(*b.line, a.line->transformed(g));
    return Outcome{d <= 1e-9, d};
  });
  add("p_trivialization_fiber_upper_triangular", 1e-9, [&](CounterRng& rng, std::size_t r) {
    std::vector<FMat> base;
    for (std::size_t i = 0; i < r; ++i) base.push_back({rng.complex_normal(), rng.complex_normal(), 0.0, rng.complex_normal()});
    const FTuple u(base);
    const FMat g = random_conjugator(rng, 10.0);
    const FTuple t = conjugate(u, g);
    auto [p, q] = FLine(1.0, 0.0).transformed(g).unit();
    const int chart = std::abs(p) >= std::abs(q) ? 0 : 1;
    const Trivialization tr = p_trivialize(t, chart, tol);
    double d = line_distance(tr.line, FLine(1.0, 0.0).transformed(g));
    for (std::size_t i = 0; i < r; ++i) {
      const double sc = std::max(1.0, frobenius(u[i]));
      d = std::max({d, std::abs(tr.fiber[i].c) / sc, std::abs(tr.fiber[i].a - u[i].a) / sc,
                    std::abs(tr.fiber[i].d - u[i].d) / sc});
    }
    return Outcome{d <= 1e-9 && !pairwise_commuting(tr.fiber, tol), d};
  });
  add("f_inverse_after_f_after_g", 1e-9, [&](CounterRng& rng, std::size_t) {
    const YPoint p = g_map(random_tangent_point(rng, random_log_modulus(rng, 1e-2, 1e2), 3.0));
    const YPoint back = f_inverse(f_map(p), tol), can = z2_canonical(p);
    double d = std::abs(back.lambda - can.lambda) / std::abs(can.lambda);
    for (std::size_t k = 0; k < 3; ++k) d = std::max(d, std::abs(back.y[k] - can.y[k]) / std::max(1.0, std::abs(can.y[k])));
    return Outcome{d <= 1e-9, d};
  });
  add("g_inverse_after_g", 1e-9, [&](CounterRng& rng, std::size_t) {
    const TangentPoint t = random_tangent_point(rng, random_log_modulus(rng, 1e-2, 1e2), 3.0);
    const TangentPoint back = g_inverse(g_map(t));
    double d = std::abs(back.lambda - t.lambda) / std::abs(t.lambda);
    for (std::size_t k = 0; k < 3; ++k) d = std::max({d, std::abs(back.u[k] - t.u[k]), std::abs(back.v[k] - t.v[k])});
    return Outcome{d <= 1e-9, d};
  });
  return out;
}

// --- B(2) model -------------------------------------------------------------

inline double rel_diff(const Cplx3& a, const Cplx3& b) {
  double num = 0, den = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    num = std::max(num, std::abs(a[k] - b[k]));
    den = std::max(den, std::abs(b[k]));
  }
  return num / std::max(1.0, den);
}

/// Random TangentPoint with |lambda| log-uniform in [1e-3, 1e3] and the
/// Gaussian tangent vector scaled log-uniformly in [1e-3, 1e2].
inline TangentPoint random_b2_tangent(CounterRng& rng) {
  const Cplx lam = random_log_modulus(rng, 1e-3, 1e3);
  const double vs = std::exp(std::log(1e-3) + std::log(1e5) * rng.uniform());
  return random_tangent_point(rng, lam, vs);
}

inline std::vector<Check> b2(std::uint64_t n, std::uint64_t seed, unsigned threads, double tol) {
  std::vector<Check> out;
  auto add = [&](std::string name, double threshold, const std::function<Outcome(CounterRng&)>& fn) {
    Check c{std::move(name), 0, 0, 0, threshold};
    const std::uint64_t s = check_seed(seed, c.name);
    run_samples(c, n, threads, [&](std::uint64_t k) {
      CounterRng rng(s, k);
      return fn(rng);
    });
    out.push_back(std::move(c));
  };
  add("f_inverse_after_f_is_z2_canonical", 1e-10, [&](CounterRng& rng) {
    const YPoint p = g_map(random_b2_tangent(rng));
    const YPoint back = f_inverse(f_map(p), tol);
    const YPoint can = z2_canonical(p);
    const double d = std::max(std::abs(back.lambda - can.lambda) / std::abs(can.lambda), rel_diff(back.y, can.y));
    return Outcome{d <= 1e-10, d};
  });
  add("g_inverse_after_g_is_identity", 1e-10, [&](CounterRng& rng) {
    const TangentPoint t = random_b2_tangent(rng);
    const TangentPoint back = g_inverse(g_map(t));
    double d = std::abs(back.lambda - t.lambda) / std::abs(t.lambda);
    const double vn = std::max(1.0, std::sqrt(detail::dot(t.v, t.v)));
    for (std::size_t k = 0; k < 3; ++k)
      d = std::max({d, std::abs(back.u[k] - t.u[k]), std::abs(back.v[k] - t.v[k]) / vn});
    return Outcome{d <= 1e-10, d};
  });
  add("f_z2_invariance_bit_exact", 0, [&](CounterRng& rng) {
    const YPoint p = g_map(random_b2_tangent(rng));
    const YPoint m{-p.lambda, {-p.y[0], -p.y[1], -p.y[2]}};
    const XCoords<Cplx> a = f_map(p), b = f_map(m);
    return Outcome{a == b};
  });
  add("g_output_on_y_quadric", 1e-12, [&](CounterRng& rng) {
    const TangentPoint t = random_b2_tangent(rng);
    const YPoint p = g_map(t);
    const double scaled = y_residual(p.y) / (1.0 + detail::dot(t.v, t.v));
    return Outcome{scaled <= 1e-12, scaled};
  });
  add("z2_balanced_product_identification", 0, [&](CounterRng& rng) {
    const YPoint p = g_map(random_b2_tangent(rng));
    const YPoint m{-p.lambda, {-p.y[0], -p.y[1], -p.y[2]}};
    const YPoint a = z2_canonical(p), b = z2_canonical(m);
    return Outcome{a.lambda == b.lambda && a.y == b.y};
  });
  add("chain_tangent_to_pair_generates", 0, [&](CounterRng& rng) {
    const TangentPoint t = random_tangent_point(rng, random_log_modulus(rng, 1e-1, 1e1));
    const B2Coords<Cplx> c = x_to_b2(f_map(g_map(t)));
    const bool off = std::abs(c.quadric()) > tol;
    const FTuple pair = realize_b2(c);
    return Outcome{off && classify(pair, tol).tag == StratumTag::generating};
  });
  add("realize_b2_round_trip", 1e-10, [&](CounterRng& rng) {
    const B2Coords<Cplx> c{rng.complex_normal(), rng.complex_normal(), rng.complex_normal()};
    const B2Coords<Cplx> back = b2_coords(realize_b2(c));
    const double d = std::max({std::abs(back.z1 - c.z1), std::abs(back.z2 - c.z2), std::abs(back.x - c.x)});
    return Outcome{d <= 1e-10, d};
  });
  add("realize_b2_round_trip_exact", 0, [&](CounterRng& rng) {
    const GaussRational w = random_gauss_rational(rng, 30);
    const B2Coords<GaussRational> c{GaussRational(2) * w * w, random_gauss_rational(rng, 30), random_gauss_rational(rng, 30)};
    const QTuple pair = realize_b2(c);
    const bool gen = generates_by_span(pair).generates;
    return Outcome{b2_coords(pair) == c && gen == !c.quadric().is_zero()};
  });
  add("coordinate_change_round_trip", 1e-12, [&](CounterRng& rng) {
    const B2Coords<Cplx> c{rng.complex_normal(), rng.complex_normal(), rng.complex_normal()};
    const B2Coords<Cplx> back = x_to_b2(b2_to_x(c));
    const double d = std::max({std::abs(back.z1 - c.z1), std::abs(back.z2 - c.z2), std::abs(back.x - c.x)});
    return Outcome{d <= 1e-12, d};
  });
  add("core_retract_after_embed_is_identity", 0, [&](CounterRng& rng) {
    const Cplx lam = rng.unit_circle();
    const Real3 u = random_unit3(rng);
    auto [l2, u2] = retract_to_core(circle_sphere_embed(lam, u));
    const double d = std::max(std::abs(l2 - lam), std::abs(u2[0] - u[0]) + std::abs(u2[1] - u[1]) + std::abs(u2[2] - u[2]));
    return Outcome{d <= 1e-15, d};
  });
  {
    Check c{"quadric_identity_symbolic"};
    const Polynomial z1 = Polynomial::variable(0), z2 = Polynomial::variable(1), x = Polynomial::variable(2);
    const B2Coords<Polynomial> gen{z1, z2, x};
    const XCoords<Polynomial> xc = b2_to_x(gen);
    c.record({xc.sum_of_squares() == gen.quadric(), 0.0, "x1^2+x2^2+x3^2 != x^2 - z1 z2"});
    c.record({x_to_b2(xc) == gen, 0.0, "inverse change of coordinates is not the inverse"});
    const Polynomial x1 = Polynomial::variable(0), x2 = Polynomial::variable(1), x3 = Polynomial::variable(2);
    const XCoords<Polynomial> xg{x1, x2, x3};
    c.record({b2_to_x(x_to_b2(xg)) == xg, 0.0, "forward change of coordinates is not the inverse"});
    out.push_back(std::move(c));
  }
  return out;
}

// --- ranks and Monte Carlo --------------------------------------------------

inline std::vector<ChartSpec> charts_for(std::size_t r) {
  std::vector<ChartSpec> out;
  for (std::size_t i = 0; i < r; ++i) out.push_back({ChartKind::t_chart, r, i});
  for (ChartKind k : {ChartKind::w_fiber, ChartKind::incidence_fiber, ChartKind::j_map, ChartKind::i_map,
                      ChartKind::t_defining})
    out.push_back({k, r, 0});
  return out;
}

inline Check chart_rank(const ChartSpec& spec, std::uint64_t n, std::uint64_t seed, unsigned threads) {
  Check c{"rank_" + spec.name() + "_r" + std::to_string(spec.r) + "_expected_" + std::to_string(spec.expected_rank())};
  const std::uint64_t s = check_seed(seed, c.name);
  run_samples(c, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s, k);
    const RankEntry e = numeric_jacobian_rank(spec, generic_chart_point(spec, rng));
    return Outcome{e.pass, e.gap_high,
                   e.pass ? "" : "observed rank " + std::to_string(e.observed_rank) + " at sample " + std::to_string(k)};
  });
  return c;
}

inline Check montecarlo_generation(std::size_t r, std::uint64_t n, std::uint64_t seed, unsigned threads, double tol) {
  Check c{"gaussian_samples_generate_r" + std::to_string(r)};
  run_samples(c, n, threads, [&](std::uint64_t k) {
    const FTuple t = std::get<FTuple>(sample_tuple(r, Distribution::gaussian, seed, k));
    return Outcome{generates_by_span(t, tol).generates, 0.0, "non-generating Gaussian sample " + std::to_string(k)};
  });
  return c;
}

inline Check montecarlo_t_chart(std::size_t r, std::uint64_t n, std::uint64_t seed, unsigned threads, double tol) {
  Check c{"t_chart_samples_non_generating_r" + std::to_string(r)};
  const std::uint64_t s = check_seed(seed, c.name);
  run_samples(c, n, threads, [&](std::uint64_t k) {
    CounterRng rng(s, k);
    std::vector<std::pair<Cplx, Cplx>> coeffs;
    for (std::size_t i = 0; i + 1 < r; ++i) coeffs.emplace_back(rng.complex_normal(), rng.complex_normal());
    const FTuple t = t_chart<Cplx>(k % r, random_matrix(rng), coeffs);
    return Outcome{!generates_by_span(t, tol).generates && pairwise_commuting(t, tol)};
  });
  return c;
}

}  // namespace checks

// ---------------------------------------------------------------------------
// Suites

inline SuiteReport run_suite(SuiteName name, const SuiteParams& p) {
  SuiteReport rep{std::string(to_string(name)), {}};
  const unsigned th = std::max(1u, p.threads);
  switch (name) {
    case SuiteName::ranks: {
      const std::size_t r_max = p.r_max.value_or(6);
      const std::uint64_t n = p.samples.value_or(100);
      for (std::size_t r = std::max<std::size_t>(2, p.r_min); r <= r_max; ++r)
        for (const auto& spec : checks::charts_for(r)) rep.checks.push_back(checks::chart_rank(spec, n, p.seed, th));
      break;
    }
    case SuiteName::maps: {
      const std::uint64_t n = p.samples.value_or(10000);
      rep.checks = checks::maps(p.r_min, p.r_max.value_or(6), n, p.seed, th, p.tol);
      break;
    }
    case SuiteName::equivalences: {
      const std::size_t r_max = p.r_max.value_or(5);
      const std::size_t r_min = std::max<std::size_t>(2, p.r_min);
      const std::uint64_t n = p.samples.value_or(100000);
      const std::uint64_t n10 = std::max<std::uint64_t>(1, n / 10);
      const std::uint64_t n100 = std::max<std::uint64_t>(1, n / 100);
      for (std::size_t r = r_min; r <= r_max; ++r) {
        rep.checks.push_back(checks::burnside_random(r, n, p.seed, th, p.tol));
        rep.checks.push_back(checks::burnside_edges(r, n10, p.seed, th, p.tol));
      }
      rep.checks.push_back(checks::friedland_exact(n10, p.seed, th));
      rep.checks.push_back(checks::friedland_curated());
      rep.checks.push_back(checks::sibirskii_conjugation(r_min, r_max, n10, p.seed, th));
      rep.checks.push_back(checks::sibirskii_conjugation_exact(n100, p.seed, th));
      rep.checks.push_back(checks::classify_invariance(r_min, r_max, n10, p.seed, th, p.tol));
      rep.checks.push_back(checks::semisimplify_invariants(r_min, r_max, n10, p.seed, th, p.tol));
      auto sep = checks::orbit_separation(r_min, r_max, n100, p.seed, th, p.tol);
      rep.checks.push_back(std::move(sep.conjugate_pairs));
      rep.checks.push_back(std::move(sep.distinct_pairs));
      rep.checks.push_back(checks::freeness(r_min, r_max, n100, p.seed, th, p.tol));
      rep.checks.push_back(checks::retraction_preserves_stratum(r_min, r_max, n100, p.seed, th, p.tol));
      rep.checks.push_back(checks::retraction_preserves_stratum_exact(r_min, r_max, n100, p.seed, th));
      break;
    }
    case SuiteName::b2: {
      rep.checks = checks::b2(p.samples.value_or(10000), p.seed, th, p.tol);
      break;
    }
    case SuiteName::montecarlo: {
      const std::uint64_t n = p.samples.value_or(1000000);
      const std::size_t r_max = p.r_max.value_or(std::max<std::size_t>(2, p.r_min));
      for (std::size_t r = std::max<std::size_t>(2, p.r_min); r <= r_max; ++r) {
        rep.checks.push_back(checks::montecarlo_generation(r, n, p.seed, th, p.tol));
        rep.checks.push_back(checks::montecarlo_t_chart(r, std::max<std::uint64_t>(1, n / 1000), p.seed, th, p.tol));
      }
      break;
    }
  }
  return rep;
}

}  // namespace mat2gen
