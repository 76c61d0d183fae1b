#include <gtest/gtest.h>

#include "mat2gen/generation.hpp"
#include "mat2gen/invariants.hpp"
#include "mat2gen/random.hpp"

using namespace mat2gen;
using Q = GaussRational;

namespace {
const FMat X{0.0, 1.0, 1.0, 0.0};
const FMat Z = FMat::diag(1.0, -1.0);
const FMat J{0.0, 1.0, -1.0, 0.0};

// entrywise trace formulas, no matrix products
Q tr_prod(const QMat& x, const QMat& y) { return x.a * y.a + x.b * y.c + x.c * y.b + x.d * y.d; }
Q tr_prod3(const QMat& x, const QMat& y, const QMat& z) {
  const Q e[2][2] = {{x.a, x.b}, {x.c, x.d}}, f[2][2] = {{y.a, y.b}, {y.c, y.d}}, g[2][2] = {{z.a, z.b}, {z.c, z.d}};
  Q s;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) s = s + e[i][j] * f[j][k] * g[k][i];
  return s;
}

QMat random_invertible(CounterRng& rng, long bound = 20) {
  QMat g;
  do {
    g = random_rational_matrix(rng, bound);
  } while (g.det().is_zero());
  return g;
}
}  // namespace

TEST(Sibirskii, Examples) {
  const auto a = sibirskii(FTuple{Z, X});
  EXPECT_EQ(a.t1, (std::vector<Cplx>{0.0, 0.0}));
  EXPECT_EQ(a.t2, (std::vector<Cplx>{2.0, 2.0}));
  EXPECT_EQ(a.t11.at({0, 1}), Cplx(0.0));
  EXPECT_TRUE(a.t111.empty());

  const auto b = sibirskii(QTuple{QMat::identity(), QMat::identity()});
  EXPECT_EQ(b.t1, (std::vector<Q>{Q(2), Q(2)}));
  EXPECT_EQ(b.t2, (std::vector<Q>{Q(2), Q(2)}));
  EXPECT_EQ(b.t11.at({0, 1}), Q(2));

  const auto c = sibirskii(FTuple{Z, X, J});
  ASSERT_EQ(c.t111.size(), 1u);
  EXPECT_EQ(c.t111.at({0, 1, 2}), Cplx(-2.0));
  EXPECT_EQ(c.flatten().size(), SibInvariants<Cplx>::count(3));
}

TEST(Sibirskii, CountFormula) {
  EXPECT_EQ(SibInvariants<Q>::count(1), 2u);
  EXPECT_EQ(SibInvariants<Q>::count(2), 5u);
  EXPECT_EQ(SibInvariants<Q>::count(3), 10u);
  EXPECT_EQ(SibInvariants<Q>::count(4), 18u);
}

TEST(Sibirskii, MatchesEntrywiseTraceFormulas) {
  CounterRng rng(10, 0);
  for (int k = 0; k < 200; ++k) {
    const QTuple t = random_rational_tuple(rng, 4, 30);
    const auto inv = sibirskii(t);
    for (int i = 0; i < 4; ++i) {
      EXPECT_EQ(inv.t1[i], t[i].a + t[i].d);
      EXPECT_EQ(inv.t2[i], tr_prod(t[i], t[i]));
      for (int j = i + 1; j < 4; ++j) {
        EXPECT_EQ(inv.t11.at({i, j}), tr_prod(t[i], t[j]));
        for (int l = j + 1; l < 4; ++l) EXPECT_EQ((inv.t111.at({i, j, l})), tr_prod3(t[i], t[j], t[l]));
      }
    }
  }
}

TEST(Sibirskii, ExactConjugationInvariance) {
  CounterRng rng(11, 0);
  for (int k = 0; k < 300; ++k) {
    const QTuple t = random_rational_tuple(rng, 2 + k % 3, 30);
    EXPECT_TRUE(invariants_equal(sibirskii(t), sibirskii(conjugate(t, random_invertible(rng)))));
  }
}

TEST(Sibirskii, FloatConjugationInvariance) {
  CounterRng rng(12, 0);
  for (int k = 0; k < 1000; ++k) {
    const FTuple t = random_tuple(rng, 2 + k % 4);
    EXPECT_LE(invariant_deviation(sibirskii(t), sibirskii(conjugate(t, random_conjugator(rng, 100.0)))), 1e-9);
  }
}

TEST(Sibirskii, MismatchedArityThrows) {
  EXPECT_THROW(invariant_deviation(sibirskii(FTuple{Z}), sibirskii(FTuple{Z, X})), wrong_arity);
}

TEST(Retract, Examples) {
  const FTuple t{FMat{1.0, 2.0, 3.0, 4.0}, Z};
  EXPECT_EQ(traceless_retract(t, 0.0), t);
  EXPECT_EQ(traceless_retract(QTuple{QMat::identity()}, real_t<Q>(1)), QTuple{QMat::zero()});
  EXPECT_EQ((traceless_retract(QTuple{QMat{2, 1, 0, 0}}, real_t<Q>(1))), (QTuple{QMat{1, 1, 0, -1}}));
  EXPECT_THROW(traceless_retract(t, -0.5), std::invalid_argument);
  EXPECT_THROW(traceless_retract(t, 1.5), std::invalid_argument);
}

TEST(Retract, EndpointTracelessAndCommutatorsFixed) {
  CounterRng rng(13, 0);
  for (int k = 0; k < 200; ++k) {
    const QTuple t = random_rational_tuple(rng, 3, 30);
    const real_t<Q> s(mpq_class(k % 11, 10));
    const QTuple u = traceless_retract(t, s);
    for (std::size_t i = 0; i < t.r(); ++i) {
      for (std::size_t j = 0; j < t.r(); ++j) EXPECT_EQ(commutator(u[i], u[j]), commutator(t[i], t[j]));
      EXPECT_EQ(u[i].trace(), (t[i].trace() * Q(real_t<Q>(1) - s)));
    }
    EXPECT_EQ(classify(u).tag, classify(t).tag);
  }
}

TEST(B2Coords, Examples) {
  const auto a = b2_coords(FTuple{Z, X});
  EXPECT_EQ(a, (B2Coords<Cplx>{2.0, 2.0, 0.0}));
  EXPECT_EQ(a.quadric(), Cplx(-4.0));
  const auto b = b2_coords(QTuple{QMat::diag(1, -1), QMat::diag(1, -1)});
  EXPECT_EQ(b, (B2Coords<Q>{Q(2), Q(2), Q(2)}));
  EXPECT_TRUE(b.quadric().is_zero());
  EXPECT_TRUE(b2_coords(QTuple{QMat::zero(), QMat::zero()}).quadric().is_zero());
}

TEST(B2Coords, Errors) {
  EXPECT_THROW(b2_coords(FTuple{Z}), wrong_arity);
  EXPECT_THROW(b2_coords(FTuple{Z, X, X}), wrong_arity);
  EXPECT_THROW(b2_coords(FTuple{FMat::identity(), X}), not_traceless);
  EXPECT_THROW(b2_coords(QTuple{QMat::diag(1, -1), QMat{1, 0, 0, 0}}), not_traceless);
}

TEST(B2Coords, QuadricDetectsGeneration) {
  CounterRng rng(14, 0);
  for (int k = 0; k < 500; ++k) {
    QTuple t = traceless_retract(random_rational_tuple(rng, 2, 10), real_t<Q>(1));
    if (k % 2) {
      // traceless upper-triangular pair, conjugated
      QMat u = t[0], v = t[1];
      u.c = Q();
      v.c = Q();
      t = conjugate(QTuple{u, v}, random_invertible(rng));
    }
    EXPECT_EQ(!b2_coords(t).quadric().is_zero(), generates_by_span(t).generates);
  }
}

TEST(Realize, Examples) {
  EXPECT_EQ(realize_b2(B2Coords<Cplx>{2.0, 2.0, 0.0}), (FTuple{Z, X}));
  EXPECT_EQ(realize_b2(B2Coords<Q>{Q(2), Q(2), Q(0)}), (QTuple{QMat::diag(1, -1), QMat{0, 1, 1, 0}}));

  const QTuple q = realize_b2(B2Coords<Q>{Q(2), Q(2), Q(2)});
  EXPECT_EQ(q, (QTuple{QMat::diag(1, -1), QMat{1, 1, 0, -1}}));
  const Stratum<Q> s = classify(q);
  EXPECT_NE(s.tag, StratumTag::generating);
  EXPECT_EQ(*s.line, QLine(Q(1), Q(0)));

  const QTuple z = realize_b2(B2Coords<Q>{});
  EXPECT_EQ(sibirskii(z).flatten(), std::vector<Q>(5, Q()));
  EXPECT_TRUE(z[0].trace().is_zero() && z[1].trace().is_zero());
}

TEST(Realize, ExactFallbackCharts) {
  const std::vector<B2Coords<Q>> cases{
      {Q(3), Q(2), Q(0)},   // only z2/2 is a square
      {Q(0), Q(3), Q(5)},   // z1 = 0, z2/2 not a square
      {Q(3), Q(0), Q(0)},   // z2 = 0, x = 0
      {Q(3), Q(6), Q(3)},   // x^2 - z1 z2 = -9 is a square in Q(i)
      {Q(3), Q(5), Q(7)} // sqrt(49 - 15) is irrational
  };
  for (std::size_t k = 0; k + 1 < cases.size(); ++k) {
    const QTuple t = realize_b2(cases[k]);
    EXPECT_EQ(b2_coords(t), cases[k]) << k;
  }
  EXPECT_THROW(realize_b2(cases.back()), no_exact_realization);
}

TEST(Realize, FloatRoundTrip) {
  CounterRng rng(15, 0);
  for (int k = 0; k < 2000; ++k) {
    B2Coords<Cplx> c{rng.complex_normal(), rng.complex_normal(), rng.complex_normal()};
    if (k % 5 == 0) c.z1 = 0.0;
    if (k % 7 == 0) c.z2 = 0.0;
    const auto back = b2_coords(realize_b2(c));
    const double scale = 1.0 + std::abs(c.z1) + std::abs(c.z2) + std::abs(c.x);
    EXPECT_LE(std::abs(back.z1 - c.z1) + std::abs(back.z2 - c.z2) + std::abs(back.x - c.x), 1e-10 * scale * scale);
  }
}

TEST(Realize, ExactRoundTripOnSquares) {
  CounterRng rng(16, 0);
  for (int k = 0; k < 300; ++k) {
    const Q w = random_gauss_rational(rng, 20);
    const B2Coords<Q> c{Q(2) * w * w, random_gauss_rational(rng, 20), random_gauss_rational(rng, 20)};
    EXPECT_EQ(b2_coords(realize_b2(c)), c);
  }
}

TEST(Conjugate, Examples) {
  const FTuple t{FMat{1.0, 2.0, 3.0, 4.0}, X};
  EXPECT_EQ(conjugate(t, FMat::identity()), t);
  const QTuple q{QMat{1, 2, 3, 4}, QMat{0, 1, 1, 0}};
  EXPECT_EQ(conjugate(q, QMat::scalar(Q(7, 3))), q);
  EXPECT_EQ(conjugate(QTuple{QMat::diag(1, -1)}, QMat{0, -1, 1, 0}), QTuple{QMat::diag(-1, 1)});
  EXPECT_THROW(conjugate(q, QMat{1, 2, 2, 4}), singular_conjugator);
  EXPECT_THROW(conjugate(t, FMat{1.0, 2.0, 2.0, 4.0}), singular_conjugator);
}

TEST(Semisimplify, Examples) {
  const FTuple g{Z, X};
  EXPECT_EQ(semisimplify(g), g);
  EXPECT_EQ(semisimplify(FTuple{FMat{0.0, 1.0, 0.0, 0.0}}), FTuple{FMat::zero()});
  EXPECT_EQ(semisimplify(FTuple{FMat{1.0, 5.0, 0.0, 2.0}, FMat{3.0, 7.0, 0.0, 4.0}}),
            (FTuple{FMat::diag(1.0, 2.0), FMat::diag(3.0, 4.0)}));
  EXPECT_THROW(semisimplify(QTuple{QMat::identity()}), unsupported_backend);
}

TEST(Semisimplify, ConjugatedTriangularKeepsInvariants) {
  CounterRng rng(17, 0);
  for (int k = 0; k < 500; ++k) {
    std::vector<FMat> ms;
    for (int i = 0; i < 3; ++i) ms.push_back({rng.complex_normal(), rng.complex_normal(), 0.0, rng.complex_normal()});
    const FTuple t = conjugate(FTuple(ms), random_conjugator(rng, 10.0));
    const FTuple s = semisimplify(t);
    EXPECT_TRUE(is_diagonal(s));
    EXPECT_LE(invariant_deviation(sibirskii(s), sibirskii(t)), 1e-9);
    // diagonal entries are the triangular diagonals, up to a simultaneous swap
    const bool same = std::abs(s[0].a - ms[0].a) < 1e-8;
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(std::abs(s[i].a - (same ? ms[i].a : ms[i].d)), 0.0, 1e-8);
      EXPECT_NEAR(std::abs(s[i].d - (same ? ms[i].d : ms[i].a)), 0.0, 1e-8);
    }
  }
}

TEST(FindConjugator, Examples) {
  const FTuple s{Z, X};
  const auto self = find_conjugator(s, s);
  ASSERT_TRUE(self.g.has_value());
  EXPECT_EQ(self.kernel_dim, 1);
  EXPECT_TRUE(is_scalar(*self.g, 1e-12));

  const auto none = find_conjugator(s, FTuple{Z, J});
  EXPECT_FALSE(none.g.has_value());
  EXPECT_EQ(none.kernel_dim, 0);
  EXPECT_THROW(find_conjugator(s, FTuple{Z}), wrong_arity);
}

TEST(FindConjugator, RecoversConjugatorUpToScalar) {
  CounterRng rng(18, 0);
  for (int k = 0; k < 1000; ++k) {
    const FTuple s = random_tuple(rng, 2 + k % 3);
    const FMat g = random_conjugator(rng, 100.0);
    const auto res = find_conjugator(s, conjugate(s, g));
    ASSERT_TRUE(res.g.has_value());
    EXPECT_EQ(res.kernel_dim, 1);
    EXPECT_LE(res.residual, 1e-9);
    EXPECT_TRUE(is_scalar(*res.g * inverse(g), 1e-8));
  }
}

TEST(FindConjugator, ExactRecovery) {
  CounterRng rng(19, 0);
  for (int k = 0; k < 200; ++k) {
    const QTuple s = random_rational_tuple(rng, 2, 20);
    const QMat g = random_invertible(rng);
    const auto res = find_conjugator(s, conjugate(s, g));
    ASSERT_TRUE(res.g.has_value());
    EXPECT_EQ(res.residual, 0.0);
    EXPECT_TRUE(is_scalar(*res.g * inverse(g)));
  }
}

TEST(OrbitEquivalent, Examples) {
  CounterRng rng(20, 0);
  const FTuple t = random_tuple(rng, 3);
  EXPECT_TRUE(orbit_equivalent(t, conjugate(t, random_conjugator(rng, 50.0))));
  EXPECT_FALSE(orbit_equivalent(FTuple{Z, X}, FTuple{FMat::identity(), FMat::identity()}));
  const FTuple upper{FMat{1.0, 5.0, 0.0, 2.0}, FMat{3.0, 7.0, 0.0, 4.0}};
  EXPECT_TRUE(orbit_equivalent(upper, FTuple{FMat::diag(1.0, 2.0), FMat::diag(3.0, 4.0)}));
  EXPECT_TRUE(orbit_equivalent(upper, FTuple{FMat::diag(2.0, 1.0), FMat::diag(4.0, 3.0)}));
  EXPECT_FALSE(orbit_equivalent(upper, FTuple{FMat::diag(1.0, 2.0), FMat::diag(4.0, 3.0)}));
  EXPECT_THROW(orbit_equivalent(upper, FTuple{Z}), wrong_arity);
}

TEST(OrbitEquivalent, Exact) {
  const QTuple g{QMat::diag(1, -1), QMat{0, 1, 1, 0}};
  EXPECT_TRUE(orbit_equivalent(g, conjugate(g, QMat{1, 2, 3, 7})));
  EXPECT_FALSE(orbit_equivalent(g, QTuple{QMat::diag(1, -1), QMat{0, 2, 1, 0}}));
  const QTuple upper{QMat{1, 5, 0, 2}, QMat{3, 7, 0, 4}};
  EXPECT_THROW(orbit_equivalent(upper, QTuple{QMat::diag(1, 2), QMat::diag(3, 4)}), unsupported_backend);
}
