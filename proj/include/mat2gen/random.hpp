#pragma once

// Counter-based random streams. The k-th draw of stream s under seed S is a
// pure function of (S, s, k), so parallel workers reproduce a sequential run
// exactly when each sample index owns its own stream.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <variant>
#include <vector>

#include "mat2gen/b2_model.hpp"
#include "mat2gen/mat2.hpp"

namespace mat2gen {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(mix64(seed + 0x9e3779b97f4a7c15ull) ^ (stream * 0xd1b54a32d192ed03ull + 0x632be59bd9b4e019ull))) {}

  std::uint64_t operator()() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % n;
  }

  long uniform_int(long lo, long hi) { return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1))); }

  /// Standard normal by Box-Muller (one value per call, no cached state).
  double normal() {
    double u1;
    do {
      u1 = uniform();
    } while (u1 == 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Cplx complex_normal() { return {normal(), normal()}; }

  Cplx unit_disc() {
    const double rad = std::sqrt(uniform());
    const double th = 2.0 * std::numbers::pi * uniform();
    return std::polar(rad, th);
  }

  Cplx unit_circle() { return std::polar(1.0, 2.0 * std::numbers::pi * uniform()); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class Distribution { gaussian, unit_disc, rational };

inline std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::gaussian:
      return "gaussian";
    case Distribution::unit_disc:
      return "unit_disc";
    case Distribution::rational:
      return "rational";
  }
  return "?";
}

inline FMat random_matrix(CounterRng& rng, Distribution d = Distribution::gaussian) {
  auto draw = [&] { return d == Distribution::unit_disc ? rng.unit_disc() : rng.complex_normal(); };
  FMat m;
  m.a = draw();
  m.b = draw();
  m.c = draw();
  m.d = draw();
  return m;
}

inline FTuple random_tuple(CounterRng& rng, std::size_t r, Distribution d = Distribution::gaussian) {
  std::vector<FMat> ms;
  ms.reserve(r);
  for (std::size_t i = 0; i < r; ++i) ms.push_back(random_matrix(rng, d));
  return FTuple(std::move(ms));
}

/// Gaussian rational with numerators in [-100, 100] and denominators in [1, 100].
inline GaussRational random_gauss_rational(CounterRng& rng, long bound = 100) {
  const long rn = rng.uniform_int(-bound, bound), rd = rng.uniform_int(1, bound);
  const long in = rng.uniform_int(-bound, bound), id = rng.uniform_int(1, bound);
  return {rn, rd, in, id};
}

inline QMat random_rational_matrix(CounterRng& rng, long bound = 100) {
  QMat m;
  m.a = random_gauss_rational(rng, bound);
  m.b = random_gauss_rational(rng, bound);
  m.c = random_gauss_rational(rng, bound);
  m.d = random_gauss_rational(rng, bound);
  return m;
}

inline QTuple random_rational_tuple(CounterRng& rng, std::size_t r, long bound = 100) {
  std::vector<QMat> ms;
  ms.reserve(r);
  for (std::size_t i = 0; i < r; ++i) ms.push_back(random_rational_matrix(rng, bound));
  return QTuple(std::move(ms));
}

/// 2x2 condition number sigma_max / sigma_min.
inline double condition_number(const FMat& g) {
  const double f2 = std::norm(g.a) + std::norm(g.b) + std::norm(g.c) + std::norm(g.d);
  const double dt = std::abs(g.det());
  if (dt == 0.0) return INFINITY;
  // sigma_max^2 + sigma_min^2 = f2, sigma_max sigma_min = |det|
  const double disc = std::sqrt(std::max(0.0, f2 * f2 - 4.0 * dt * dt));
  const double smax = std::sqrt(0.5 * (f2 + disc));
  return smax * smax / dt;
}

/// Gaussian matrix conditioned to at most max_cond, by rejection.
inline FMat random_conjugator(CounterRng& rng, double max_cond = 100.0) {
  for (;;) {
    FMat g = random_matrix(rng);
    if (condition_number(g) <= max_cond) return g;
  }
}

/// Uniform unit vector in R^3.
inline Real3 random_unit3(CounterRng& rng) {
  for (;;) {
    Real3 w{rng.normal(), rng.normal(), rng.normal()};
    const double n = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    if (n > 1e-12) return {w[0] / n, w[1] / n, w[2] / n};
  }
}

/// u uniform on S^2, v = w - (w.u) u for Gaussian w scaled by v_scale.
inline TangentPoint random_tangent_point(CounterRng& rng, Cplx lambda, double v_scale = 1.0) {
  const Real3 u = random_unit3(rng);
  Real3 w{v_scale * rng.normal(), v_scale * rng.normal(), v_scale * rng.normal()};
  const double wu = w[0] * u[0] + w[1] * u[1] + w[2] * u[2];
  return {lambda, u, {w[0] - wu * u[0], w[1] - wu * u[1], w[2] - wu * u[2]}};
}

/// Log-uniform modulus in [lo, hi] with uniform argument.
inline Cplx random_log_modulus(CounterRng& rng, double lo, double hi) {
  const double m = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform());
  return std::polar(m, 2.0 * std::numbers::pi * rng.uniform());
}

using AnyTuple = std::variant<FTuple, QTuple>;

/// The index-th tuple of the stream for (r, dist, seed).
inline AnyTuple sample_tuple(std::size_t r, Distribution dist, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, index);
  if (dist == Distribution::rational) return random_rational_tuple(rng, r);
  return random_tuple(rng, r, dist);
}

inline std::vector<AnyTuple> sample_tuples(std::size_t r, std::size_t n, Distribution dist, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_tuples needs n >= 1");
  std::vector<AnyTuple> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(sample_tuple(r, dist, seed, k));
  return out;
}

}  // namespace mat2gen
