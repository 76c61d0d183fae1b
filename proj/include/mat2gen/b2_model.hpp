#pragma once

// Coordinate models for the quotient of generating traceless pairs:
// the quadric complement in C^3, the space Y of (lambda, y) with y.y = 1,
// and C^x times the tangent bundle of S^2, plus the Z/2 balanced-product
// identification.

#include <array>
#include <cmath>
#include <complex>
#include <utility>

#include "mat2gen/errors.hpp"
#include "mat2gen/invariants.hpp"
#include "mat2gen/scalar.hpp"

namespace mat2gen {

template <class S>
S imaginary_unit();

template <>
inline Cplx imaginary_unit<Cplx>() {
  return {0.0, 1.0};
}

template <>
inline GaussRational imaginary_unit<GaussRational>() {
  return GaussRational::i();
}

/// Coordinates in which the quadric x^2 - z1 z2 becomes x1^2 + x2^2 + x3^2.
template <class S>
struct XCoords {
  S x1{}, x2{}, x3{};

  S sum_of_squares() const { return x1 * x1 + x2 * x2 + x3 * x3; }
  friend bool operator==(const XCoords& a, const XCoords& b) {
    return a.x1 == b.x1 && a.x2 == b.x2 && a.x3 == b.x3;
  }
};

/// x1 = x, x2 = (z1 - z2) / 2, x3 = (z1 + z2) / (2i).
/// Generic over any ring with exact division by 2 and 2i, so it can be
/// instantiated with symbolic polynomials.
template <class S>
XCoords<S> b2_to_x(const B2Coords<S>& c) {
  const S two(2);
  return {c.x, (c.z1 - c.z2) / two, (c.z1 + c.z2) / (two * imaginary_unit<S>())};
}

/// z1 = x2 + i x3, z2 = -x2 + i x3, x = x1.
template <class S>
B2Coords<S> x_to_b2(const XCoords<S>& p) {
  const S ix3 = imaginary_unit<S>() * p.x3;
  return {p.x2 + ix3, ix3 - p.x2, p.x1};
}

using Real3 = std::array<double, 3>;
using Cplx3 = std::array<Cplx, 3>;

/// lambda != 0 and y1^2 + y2^2 + y3^2 = 1 (complex bilinear).
struct YPoint {
  Cplx lambda;
  Cplx3 y;
};

/// lambda != 0, |u| = 1, u . v = 0.
struct TangentPoint {
  Cplx lambda;
  Real3 u;
  Real3 v;
};

namespace detail {

inline std::pair<double, double> two_product(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline std::pair<double, double> two_sum(double a, double b) {
  const double s = a + b;
  const double z = s - a;
  return {s, (a - (s - z)) + (b - z)};
}

// Sum of x_k * y_k evaluated as if in twice the working precision.
template <std::size_t N>
double dot2(const std::array<double, N>& x, const std::array<double, N>& y) {
  auto [p, s] = two_product(x[0], y[0]);
  for (std::size_t k = 1; k < N; ++k) {
    auto [h, r] = two_product(x[k], y[k]);
    auto [p2, q] = two_sum(p, h);
    p = p2;
    s += q + r;
  }
  return p + s;
}

inline double dot(const Real3& a, const Real3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace detail

/// y1^2 + y2^2 + y3^2 with compensated accumulation.
inline Cplx bilinear_square(const Cplx3& y) {
  const std::array<double, 6> xs{y[0].real(), -y[0].imag(), y[1].real(), -y[1].imag(), y[2].real(), -y[2].imag()};
  const std::array<double, 6> ys{y[0].real(), y[0].imag(), y[1].real(), y[1].imag(), y[2].real(), y[2].imag()};
  const std::array<double, 3> ims_x{2 * y[0].real(), 2 * y[1].real(), 2 * y[2].real()};
  const std::array<double, 3> ims_y{y[0].imag(), y[1].imag(), y[2].imag()};
  return {detail::dot2(xs, ys), detail::dot2(ims_x, ims_y)};
}

inline double y_residual(const Cplx3& y) { return std::abs(bilinear_square(y) - 1.0); }

/// Validity tolerance for Y: |y.y - 1| <= 1e-12 (1 + |y|^2).
inline bool is_valid(const YPoint& p) {
  if (p.lambda == Cplx{}) return false;
  const double n2 = std::norm(p.y[0]) + std::norm(p.y[1]) + std::norm(p.y[2]);
  return y_residual(p.y) <= 1e-12 * (1.0 + n2);
}

inline bool is_valid(const TangentPoint& t) {
  if (t.lambda == Cplx{}) return false;
  const double nu = std::sqrt(detail::dot(t.u, t.u));
  const double nv = std::sqrt(detail::dot(t.v, t.v));
  return std::abs(nu - 1.0) <= 1e-12 && std::abs(detail::dot(t.u, t.v)) <= 1e-12 * std::max(1.0, nv);
}

/// (lambda, y) -> lambda y. Invariant under (lambda, y) -> (-lambda, -y).
inline XCoords<Cplx> f_map(const YPoint& p) {
  if (!is_valid(p)) throw invalid_point("f_map: not a point of Y");
  return {p.lambda * p.y[0], p.lambda * p.y[1], p.lambda * p.y[2]};
}

/// Representative of {p, -p} with Re lambda > 0, or Re lambda = 0 and Im lambda > 0.
inline YPoint z2_canonical(const YPoint& p) {
  const bool keep = p.lambda.real() > 0 || (p.lambda.real() == 0 && p.lambda.imag() > 0);
  if (keep) return p;
  return {-p.lambda, {-p.y[0], -p.y[1], -p.y[2]}};
}

/// Canonical preimage under f: lambda the principal root of x.x, y = x / lambda.
inline YPoint f_inverse(const XCoords<Cplx>& x, double tol = default_tol) {
  const Cplx s = bilinear_square({x.x1, x.x2, x.x3});
  if (!(std::abs(s) > tol)) throw on_quadric("f_inverse: point lies on x1^2 + x2^2 + x3^2 = 0");
  const Cplx lambda = principal_sqrt(s);
  return z2_canonical({lambda, {x.x1 / lambda, x.x2 / lambda, x.x3 / lambda}});
}

/// (lambda, u, v) -> (lambda, sqrt(1 + |v|^2) u + i v).
inline YPoint g_map(const TangentPoint& t) {
  if (!is_valid(t)) throw invalid_point("g_map: not a point of C^x x TS^2");
  const double w = std::sqrt(1.0 + detail::dot(t.v, t.v));
  return {t.lambda, {Cplx(w * t.u[0], t.v[0]), Cplx(w * t.u[1], t.v[1]), Cplx(w * t.u[2], t.v[2])}};
}

/// v = Im y, u = Re y / |Re y|; |Re y|^2 = 1 + |Im y|^2 on Y.
inline TangentPoint g_inverse(const YPoint& p) {
  if (!is_valid(p)) throw invalid_point("g_inverse: not a point of Y");
  const Real3 re{p.y[0].real(), p.y[1].real(), p.y[2].real()};
  const Real3 im{p.y[0].imag(), p.y[1].imag(), p.y[2].imag()};
  const double n = std::sqrt(detail::dot(re, re));
  return {p.lambda, {re[0] / n, re[1] / n, re[2] / n}, im};
}

/// S^1 x S^2 -> C^x x TS^2, (lambda, u) -> (lambda, u, 0).
inline TangentPoint circle_sphere_embed(Cplx lambda, const Real3& u) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12) throw not_unit_modulus("circle_sphere_embed: |lambda| != 1");
  TangentPoint t{lambda, u, {0.0, 0.0, 0.0}};
  if (!is_valid(t)) throw invalid_point("circle_sphere_embed: u is not a unit vector");
  return t;
}

/// (lambda, u, v) -> (lambda / |lambda|, u).
inline std::pair<Cplx, Real3> retract_to_core(const TangentPoint& t) {
  if (!is_valid(t)) throw invalid_point("retract_to_core: not a point of C^x x TS^2");
  return {t.lambda / std::abs(t.lambda), t.u};
}

}  // namespace mat2gen
