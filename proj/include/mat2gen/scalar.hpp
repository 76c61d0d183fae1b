#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <concepts>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mat2gen {

using Cplx = std::complex<double>;

enum class Backend { exact, floating };

inline std::string_view to_string(Backend b) {
  return b == Backend::exact ? "gaussian-rational" : "float64";
}

/// Parse an integer or "p/q" rational in lowest terms or not. Throws
/// std::invalid_argument on malformed text or a zero denominator.
inline mpq_class parse_rational(std::string_view text) {
  auto is_int = [](std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char ch : s)
      if (ch < '0' || ch > '9') return false;
    return true;
  };
  std::string_view num = text, den = "1";
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  if (!is_int(num) || !is_int(den))
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  auto strip_plus = [](std::string_view s) {
    return std::string(s.front() == '+' ? s.substr(1) : s);
  };
  mpz_class n(strip_plus(num), 10), d(strip_plus(den), 10);
  if (d == 0)
    throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  mpq_class q(n, d);
  q.canonicalize();
  return q;
}

/// Exact square root of a nonnegative rational, if it is a rational square.
inline std::optional<mpq_class> rational_sqrt(const mpq_class& q) {
  if (sgn(q) < 0) return std::nullopt;
  const mpz_class& n = q.get_num();
  const mpz_class& d = q.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t()))
    return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  mpq_class r(rn, rd);
  r.canonicalize();
  return r;
}

/// Complex number with arbitrary-precision rational real and imaginary parts.
class GaussRational {
 public:
  GaussRational() : re_(0), im_(0) {}
  GaussRational(long re) : re_(re), im_(0) {}  // NOLINT(google-explicit-constructor)
  GaussRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }
  GaussRational(long re_num, long re_den, long im_num, long im_den)
      : GaussRational(mpq_class(re_num, re_den), mpq_class(im_num, im_den)) {}

  static GaussRational i() { return {mpq_class(0), mpq_class(1)}; }

  const mpq_class& real() const { return re_; }
  const mpq_class& imag() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  GaussRational conj() const { return {re_, -im_}; }
  mpq_class norm() const { return re_ * re_ + im_ * im_; }
  Cplx to_complex() const { return {re_.get_d(), im_.get_d()}; }

  GaussRational operator-() const { return {-re_, -im_}; }

  GaussRational& operator+=(const GaussRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussRational& operator-=(const GaussRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussRational& operator*=(const GaussRational& o) {
    mpq_class re = re_ * o.re_ - im_ * o.im_;
    mpq_class im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
  }
  GaussRational& operator/=(const GaussRational& o) {
    if (o.is_zero()) throw std::domain_error("GaussRational division by zero");
    mpq_class n = o.norm();
    mpq_class re = (re_ * o.re_ + im_ * o.im_) / n;
    mpq_class im = (im_ * o.re_ - re_ * o.im_) / n;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
  }

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  /// Lexicographic on (re, im); only used to order canonical representatives.
  friend bool lex_less(const GaussRational& a, const GaussRational& b) {
    if (a.re_ != b.re_) return a.re_ < b.re_;
    return a.im_ < b.im_;
  }

  friend std::ostream& operator<<(std::ostream& os, const GaussRational& z) {
    return os << '(' << z.re_.get_str() << ',' << z.im_.get_str() << ')';
  }

 private:
  mpq_class re_;
  mpq_class im_;
};

/// Square root in Q(i) on the principal branch (Re > 0, or Re = 0 and Im >= 0),
/// when one exists.
inline std::optional<GaussRational> exact_sqrt(const GaussRational& w) {
  if (w.is_zero()) return GaussRational{};
  auto modulus = rational_sqrt(w.norm());
  if (!modulus) return std::nullopt;
  mpq_class x2 = (w.real() + *modulus) / 2;
  auto x = rational_sqrt(x2);
  if (!x) return std::nullopt;
  if (sgn(*x) == 0) {
    // w is a nonpositive real
    auto y = rational_sqrt(-w.real());
    if (!y) return std::nullopt;
    return GaussRational(mpq_class(0), *y);
  }
  mpq_class y = w.imag() / (2 * *x);
  return GaussRational(*x, y);
}

/// Principal square root with the branch pinned on the negative real axis:
/// Re > 0, or Re = 0 and Im >= 0 (a signed-zero imaginary part does not flip it).
inline Cplx principal_sqrt(Cplx w) {
  Cplx r = std::sqrt(w);
  if (r.real() == 0.0 && r.imag() < 0.0) r = -r;
  return r;
}

// Backend traits. Only two scalar types exist; the traits keep the generic
// algorithms free of if-else chains on the concrete type.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Cplx> {
  static constexpr bool exact = false;
  static constexpr Backend backend = Backend::floating;
  using real_type = double;
  static Cplx from_real(double x) { return {x, 0.0}; }
  static double magnitude(const Cplx& z) { return std::abs(z); }
  static Cplx to_complex(const Cplx& z) { return z; }
  static Cplx conj(const Cplx& z) { return std::conj(z); }
};

template <>
struct scalar_traits<GaussRational> {
  static constexpr bool exact = true;
  static constexpr Backend backend = Backend::exact;
  using real_type = mpq_class;
  static GaussRational from_real(const mpq_class& x) { return {x, mpq_class(0)}; }
  static double magnitude(const GaussRational& z) { return std::abs(z.to_complex()); }
  static Cplx to_complex(const GaussRational& z) { return z.to_complex(); }
  static GaussRational conj(const GaussRational& z) { return z.conj(); }
};

template <class S>
concept Scalar = requires { scalar_traits<S>::exact; };

template <Scalar S>
using real_t = typename scalar_traits<S>::real_type;

template <Scalar S>
inline constexpr bool is_exact_v = scalar_traits<S>::exact;

template <Scalar S>
double magnitude(const S& z) {
  return scalar_traits<S>::magnitude(z);
}

template <Scalar S>
bool is_exact_zero(const S& z) {
  if constexpr (is_exact_v<S>)
    return z.is_zero();
  else
    return z == Cplx{};
}

}  // namespace mat2gen
