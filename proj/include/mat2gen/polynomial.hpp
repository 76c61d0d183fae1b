#pragma once

// Multivariate polynomials over Q(i), enough to expand the coordinate-change
// identities symbolically by instantiating the generic maps with them.

#include <map>
#include <ostream>
#include <vector>

#include "mat2gen/b2_model.hpp"
#include "mat2gen/errors.hpp"
#include "mat2gen/scalar.hpp"

namespace mat2gen {

class Polynomial {
 public:
  using Monomial = std::vector<int>;  // exponent per variable

  Polynomial() = default;
  Polynomial(long c) : Polynomial(GaussRational(c)) {}  // NOLINT(google-explicit-constructor)
  Polynomial(const GaussRational& c) {                  // NOLINT(google-explicit-constructor)
    if (!c.is_zero()) terms_.emplace(Monomial{}, c);
  }

  static Polynomial variable(int index) {
    Polynomial p;
    Monomial m(static_cast<std::size_t>(index) + 1, 0);
    m.back() = 1;
    p.terms_.emplace(std::move(m), GaussRational(1));
    return p;
  }

  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }
  GaussRational constant() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? GaussRational{} : it->second;
  }
  std::size_t term_count() const { return terms_.size(); }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial operator-() const {
    Polynomial p;
    for (const auto& [m, c] : terms_) p.terms_.emplace(m, -c);
    return p;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial p;
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m(std::max(ma.size(), mb.size()), 0);
        for (std::size_t k = 0; k < ma.size(); ++k) m[k] += ma[k];
        for (std::size_t k = 0; k < mb.size(); ++k) m[k] += mb[k];
        p.add_term(m, ca * cb);
      }
    }
    return p;
  }
  /// Division by a nonzero constant only.
  friend Polynomial operator/(const Polynomial& a, const Polynomial& b) {
    if (!b.is_constant() || b.terms_.empty()) throw error("polynomial division by a non-constant or zero");
    return a * Polynomial(GaussRational(1) / b.constant());
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  friend std::ostream& operator<<(std::ostream& os, const Polynomial& p) {
    if (p.terms_.empty()) return os << '0';
    bool first = true;
    for (const auto& [m, c] : p.terms_) {
      if (!first) os << " + ";
      first = false;
      os << c;
      for (std::size_t k = 0; k < m.size(); ++k)
        if (m[k] > 0) os << "*v" << k << '^' << m[k];
    }
    return os;
  }

 private:
  void add_term(Monomial m, const GaussRational& c) {
    while (!m.empty() && m.back() == 0) m.pop_back();
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    } else if (c.is_zero()) {
      terms_.erase(it);
    }
  }

  std::map<Monomial, GaussRational> terms_;
};

template <>
inline Polynomial imaginary_unit<Polynomial>() {
  return Polynomial(GaussRational::i());
}

}  // namespace mat2gen
