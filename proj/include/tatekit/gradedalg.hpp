#pragma once

// Graded-commutative polynomials.
//
// Generators carry a cohomological degree <= 0 and a positive weight. Odd
// generators anticommute and square to zero; monomials are kept sorted in
// the global symbol order (degree descending, then name), so every monomial
// has a single normal form and products pick up the Koszul sign of the
// sorting permutation restricted to odd factors.

#include <algorithm>
#include <compare>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tatekit/errors.hpp"
#include "tatekit/exactlinalg.hpp"

namespace tatekit {

struct Symbol {
  std::string name;
  int degree = 0;
  int weight = 1;

  bool odd() const { return degree % 2 != 0; }

  bool operator==(const Symbol&) const = default;
};

/// Global symbol order: degree descending, then name.
inline bool symbol_less(const Symbol& a, const Symbol& b) {
  if (a.degree != b.degree) return a.degree > b.degree;
  return a.name < b.name;
}

inline std::strong_ordering symbol_cmp(const Symbol& a, const Symbol& b) {
  if (a.degree != b.degree) return b.degree <=> a.degree;
  if (auto c = a.name <=> b.name; c != 0) return c;
  return a.weight <=> b.weight;
}

/// Throws unless the symbol is usable as an algebra generator.
inline void validate_symbol(const Symbol& s) {
  if (s.name.empty()) throw InputError("generator with empty name");
  if (s.degree > 0)
    throw InputError("generator '" + s.name + "' has positive degree " + std::to_string(s.degree));
  // Weight zero is admitted only for odd generators: they square to zero, so
  // every (degree, weight) slice stays finite.
  if (s.weight < 0 || (s.weight == 0 && !s.odd()))
    throw InputError("generator '" + s.name + "' has non-positive weight " +
                     std::to_string(s.weight));
}

class Monomial {
public:
  using Factor = std::pair<Symbol, int>;

  Monomial() = default;

  static Monomial of(const Symbol& s, int exponent = 1) {
    if (s.odd() && exponent > 1) throw InputError("odd generator '" + s.name + "' squared");
    Monomial m;
    if (exponent > 0) m.factors_.emplace_back(s, exponent);
    return m;
  }

  /// Trusts that `factors` is already sorted and valid.
  static Monomial from_sorted(std::vector<Factor> factors) {
    Monomial m;
    m.factors_ = std::move(factors);
    return m;
  }

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [s, e] : factors_) d += s.degree * e;
    return d;
  }
  int weight() const {
    int w = 0;
    for (const auto& [s, e] : factors_) w += s.weight * e;
    return w;
  }
  int exponent_of(const std::string& name) const {
    for (const auto& [s, e] : factors_)
      if (s.name == name) return e;
    return 0;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.factors_ == b.factors_; }
  friend bool operator<(const Monomial& a, const Monomial& b) {
    return std::lexicographical_compare(
        a.factors_.begin(), a.factors_.end(), b.factors_.begin(), b.factors_.end(),
        [](const Factor& x, const Factor& y) {
          auto c = symbol_cmp(x.first, y.first);
          if (c != 0) return c < 0;
          return x.second < y.second;
        });
  }

  std::string str() const {
    if (factors_.empty()) return "1";
    std::string out;
    for (const auto& [s, e] : factors_) {
      if (!out.empty()) out += "*";
      out += s.name;
      if (e != 1) out += "^" + std::to_string(e);
    }
    return out;
  }

  /// Product a*b together with its Koszul sign; sign 0 means the product vanishes.
  /// Throws InputError when the two sides disagree on a symbol's grading.
  static std::pair<int, Monomial> multiply(const Monomial& a, const Monomial& b) {
    Monomial out;
    int sign = 1;
    std::size_t odd_left = 0;  // odd factors of `a` not yet emitted
    for (const auto& [s, e] : a.factors_)
      if (s.odd()) ++odd_left;
    auto i = a.factors_.begin();
    auto j = b.factors_.begin();
    while (i != a.factors_.end() || j != b.factors_.end()) {
      if (j == b.factors_.end() || (i != a.factors_.end() && symbol_less(i->first, j->first))) {
        if (i->first.odd()) --odd_left;
        out.factors_.push_back(*i++);
      } else if (i == a.factors_.end() || symbol_less(j->first, i->first)) {
        if (j->first.odd() && odd_left % 2 == 1) sign = -sign;
        out.factors_.push_back(*j++);
      } else {
        if (!(i->first == j->first))
          throw InputError("generator '" + i->first.name + "' used with two different gradings");
        if (i->first.odd()) return {0, Monomial{}};
        out.factors_.emplace_back(i->first, i->second + j->second);
        ++i;
        ++j;
      }
    }
    return {sign, std::move(out)};
  }

private:
  std::vector<Factor> factors_;
};

class Poly {
public:
  using Terms = std::map<Monomial, Rational>;

  Poly() = default;
  Poly(const Rational& c) {  // NOLINT(google-explicit-constructor)
    if (sgn(c) != 0) terms_.emplace(Monomial{}, c);
  }
  Poly(int c) : Poly(Rational(c)) {}  // NOLINT(google-explicit-constructor)

  static Poly of(const Symbol& s, int exponent = 1) {
    if (s.odd() && exponent > 1) return Poly{};
    return term(Monomial::of(s, exponent), 1);
  }
  static Poly term(const Monomial& m, const Rational& c) {
    Poly p;
    if (sgn(c) != 0) p.terms_.emplace(m, c);
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (sgn(c) == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (sgn(it->second) == 0) terms_.erase(it);
    }
  }

  Poly& operator+=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Poly& operator*=(const Rational& q) {
    if (sgn(q) == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= q;
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) { return a *= Rational(-1); }
  friend Poly operator*(Poly a, const Rational& q) { return a *= q; }
  friend Poly operator*(const Rational& q, Poly a) { return a *= q; }

  /// Graded-commutative product (no check of generator sets beyond gradings).
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        auto [sign, m] = Monomial::multiply(ma, mb);
        if (sign == 0) continue;
        out.add_term(m, sign > 0 ? Rational(ca * cb) : Rational(-(ca * cb)));
      }
    return out;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

  /// All symbols occurring in the polynomial.
  std::vector<Symbol> symbols() const {
    std::vector<Symbol> out;
    for (const auto& [m, c] : terms_)
      for (const auto& [s, e] : m.factors())
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    std::sort(out.begin(), out.end(), symbol_less);
    return out;
  }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    const Monomial& first = terms_.begin()->first;
    int d = first.degree(), w = first.weight();
    for (const auto& [m, c] : terms_)
      if (m.degree() != d || m.weight() != w) return false;
    return true;
  }
  /// Degree and weight of a nonzero homogeneous polynomial.
  int degree() const { return terms_.empty() ? 0 : terms_.begin()->first.degree(); }
  int weight() const { return terms_.empty() ? 0 : terms_.begin()->first.weight(); }

  /// Splits into (degree, weight)-homogeneous components.
  std::map<std::pair<int, int>, Poly> components() const {
    std::map<std::pair<int, int>, Poly> out;
    for (const auto& [m, c] : terms_) out[{m.degree(), m.weight()}].add_term(m, c);
    return out;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      Rational a = abs(c);
      bool neg = sgn(c) < 0;
      if (first)
        out += neg ? "-" : "";
      else
        out += neg ? " - " : " + ";
      first = false;
      if (m.is_one())
        out += to_string(a);
      else if (a == 1)
        out += m.str();
      else
        out += to_string(a) + "*" + m.str();
    }
    return out;
  }

private:
  Terms terms_;
};

inline std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.str(); }

/// Checked product: rejects polynomials that disagree on a generator's grading.
inline Poly multiply(const Poly& p, const Poly& q) {
  std::map<std::string, Symbol> seen;
  for (const auto* side : {&p, &q})
    for (const auto& s : side->symbols()) {
      auto [it, inserted] = seen.emplace(s.name, s);
      if (!inserted && !(it->second == s))
        throw InputError("multiply: generator '" + s.name + "' has mismatched gradings");
    }
  return p * q;
}

inline Poly power(const Poly& p, int e) {
  Poly out(1);
  for (int i = 0; i < e; ++i) out = out * p;
  return out;
}

/// Every monomial in `gens` of exactly the given degree and weight, sorted.
inline std::vector<Monomial> slice_basis(std::vector<Symbol> gens, int degree, int weight) {
  std::vector<Monomial> out;
  if (degree > 0 || weight < 0) return out;
  std::sort(gens.begin(), gens.end(), symbol_less);
  for (const auto& g : gens) validate_symbol(g);
  std::vector<int> exps(gens.size(), 0);
  // Depth-first over generators; degrees are <= 0 so the running degree only decreases.
  auto rec = [&](auto&& self, std::size_t i, int deg_left, int wt_left) -> void {
    if (i == gens.size()) {
      if (deg_left == 0 && wt_left == 0) {
        Monomial m;
        for (std::size_t k = 0; k < gens.size(); ++k)
          if (exps[k] > 0) m = Monomial::multiply(m, Monomial::of(gens[k], exps[k])).second;
        out.push_back(std::move(m));
      }
      return;
    }
    const Symbol& g = gens[i];
    int max_e;
    if (g.odd())
      max_e = 1;
    else if (g.weight > 0)
      max_e = wt_left / g.weight;
    else
      max_e = 0;
    for (int e = 0; e <= max_e; ++e) {
      int d = deg_left - g.degree * e;
      int w = wt_left - g.weight * e;
      if (w < 0) break;
      if (d > 0) break;  // overshoot: further factors only lower the degree
      exps[i] = e;
      self(self, i + 1, d, w);
    }
    exps[i] = 0;
  };
  rec(rec, 0, degree, weight);
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace tatekit
