#pragma once

// Deformations over local Artin rings with monomial relations: Maurer–Cartan
// elements of the derivation DG-Lie algebra of a replacement R•, the gauge
// action, order-by-order solving, and realization as H⁰(R• ⊗ A, d + ξ).

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tatekit/derivations.hpp"
#include "tatekit/diagrams.hpp"
#include "tatekit/errors.hpp"

namespace tatekit {

// ---------------------------------------------------------------------------
// Artin rings K[t₁..t_m]/(monomials of degree N, extra monomials)

class ArtinRing {
public:
  using Exponents = std::vector<int>;
  static constexpr std::size_t zero = static_cast<std::size_t>(-1);

  ArtinRing(std::vector<std::string> params, int order, std::vector<Exponents> relations = {})
      : params_(std::move(params)), order_(order), relations_(std::move(relations)) {
    if (order < 1) throw InputError("Artin ring order must be >= 1");
    if (params_.empty()) throw InputError("Artin ring needs at least one parameter");
    for (const auto& r : relations_)
      if (r.size() != params_.size()) throw InputError("relation has the wrong number of exponents");
    Exponents e(params_.size(), 0);
    auto rec = [&](auto&& self, std::size_t i, int left) -> void {
      if (i == e.size()) {
        if (!killed(e)) basis_.push_back(e);
        return;
      }
      for (int k = 0; k <= left; ++k) {
        e[i] = k;
        self(self, i + 1, left - k);
      }
      e[i] = 0;
    };
    rec(rec, 0, order_ - 1);
    std::stable_sort(basis_.begin(), basis_.end(), [&](const Exponents& a, const Exponents& b) {
      if (total(a) != total(b)) return total(a) < total(b);
      return a > b;
    });
    for (std::size_t i = 0; i < basis_.size(); ++i) index_[basis_[i]] = i;
    table_.assign(basis_.size(), std::vector<std::size_t>(basis_.size(), zero));
    for (std::size_t i = 0; i < basis_.size(); ++i)
      for (std::size_t j = 0; j < basis_.size(); ++j) {
        Exponents p(params_.size());
        for (std::size_t q = 0; q < p.size(); ++q) p[q] = basis_[i][q] + basis_[j][q];
        auto it = index_.find(p);
        if (it != index_.end()) table_[i][j] = it->second;
      }
  }

  /// "t^2", "t^3", "t,s^2", "t,s^3/t^2,t*s": parameters, order, optional monomial relations.
  static ArtinRing parse(const std::string& spec) {
    auto caret = spec.find('^');
    if (caret == std::string::npos) throw InputError("Artin base '" + spec + "' needs the form params^N");
    auto slash = spec.find('/', caret);
    std::vector<std::string> params = split(spec.substr(0, caret), ',');
    std::string order_text = spec.substr(caret + 1, slash == std::string::npos ? std::string::npos : slash - caret - 1);
    int order = 0;
    try {
      std::size_t used = 0;
      order = std::stoi(order_text, &used);
      if (used != order_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InputError("Artin base '" + spec + "' has a malformed order");
    }
    std::vector<Exponents> rels;
    if (slash != std::string::npos)
      for (const auto& r : split(spec.substr(slash + 1), ',')) rels.push_back(parse_monomial(r, params));
    return ArtinRing(params, order, rels);
  }

  static Exponents parse_monomial(const std::string& text, const std::vector<std::string>& params) {
    Exponents e(params.size(), 0);
    for (const auto& factor : split(text, '*')) {
      auto c = factor.find('^');
      std::string name = factor.substr(0, c);
      auto it = std::find(params.begin(), params.end(), name);
      if (it == params.end()) throw InputError("non-monomial relation '" + text + "'");
      int k = 1;
      if (c != std::string::npos) {
        try {
          k = std::stoi(factor.substr(c + 1));
        } catch (const std::exception&) {
          throw InputError("non-monomial relation '" + text + "'");
        }
      }
      if (k < 1) throw InputError("non-monomial relation '" + text + "'");
      e[static_cast<std::size_t>(it - params.begin())] += k;
    }
    return e;
  }

  std::size_t dim() const { return basis_.size(); }
  int order() const { return order_; }
  const std::vector<std::string>& params() const { return params_; }
  const Exponents& exponents(std::size_t i) const { return basis_[i]; }
  int degree(std::size_t i) const { return total(basis_[i]); }
  /// Index of the product of two basis monomials, or `zero`.
  std::size_t mul(std::size_t i, std::size_t j) const { return table_[i][j]; }
  /// Basis of the maximal ideal (every non-unit basis monomial).
  std::vector<std::size_t> maximal_ideal() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < basis_.size(); ++i) out.push_back(i);
    return out;
  }
  int max_degree() const { return basis_.empty() ? 0 : degree(basis_.size() - 1); }

  std::string monomial(std::size_t i) const {
    std::string out;
    for (std::size_t q = 0; q < params_.size(); ++q) {
      int e = basis_[i][q];
      if (e == 0) continue;
      if (!out.empty()) out += "*";
      out += params_[q];
      if (e > 1) out += "^" + std::to_string(e);
    }
    return out.empty() ? "1" : out;
  }

  std::string str() const {
    std::string out = "K[";
    for (std::size_t q = 0; q < params_.size(); ++q) out += (q ? "," : "") + params_[q];
    out += "]/(degree " + std::to_string(order_);
    for (const auto& r : relations_) {
      out += ", ";
      std::string m;
      for (std::size_t q = 0; q < r.size(); ++q)
        if (r[q] > 0) m += (m.empty() ? "" : "*") + params_[q] + (r[q] > 1 ? "^" + std::to_string(r[q]) : "");
      out += m;
    }
    return out + ")";
  }

private:
  static int total(const Exponents& e) {
    int s = 0;
    for (int v : e) s += v;
    return s;
  }
  bool killed(const Exponents& e) const {
    for (const auto& r : relations_) {
      bool divides = true;
      for (std::size_t q = 0; q < e.size(); ++q) divides = divides && e[q] >= r[q];
      if (divides) return true;
    }
    return false;
  }
  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
      if (ch == ' ') continue;
      if (ch == sep) {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    out.push_back(cur);
    for (const auto& p : out)
      if (p.empty()) throw InputError("empty entry in '" + s + "'");
    return out;
  }

  std::vector<std::string> params_;
  int order_ = 1;
  std::vector<Exponents> relations_;
  std::vector<Exponents> basis_;
  std::map<Exponents, std::size_t> index_;
  std::vector<std::vector<std::size_t>> table_;
};

inline ArtinRing artin_ring(std::vector<std::string> params, int order, std::vector<std::string> relations = {}) {
  std::vector<ArtinRing::Exponents> rels;
  for (const auto& r : relations) rels.push_back(ArtinRing::parse_monomial(r, params));
  return ArtinRing(std::move(params), order, std::move(rels));
}

using ArtinPtr = std::shared_ptr<const ArtinRing>;

// ---------------------------------------------------------------------------
// The DG-Lie algebra L = Der(R•, R•) and its m_A-valued elements

/// Σ_m m ⊗ a_m with m running over the basis of A.
using LElem = std::map<std::size_t, DiagramDerivation>;

struct DGLie {
  DiagramDer der;  // endo
  std::vector<AlgebraPtr> algebras;

  static DGLie of(const AlgebraDiagram& r) { return {DiagramDer::endo(r), r.objects}; }
  static DGLie single(const AlgebraPtr& r) {
    return {DiagramDer::single(AlgebraTarget::endo(r)), {r}};
  }

  std::size_t size() const { return algebras.size(); }

  DiagramDerivation zero(int degree) const {
    DiagramDerivation out(size());
    for (auto& d : out) d.degree = degree;
    return out;
  }
  DiagramDerivation d(const DiagramDerivation& a) const { return diagram_der_differential(der, a); }
  DiagramDerivation bracket(const DiagramDerivation& a, const DiagramDerivation& b) const {
    DiagramDerivation out;
    for (std::size_t o = 0; o < size(); ++o) out.push_back(dgla_bracket(algebras[o], a[o], b[o]));
    return out;
  }
  /// Weights w such that a has a nonzero component of derivation weight w.
  std::set<int> weights(const DiagramDerivation& a) const {
    std::set<int> out;
    for (std::size_t o = 0; o < size(); ++o)
      for (const auto& [name, v] : a[o].values) {
        int gw = algebras[o]->symbol(name).weight;
        for (const auto& [m, c] : v.terms()) out.insert(m.weight() - gw);
      }
    return out;
  }
  DiagramDerivation weight_part(const DiagramDerivation& a, int w) const {
    DiagramDerivation out = zero(a.empty() ? 0 : a[0].degree);
    for (std::size_t o = 0; o < size(); ++o) {
      out[o].degree = a[o].degree;
      for (const auto& [name, v] : a[o].values) {
        int gw = algebras[o]->symbol(name).weight;
        Poly p;
        for (const auto& [m, c] : v.terms())
          if (m.weight() - gw == w) p.add_term(m, c);
        if (!p.is_zero()) out[o].values[name] = p;
      }
    }
    return out;
  }
  /// A solution u in the compatible slice (k, w) of d u = target, if any.
  std::optional<DiagramDerivation> solve_d(int k, int w, const DiagramDerivation& target) const {
    auto src = diagram_der_slice(der, k, w);
    auto dst = diagram_der_slice(der, k + 1, w);
    std::vector<Vector> cols;
    for (const auto& v : src.basis) cols.push_back(dst.coords(der, d(src.element(der, v))));
    auto sol = solve(SparseMatrix::from_columns(dst.product_dim, cols), dst.coords(der, target));
    if (!sol) return std::nullopt;
    Vector u(src.product_dim);
    for (std::size_t j = 0; j < sol->size(); ++j)
      for (std::size_t r = 0; r < u.size(); ++r) u[r] += (*sol)[j] * src.basis[j][r];
    return src.element(der, u);
  }
};

inline bool is_zero(const DiagramDerivation& a) {
  return std::all_of(a.begin(), a.end(), [](const Derivation& d) { return is_zero(d); });
}
inline DiagramDerivation operator+(DiagramDerivation a, const DiagramDerivation& b) {
  if (a.empty()) return b;
  for (std::size_t o = 0; o < a.size() && o < b.size(); ++o) a[o] += b[o];
  return a;
}
inline DiagramDerivation operator*(const Rational& q, DiagramDerivation a) {
  for (auto& d : a) d = q * d;
  return a;
}

inline bool is_zero(const LElem& a) {
  return std::all_of(a.begin(), a.end(), [](const auto& kv) { return is_zero(kv.second); });
}
inline LElem& operator+=(LElem& a, const LElem& b) {
  for (const auto& [m, v] : b) {
    auto it = a.find(m);
    if (it == a.end())
      a.emplace(m, v);
    else
      it->second = it->second + v;
  }
  return a;
}
inline LElem operator+(LElem a, const LElem& b) { return a += b; }
inline LElem operator*(const Rational& q, LElem a) {
  for (auto& [m, v] : a) v = q * v;
  return a;
}
inline LElem operator-(const LElem& a, const LElem& b) { return a + Rational(-1) * b; }
inline bool equal(const LElem& a, const LElem& b) { return is_zero(a - b); }

inline LElem l_bracket(const DGLie& l, const ArtinRing& A, const LElem& a, const LElem& b) {
  LElem out;
  for (const auto& [m, x] : a)
    for (const auto& [n, y] : b) {
      std::size_t p = A.mul(m, n);
      if (p == ArtinRing::zero) continue;
      out += LElem{{p, l.bracket(x, y)}};
    }
  return out;
}
inline LElem l_d(const DGLie& l, const LElem& a) {
  LElem out;
  for (const auto& [m, x] : a) out.emplace(m, l.d(x));
  return out;
}

// ---------------------------------------------------------------------------
// Maurer–Cartan elements

struct MCElement {
  ArtinPtr base;
  LElem xi;
};

/// dξ + ½[ξ, ξ]
inline LElem mc_defect(const DGLie& l, const MCElement& x) {
  return l_d(l, x.xi) + frac(1, 2) * l_bracket(l, *x.base, x.xi, x.xi);
}
inline bool is_maurer_cartan(const DGLie& l, const MCElement& x) {
  for (const auto& [m, v] : x.xi)
    if (m == 0 && !is_zero(v)) return false;
  return is_zero(mc_defect(l, x));
}

/// e^a * x = x + Σ_{n≥0} ad_a^n([a,x] - da)/(n+1)!
inline MCElement gauge_action(const DGLie& l, const LElem& a, const MCElement& x) {
  const auto& A = *x.base;
  LElem term = l_bracket(l, A, a, x.xi) - l_d(l, a);
  LElem out = x.xi;
  Rational factorial = 1;
  for (int n = 0; !is_zero(term); ++n) {
    factorial *= n + 1;
    out += (Rational(1) / factorial) * term;
    term = l_bracket(l, A, a, term);
    if (n > A.order() + 1) throw IntegrityError("gauge series did not terminate");
  }
  MCElement y{x.base, {}};
  for (auto& [m, v] : out)
    if (!is_zero(v)) y.xi.emplace(m, v);
  return y;
}

// ---------------------------------------------------------------------------
// Order-by-order solving

struct Obstruction {
  std::size_t direction = 0;  // index into MCSolveResult::directions
  std::string monomial;       // coefficient of A where the extension fails
  int weight = 0;
  DiagramDerivation cocycle;  // degree-2 cocycle that is not a coboundary
};

struct FirstOrderDirection {
  std::size_t parameter = 0;  // basis index of a degree-1 monomial of A
  int weight = 0;
  DiagramDerivation cocycle;  // canonical H¹ representative
};

struct MCSolveResult {
  std::vector<FirstOrderDirection> directions;
  std::vector<MCElement> representatives;  // trivial element first, then one per unobstructed direction
  std::vector<Obstruction> obstructions;
  std::map<int, std::size_t> h1;  // dim H¹ per weight
  std::map<int, std::size_t> h2;

  std::size_t orbit_dimension() const { return directions.size(); }
};

/// Extends a first-order MC element order by order along the m_A-adic
/// filtration. Returns the obstruction when some order fails.
inline std::optional<Obstruction> extend_mc(const DGLie& l, MCElement& x) {
  const auto& A = *x.base;
  for (int order = 2; order <= A.max_degree(); ++order) {
    MCElement partial = x;
    LElem defect = mc_defect(l, partial);
    for (std::size_t m = 0; m < A.dim(); ++m) {
      if (A.degree(m) != order) continue;
      auto it = defect.find(m);
      if (it == defect.end() || is_zero(it->second)) continue;
      DiagramDerivation correction = l.zero(1);
      for (int w : l.weights(it->second)) {
        DiagramDerivation ob = l.weight_part(it->second, w);
        if (!is_zero(l.d(ob))) throw IntegrityError("obstruction is not a cocycle");
        auto u = l.solve_d(1, w, Rational(-1) * ob);
        if (!u) return Obstruction{0, A.monomial(m), w, ob};
        correction = correction + *u;
      }
      x.xi[m] = x.xi.count(m) ? x.xi[m] + correction : correction;
    }
  }
  if (!is_zero(mc_defect(l, x))) throw IntegrityError("order-by-order solution fails the MC identity");
  return std::nullopt;
}

inline MCSolveResult mc_solve(const DGLie& l, const ArtinPtr& base, const std::vector<int>& weights) {
  MCSolveResult out;
  out.representatives.push_back({base, {}});
  for (int w : weights) {
    auto h1 = diagram_cohomology(l.der, 1, w);
    out.h1[w] = h1.dim;
    out.h2[w] = diagram_cohomology(l.der, 2, w).dim;
    for (std::size_t m = 0; m < base->dim(); ++m) {
      if (base->degree(m) != 1) continue;
      for (const auto& rep : h1.representatives) out.directions.push_back({m, w, rep});
    }
  }
  for (std::size_t i = 0; i < out.directions.size(); ++i) {
    const auto& dir = out.directions[i];
    MCElement x{base, {{dir.parameter, dir.cocycle}}};
    auto ob = extend_mc(l, x);
    if (ob) {
      ob->direction = i;
      out.obstructions.push_back(*ob);
    } else {
      out.representatives.push_back(std::move(x));
    }
  }
  return out;
}

/// (dim H¹, dim H²) per weight.
inline std::pair<std::map<int, std::size_t>, std::map<int, std::size_t>> first_order_space(
    const DiagramDer& l, const std::vector<int>& weights) {
  std::map<int, std::size_t> h1, h2;
  for (int w : weights) {
    h1[w] = diagram_cohomology(l, 1, w).dim;
    h2[w] = diagram_cohomology(l, 2, w).dim;
  }
  return {h1, h2};
}

// ---------------------------------------------------------------------------
// Gauge equivalence

/// Elements of R_o ⊗ A as Σ_n n ⊗ p_n.
using AlgElem = std::map<std::size_t, Poly>;

inline AlgElem apply_l(const DGLie& l, const ArtinRing& A, std::size_t o, const LElem& a, const AlgElem& p) {
  AlgebraTarget t = AlgebraTarget::endo(l.algebras[o]);
  AlgElem out;
  for (const auto& [m, der] : a)
    for (const auto& [n, q] : p) {
      std::size_t k = A.mul(m, n);
      if (k == ArtinRing::zero) continue;
      out[k] += evaluate(t, der[o], q);
    }
  return out;
}

inline AlgElem exp_l(const DGLie& l, const ArtinRing& A, std::size_t o, const LElem& a, const AlgElem& p) {
  AlgElem out = p, term = p;
  Rational factorial = 1;
  for (int n = 1; n <= A.max_degree(); ++n) {
    term = apply_l(l, A, o, a, term);
    factorial *= n;
    for (const auto& [k, q] : term) {
      Poly add = q;
      add *= Rational(1) / factorial;
      out[k] += add;
    }
  }
  return out;
}

inline AlgElem twisted_d(const DGLie& l, const ArtinRing& A, std::size_t o, const LElem& xi, const AlgElem& p) {
  AlgElem out = apply_l(l, A, o, xi, p);
  for (const auto& [n, q] : p) out[n] += l.algebras[o]->d(q);
  return out;
}

inline bool alg_equal(const AlgElem& a, const AlgElem& b) {
  std::set<std::size_t> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  for (std::size_t k : keys) {
    Poly x = a.count(k) ? a.at(k) : Poly{};
    Poly y = b.count(k) ? b.at(k) : Poly{};
    if (!(x == y)) return false;
  }
  return true;
}

/// e^a ∘ (d + x) = (d + y) ∘ e^a on every generator of every object.
inline bool exponential_intertwines(const DGLie& l, const LElem& a, const MCElement& x, const MCElement& y) {
  const auto& A = *x.base;
  for (std::size_t o = 0; o < l.size(); ++o)
    for (const auto& g : l.algebras[o]->generators()) {
      AlgElem p{{0, Poly::of(g)}};
      AlgElem lhs = exp_l(l, A, o, a, twisted_d(l, A, o, x.xi, p));
      AlgElem rhs = twisted_d(l, A, o, y.xi, exp_l(l, A, o, a, p));
      if (!alg_equal(lhs, rhs)) return false;
    }
  return true;
}

/// A gauge witness a ∈ L⁰ ⊗ m_A with e^a * x = y, found order by order
/// using canonical solutions of d b = (e^a * x - y) at each order.
inline std::optional<LElem> gauge_equivalent(const DGLie& l, const MCElement& x, const MCElement& y) {
  const auto& A = *x.base;
  LElem a;
  for (int order = 1; order <= A.max_degree(); ++order) {
    LElem diff = gauge_action(l, a, x).xi - y.xi;
    for (std::size_t m = 0; m < A.dim(); ++m) {
      if (A.degree(m) != order) continue;
      auto it = diff.find(m);
      if (it == diff.end() || is_zero(it->second)) continue;
      DiagramDerivation b = l.zero(0);
      for (int w : l.weights(it->second)) {
        auto u = l.solve_d(0, w, l.weight_part(it->second, w));
        if (!u) return std::nullopt;
        b = b + *u;
      }
      a[m] = a.count(m) ? a[m] + b : b;
    }
  }
  if (!equal(gauge_action(l, a, x).xi, y.xi)) return std::nullopt;
  if (!exponential_intertwines(l, a, x, y)) throw IntegrityError("gauge witness does not exponentiate to an isomorphism");
  return a;
}

// ---------------------------------------------------------------------------
// Realization

/// (d + ξ) from degree -1 to degree 0 of R_o ⊗ A, restricted to weight ≤ w.
struct H0Slice {
  std::vector<std::pair<Monomial, std::size_t>> basis;  // degree-0 monomial ⊗ A-basis element
  std::vector<Vector> image;
  std::size_t dim = 0;          // dim H⁰ in weights ≤ w
  std::size_t reduced_dim = 0;  // dim H⁰ ⊗_A K in weights ≤ w
};

inline H0Slice h0_slice(const DGLie& l, std::size_t o, const MCElement& xi, int w) {
  const auto& A = *xi.base;
  const auto& r = *l.algebras[o];
  H0Slice out;
  std::map<std::pair<Monomial, std::size_t>, std::size_t> index;
  for (int wt = 0; wt <= w; ++wt)
    for (const auto& m : slice_basis(r.generators(), 0, wt))
      for (std::size_t n = 0; n < A.dim(); ++n) {
        index[{m, n}] = out.basis.size();
        out.basis.emplace_back(m, n);
      }
  for (int wt = 0; wt <= w; ++wt)
    for (const auto& m : slice_basis(r.generators(), -1, wt))
      for (std::size_t n = 0; n < A.dim(); ++n) {
        AlgElem img = twisted_d(l, A, o, xi.xi, AlgElem{{n, Poly::term(m, 1)}});
        Vector v(out.basis.size());
        for (const auto& [k, q] : img)
          for (const auto& [mono, c] : q.terms()) {
            auto it = index.find({mono, k});
            if (it == index.end())
              throw InputError("deformation raises weight beyond " + std::to_string(w) +
                               "; realization needs non-positive derivation weights");
            v[it->second] += c;
          }
        out.image.push_back(std::move(v));
      }
  std::size_t rk = span_rank(out.image, out.basis.size());
  out.dim = out.basis.size() - rk;
  std::vector<Vector> with_ideal = out.image;
  for (std::size_t i = 0; i < out.basis.size(); ++i)
    if (out.basis[i].second != 0) {
      Vector e(out.basis.size());
      e[i] = 1;
      with_ideal.push_back(std::move(e));
    }
  out.reduced_dim = out.basis.size() - span_rank(with_ideal, out.basis.size());
  return out;
}

struct ObjectRealization {
  std::vector<std::size_t> h0_dims;       // per weight bound 0..W (cumulative)
  std::vector<std::size_t> expected_dims; // dim A · dim S_{≤w}
  std::vector<std::size_t> reduced_dims;
  std::vector<std::size_t> target_dims;   // dim S_{≤w}
  bool flat = true;
  bool reduces = true;
  std::vector<std::string> relations;     // (d+ξ)(g) for degree -1 generators g
};

struct DeformedDiagram {
  ArtinPtr base;
  std::vector<ObjectRealization> objects;
  bool anchors_iso = true;
};

inline std::string alg_str(const ArtinRing& A, const AlgElem& p) {
  std::string out;
  for (const auto& [n, q] : p) {
    if (q.is_zero()) continue;
    std::string term = n == 0 ? q.str() : (q == Poly(1) ? A.monomial(n) : "(" + q.str() + ")*" + A.monomial(n));
    out += out.empty() ? term : " + " + term;
  }
  return out.empty() ? "0" : out;
}

/// H⁰(R• ⊗ A, d + ξ) slice-wise up to weight W. `targets` are the algebras S_a
/// the replacement resolves; `anchors` lists arrows that must become isomorphisms.
inline DeformedDiagram realize(const DGLie& l, const std::vector<AlgebraPtr>& targets, const MCElement& xi, int max_weight,
                               const std::vector<std::size_t>& anchors = {}) {
  const auto& A = *xi.base;
  for (std::size_t o = 0; o < l.size(); ++o)
    for (const auto& g : l.algebras[o]->generators()) {
      AlgElem p{{0, Poly::of(g)}};
      AlgElem dd = twisted_d(l, A, o, xi.xi, twisted_d(l, A, o, xi.xi, p));
      if (!alg_equal(dd, {})) throw InputError("(d + ξ)² ≠ 0 on generator '" + g.name + "'");
    }
  DeformedDiagram out;
  out.base = xi.base;
  std::vector<std::vector<H0Slice>> slices(l.size());
  for (std::size_t o = 0; o < l.size(); ++o) {
    ObjectRealization obj;
    std::size_t s_dim = 0;
    for (int w = 0; w <= max_weight; ++w) {
      auto h = h0_slice(l, o, xi, w);
      s_dim += targets[o]->slice(0, w)->dim();
      obj.h0_dims.push_back(h.dim);
      obj.expected_dims.push_back(s_dim * A.dim());
      obj.reduced_dims.push_back(h.reduced_dim);
      obj.target_dims.push_back(s_dim);
      if (h.dim != s_dim * A.dim()) obj.flat = false;
      if (h.reduced_dim != s_dim) obj.reduces = false;
      slices[o].push_back(std::move(h));
    }
    for (const auto& g : l.algebras[o]->generators())
      if (g.degree == -1) obj.relations.push_back(alg_str(A, twisted_d(l, A, o, xi.xi, {{0, Poly::of(g)}})));
    if (!obj.flat)
      throw IntegrityError("deformed algebra at object " + std::to_string(o) + " is not flat over " + A.str());
    out.objects.push_back(std::move(obj));
  }
  // anchors: R(u) ⊗ A induces isomorphisms on every H⁰ slice
  const auto& c = *l.der.index;
  for (std::size_t u : anchors) {
    std::size_t a = c.morphisms()[u].source, b = c.morphisms()[u].target;
    const auto& f = l.der.source_arrows[u];
    for (int w = 0; w <= max_weight; ++w) {
      const auto& sa = slices[a][static_cast<std::size_t>(w)];
      const auto& sb = slices[b][static_cast<std::size_t>(w)];
      std::map<std::pair<Monomial, std::size_t>, std::size_t> index;
      for (std::size_t i = 0; i < sb.basis.size(); ++i) index[sb.basis[i]] = i;
      std::vector<Vector> span = sb.image;
      for (const auto& [m, n] : sa.basis) {
        Vector v(sb.basis.size());
        const Poly image = f.apply(Poly::term(m, 1));
        for (const auto& [mono, coef] : image.terms()) v[index.at({mono, n})] += coef;
        span.push_back(std::move(v));
      }
      if (sa.dim != sb.dim || span_rank(span, sb.basis.size()) != sb.basis.size()) out.anchors_iso = false;
    }
  }
  return out;
}

} // namespace tatekit
