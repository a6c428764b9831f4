#pragma once

// Derivations R -> M along a DG morphism f: R -> S, where M is either S itself
// or a free DG module over S.
//
// A derivation is stored by its values on the generators of R. The slice
// Der^k_w has one basis element per pair (generator g, basis element of the
// target slice of degree |g| + k and weight wt(g) + w).

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tatekit/dgalg.hpp"
#include "tatekit/errors.hpp"
#include "tatekit/factorization.hpp"

namespace tatekit {

template <class E>
struct BasicDerivation {
  int degree = 0;
  std::map<std::string, E> values;

  const E* value(const std::string& name) const {
    auto it = values.find(name);
    return it == values.end() ? nullptr : &it->second;
  }
};

using Derivation = BasicDerivation<Poly>;
using ModuleDerivation = BasicDerivation<ModElem>;

inline bool operator==(const Derivation& a, const Derivation& b) {
  auto nonzero = [](const Derivation& d) {
    std::map<std::string, Poly> out;
    for (const auto& [k, v] : d.values)
      if (!v.is_zero()) out.emplace(k, v);
    return out;
  };
  return nonzero(a) == nonzero(b) && (a.degree == b.degree || nonzero(a).empty());
}

inline Derivation& operator+=(Derivation& a, const Derivation& b) {
  for (const auto& [k, v] : b.values) a.values[k] += v;
  return a;
}
inline Derivation operator+(Derivation a, const Derivation& b) { return a += b; }
inline Derivation operator*(const Rational& q, Derivation a) {
  for (auto& [k, v] : a.values) v *= q;
  return a;
}
inline Derivation operator-(const Derivation& a, const Derivation& b) { return a + Rational(-1) * b; }

inline bool is_zero(const Derivation& a) {
  for (const auto& [k, v] : a.values)
    if (!v.is_zero()) return false;
  return true;
}

/// S as a module over itself.
struct AlgebraTarget {
  using Elem = Poly;
  DGMorphism f;

  explicit AlgebraTarget(DGMorphism map) : f(std::move(map)) {}
  /// Endomorphism derivations of R.
  static AlgebraTarget endo(const AlgebraPtr& r) { return AlgebraTarget(DGMorphism::identity(r)); }

  const DGAlgebra& source() const { return *f.source(); }
  const DGAlgebra& algebra() const { return *f.target(); }
  Elem zero() const { return {}; }
  Elem act(const Poly& a, const Elem& m) const { return algebra().normalize(a * m); }
  Elem d(const Elem& m) const { return algebra().d(m); }
  Elem normalize(const Elem& m) const { return algebra().normalize(m); }
  std::size_t dim(int degree, int weight) const { return algebra().slice(degree, weight)->dim(); }
  Vector coords(int degree, int weight, const Elem& m) const { return algebra().slice(degree, weight)->coords(m); }
  Elem element(int degree, int weight, const Vector& v) const {
    return algebra().slice(degree, weight)->element(v);
  }
  /// Component of m in the given bidegree.
  Elem component(const Elem& m, int degree, int weight) const {
    Poly out;
    for (const auto& [mono, c] : m.terms())
      if (mono.degree() == degree && mono.weight() == weight) out.add_term(mono, c);
    return out;
  }
};

/// A free DG module M over S.
struct ModuleTarget {
  using Elem = ModElem;
  DGMorphism f;
  DGModule module;

  ModuleTarget(DGMorphism map, DGModule m) : f(std::move(map)), module(std::move(m)) {
    if (module.base() != f.target() && module.base()->generators() != f.target()->generators())
      throw InputError("module is not over the target of the map");
  }

  const DGAlgebra& source() const { return *f.source(); }
  Elem zero() const { return module.zero(); }
  Elem act(const Poly& a, const Elem& m) const { return module.act(a, m); }
  Elem d(const Elem& m) const { return module.d(m); }
  Elem normalize(const Elem& m) const { return module.normalize(m); }
  std::size_t dim(int degree, int weight) const { return module.slice(degree, weight).dim; }
  Vector coords(int degree, int weight, const Elem& m) const {
    return module.coords(module.slice(degree, weight), m);
  }
  Elem element(int degree, int weight, const Vector& v) const {
    return module.element(module.slice(degree, weight), v);
  }
  Elem component(const Elem& m, int degree, int weight) const {
    Elem out = zero();
    for (std::size_t j = 0; j < m.c.size(); ++j) {
      const auto& g = module.generators()[j];
      for (const auto& [mono, c] : m.c[j].terms())
        if (mono.degree() + g.degree == degree && mono.weight() + g.weight == weight) out.c[j].add_term(mono, c);
    }
    return out;
  }
};

/// α(p) for an f-derivation α.
template <class T>
typename T::Elem evaluate(const T& target, const BasicDerivation<typename T::Elem>& alpha, const Poly& p) {
  using Elem = typename T::Elem;
  Elem out = leibniz<Elem>(
      p, alpha.degree, target.zero(), [&](const Symbol& s) { return alpha.value(s.name); },
      [&](const Monomial& m) { return target.f.apply_monomial(m); },
      [&](const Poly& a, const Elem& v) { return target.act(a, v); });
  return target.normalize(out);
}

/// (dα)(x) = d(α(x)) - (-1)^k α(dx)
template <class T>
BasicDerivation<typename T::Elem> der_differential(const T& target, const BasicDerivation<typename T::Elem>& alpha) {
  BasicDerivation<typename T::Elem> out;
  out.degree = alpha.degree + 1;
  const Rational sign(alpha.degree % 2 == 0 ? 1 : -1);
  for (const auto& g : target.source().generators()) {
    typename T::Elem v = target.zero();
    if (const auto* a = alpha.value(g.name)) v += target.d(*a);
    auto rest = evaluate(target, alpha, target.source().d_of(g.name));
    rest *= -sign;
    v += rest;
    v = target.normalize(v);
    if (!v.is_zero()) out.values[g.name] = std::move(v);
  }
  return out;
}

/// The finite slice Der^k_w(R, M).
template <class T>
struct DerSlice {
  int degree = 0;
  int weight = 0;
  struct Block {
    Symbol generator;
    std::size_t offset = 0;
    std::size_t dim = 0;
  };
  std::vector<Block> blocks;
  std::size_t dim = 0;

  Vector coords(const T& target, const BasicDerivation<typename T::Elem>& alpha) const {
    Vector v(dim);
    for (const auto& b : blocks) {
      const auto* val = alpha.value(b.generator.name);
      if (val == nullptr || b.dim == 0) continue;
      auto part = target.component(*val, b.generator.degree + degree, b.generator.weight + weight);
      auto c = target.coords(b.generator.degree + degree, b.generator.weight + weight, part);
      std::copy(c.begin(), c.end(), v.begin() + static_cast<std::ptrdiff_t>(b.offset));
    }
    return v;
  }

  BasicDerivation<typename T::Elem> element(const T& target, const Vector& v) const {
    BasicDerivation<typename T::Elem> out;
    out.degree = degree;
    for (const auto& b : blocks) {
      if (b.dim == 0) continue;
      auto first = v.begin() + static_cast<std::ptrdiff_t>(b.offset);
      Vector part(first, first + static_cast<std::ptrdiff_t>(b.dim));
      if (is_zero(part)) continue;
      out.values[b.generator.name] = target.element(b.generator.degree + degree, b.generator.weight + weight, part);
    }
    return out;
  }
};

template <class T>
DerSlice<T> der_slice(const T& target, int k, int w) {
  DerSlice<T> s;
  s.degree = k;
  s.weight = w;
  for (const auto& g : target.source().generators()) {
    std::size_t n = target.dim(g.degree + k, g.weight + w);
    s.blocks.push_back({g, s.dim, n});
    s.dim += n;
  }
  return s;
}

template <class T>
std::vector<BasicDerivation<typename T::Elem>> der_slice_basis(const T& target, int k, int w) {
  auto s = der_slice(target, k, w);
  std::vector<BasicDerivation<typename T::Elem>> out;
  for (std::size_t i = 0; i < s.dim; ++i) {
    Vector v(s.dim);
    v[i] = 1;
    out.push_back(s.element(target, v));
  }
  return out;
}

/// Matrix of d: Der^k_w -> Der^{k+1}_w.
template <class T>
SparseMatrix der_differential_matrix(const T& target, int k, int w) {
  auto src = der_slice(target, k, w);
  auto dst = der_slice(target, k + 1, w);
  SparseMatrix m(dst.dim, src.dim);
  for (std::size_t i = 0; i < src.dim; ++i) {
    Vector v(src.dim);
    v[i] = 1;
    m.set_column(i, dst.coords(target, der_differential(target, src.element(target, v))));
  }
  return m;
}

/// [α, β] = α∘β - (-1)^{|α||β|} β∘α on generators of R.
inline Derivation dgla_bracket(const AlgebraPtr& r, const Derivation& alpha, const Derivation& beta) {
  AlgebraTarget t = AlgebraTarget::endo(r);
  for (const auto* d : {&alpha, &beta})
    for (const auto& [name, v] : d->values)
      if (!r->has(name)) throw InputError("bracket: derivation value on unknown generator '" + name + "'");
  Derivation out;
  out.degree = alpha.degree + beta.degree;
  const Rational sign(koszul(alpha.degree, beta.degree));
  for (const auto& g : r->generators()) {
    Poly v;
    if (const auto* b = beta.value(g.name)) v += evaluate(t, alpha, *b);
    if (const auto* a = alpha.value(g.name)) {
      Poly ba = evaluate(t, beta, *a);
      ba *= -sign;
      v += ba;
    }
    if (!v.is_zero()) out.values[g.name] = std::move(v);
  }
  return out;
}

/// The internal differential d_R as a degree-1 derivation of R.
inline Derivation internal_differential(const DGAlgebra& r) {
  Derivation d;
  d.degree = 1;
  d.values = r.differential();
  return d;
}

struct TangentSlice {
  int weight = 0;
  std::size_t dim = 0;
  std::vector<Derivation> representatives;
};

/// H^i(Der(R, S)) per derivation weight, for a resolution R -> S.
inline std::vector<TangentSlice> tangent_cohomology(const FactorizationResult& fact, int i,
                                                    const std::vector<int>& weights) {
  if (fact.certificate.degree_depth < i + 1)
    throw TruncationError("T^" + std::to_string(i) + " needs resolution depth >= " + std::to_string(i + 1) +
                          ", got " + std::to_string(fact.certificate.degree_depth));
  AlgebraTarget t(fact.projection);
  std::vector<TangentSlice> out;
  for (int w : weights) {
    auto mid = der_slice(t, i, w);
    auto h = cohomology_of(der_differential_matrix(t, i - 1, w), der_differential_matrix(t, i, w), mid.dim);
    TangentSlice ts;
    ts.weight = w;
    ts.dim = h.dim;
    for (const auto& v : h.representatives) ts.representatives.push_back(mid.element(t, v));
    out.push_back(std::move(ts));
  }
  return out;
}

/// Derivation weights in [lo, hi].
inline std::vector<int> weight_range(int lo, int hi) {
  std::vector<int> out;
  for (int w = lo; w <= hi; ++w) out.push_back(w);
  return out;
}

} // namespace tatekit
