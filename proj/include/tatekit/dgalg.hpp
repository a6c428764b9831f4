#pragma once

// DG algebras, morphisms and modules.
//
// One DGAlgebra type covers both shapes used downstream: a semifree algebra
// (generators with a differential, no relations) and a presented algebra
// (degree-0 generators modulo weight-homogeneous relations). Mixed data is
// allowed too: relations always have degree 0, so the ideal they generate is
// stable under d and the quotient is again a DG algebra.
//
// Everything is computed one (degree, weight) slice at a time. A slice is
// the span of the monomials of that bidegree modulo the ideal slice, and
// its canonical basis is the set of monomials that are not pivots of the
// ideal's reduced echelon form.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tatekit/errors.hpp"
#include "tatekit/exactlinalg.hpp"
#include "tatekit/gradedalg.hpp"

namespace tatekit {

inline int parity(int n) { return ((n % 2) + 2) % 2; }
inline int koszul(int a, int b) { return parity(a) * parity(b) ? -1 : 1; }

// Graded Leibniz evaluation.
//
// For a monomial P·x^e·Q (prefix, factor, suffix in symbol order) an
// f-derivation α of degree k contributes
//   (-1)^{k|P| + |α(x)||Q|} · e · f(P x^{e-1} Q) · α(x),
// with the module acting from the left. `value(sym)` returns α(x) or null
// for zero, `image(mono)` is f on a monomial, `act(a, m)` is a·m.
template <class Elem, class ValueFn, class ImageFn, class ActFn>
Elem leibniz(const Poly& p, int k, Elem zero, ValueFn&& value, ImageFn&& image, ActFn&& act) {
  Elem out = std::move(zero);
  for (const auto& [mono, coeff] : p.terms()) {
    const auto& fs = mono.factors();
    int prefix_deg = 0;
    int total = mono.degree();
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const auto& [sym, e] = fs[i];
      int suffix_deg = total - prefix_deg - sym.degree * e;
      const Elem* v = value(sym);
      if (v != nullptr) {
        std::vector<Monomial::Factor> rest(fs.begin(), fs.end());
        if (e == 1)
          rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        else
          rest[i].second = e - 1;
        int sign = koszul(k, prefix_deg) * koszul(sym.degree + k, suffix_deg);
        Poly a = image(Monomial::from_sorted(std::move(rest)));
        a *= Rational(coeff * e * sign);
        if (!a.is_zero()) out += act(a, *v);
      }
      prefix_deg += sym.degree * e;
    }
  }
  return out;
}

class DGAlgebra;

/// One (degree, weight) slice of a DGAlgebra.
struct AlgebraSlice {
  int degree = 0;
  int weight = 0;
  std::vector<Monomial> monomials;
  std::map<Monomial, std::size_t> index;
  EchelonBasis ideal;
  std::vector<std::size_t> basis;          // non-pivot monomial columns
  std::vector<std::ptrdiff_t> coordinate;  // column -> basis position, -1 on pivots

  std::size_t dim() const { return basis.size(); }

  SparseRow row_of(const Poly& p) const {
    SparseRow row;
    for (const auto& [m, c] : p.terms()) {
      auto it = index.find(m);
      if (it == index.end())
        throw IntegrityError("monomial " + m.str() + " outside slice (" + std::to_string(degree) +
                             ", " + std::to_string(weight) + ")");
      row.emplace_back(it->second, c);
    }
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return row;
  }

  Vector coords(const Poly& p) const {
    Vector v(dim());
    for (const auto& [col, q] : ideal.reduce(row_of(p))) v[static_cast<std::size_t>(coordinate[col])] = q;
    return v;
  }

  Poly element(const Vector& c) const {
    Poly p;
    for (std::size_t i = 0; i < c.size(); ++i) p.add_term(monomials[basis[i]], c[i]);
    return p;
  }

  Poly basis_element(std::size_t i) const { return Poly::term(monomials[basis[i]], 1); }

  Poly normal_form(const Poly& p) const { return element(coords(p)); }
};

struct CohomologyResult {
  std::size_t dim = 0;
  std::vector<Poly> representatives;
  std::vector<Vector> cycles;      // basis of Z in slice coordinates
  std::vector<Vector> boundaries;  // spanning set of B
  std::vector<Vector> rep_coords;
};

class DGAlgebra {
public:
  DGAlgebra() : cache_(std::make_shared<Cache>()) {}

  DGAlgebra(std::vector<Symbol> gens, std::map<std::string, Poly> diff = {},
            std::vector<Poly> relations = {})
      : gens_(std::move(gens)), cache_(std::make_shared<Cache>()) {
    std::sort(gens_.begin(), gens_.end(), symbol_less);
    for (const auto& g : gens_) {
      validate_symbol(g);
      if (!by_name_.emplace(g.name, g).second)
        throw InputError("duplicate generator name '" + g.name + "'");
    }
    for (auto& [name, value] : diff) {
      auto it = by_name_.find(name);
      if (it == by_name_.end()) throw InputError("differential given for unknown generator '" + name + "'");
      check_known(value, "differential of '" + name + "'");
      const Symbol& g = it->second;
      for (const auto& [m, c] : value.terms())
        if (m.degree() != g.degree + 1 || m.weight() != g.weight)
          throw InputError("differential of '" + name + "' is not of degree " +
                           std::to_string(g.degree + 1) + " and weight " + std::to_string(g.weight));
      if (!value.is_zero()) diff_.emplace(name, value);
    }
    for (auto& r : relations) {
      check_known(r, "relation " + r.str());
      if (r.is_zero()) throw InputError("zero relation");
      auto comps = r.components();
      if (comps.size() != 1) {
        int lo = comps.begin()->first.second, hi = lo;
        for (const auto& [dw, q] : comps) lo = std::min(lo, dw.second), hi = std::max(hi, dw.second);
        throw InputError("relation " + r.str() + " is not weight-homogeneous (weights " +
                         std::to_string(lo) + ".." + std::to_string(hi) + ")");
      }
      if (r.degree() != 0) throw InputError("relation " + r.str() + " has nonzero degree");
      relations_.push_back(std::move(r));
    }
  }

  const std::vector<Symbol>& generators() const { return gens_; }
  const std::map<std::string, Poly>& differential() const { return diff_; }
  const std::vector<Poly>& relations() const { return relations_; }

  bool has(const std::string& name) const { return by_name_.count(name) != 0; }
  const Symbol& symbol(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw InputError("unknown generator '" + name + "'");
    return it->second;
  }
  Poly var(const std::string& name) const { return Poly::of(symbol(name)); }

  bool is_semifree() const { return relations_.empty(); }
  bool is_presented() const {
    return std::all_of(gens_.begin(), gens_.end(), [](const Symbol& g) { return g.degree == 0; });
  }
  int min_degree() const {
    int d = 0;
    for (const auto& g : gens_) d = std::min(d, g.degree);
    return d;
  }

  const Poly& d_of(const std::string& name) const {
    static const Poly zero;
    auto it = diff_.find(name);
    return it == diff_.end() ? zero : it->second;
  }

  /// d extended by Leibniz, reduced to normal form.
  Poly d(const Poly& p) const {
    if (diff_.empty()) return Poly{};
    Poly out = leibniz<Poly>(
        p, 1, Poly{},
        [this](const Symbol& s) -> const Poly* {
          auto it = diff_.find(s.name);
          return it == diff_.end() ? nullptr : &it->second;
        },
        [](const Monomial& m) { return Poly::term(m, 1); },
        [](const Poly& a, const Poly& v) { return a * v; });
    return normalize(out);
  }

  /// Canonical representative modulo the relations (identity when there are none).
  Poly normalize(const Poly& p) const {
    if (relations_.empty()) return p;
    Poly out;
    for (const auto& [dw, comp] : p.components()) out += slice(dw.first, dw.second)->normal_form(comp);
    return out;
  }

  std::shared_ptr<const AlgebraSlice> slice(int degree, int weight) const {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto& entry = cache_->slices[{degree, weight}];
    if (!entry) entry = build_slice(degree, weight);
    return entry;
  }

  /// Matrix of d from slice (degree, weight) to (degree + 1, weight).
  SparseMatrix d_matrix(int degree, int weight) const {
    auto src = slice(degree, weight);
    auto dst = slice(degree + 1, weight);
    SparseMatrix m(dst->dim(), src->dim());
    if (degree + 1 > 0) return m;
    for (std::size_t i = 0; i < src->dim(); ++i) m.set_column(i, dst->coords(d(src->basis_element(i))));
    return m;
  }

  CohomologyResult cohomology(int degree, int weight) const {
    auto s = slice(degree, weight);
    auto z = rank_kernel(d_matrix(degree, weight)).kernel_basis;
    std::vector<Vector> b;
    for (const auto& col : d_matrix(degree - 1, weight).column_list())
      if (!col.empty()) b.push_back(to_dense(col, s->dim()));
    auto sq = subquotient(z, b, s->dim());
    CohomologyResult out;
    out.dim = sq.dim;
    for (const auto& v : sq.representatives) out.representatives.push_back(s->element(v));
    out.rep_coords = std::move(sq.representatives);
    out.cycles = std::move(z);
    out.boundaries = std::move(b);
    return out;
  }

  /// New algebra with extra generators (and their differentials) adjoined.
  DGAlgebra extended(const std::vector<Symbol>& extra, const std::map<std::string, Poly>& extra_diff) const {
    std::vector<Symbol> g = gens_;
    g.insert(g.end(), extra.begin(), extra.end());
    std::map<std::string, Poly> d = diff_;
    for (const auto& [k, v] : extra_diff) d[k] = v;
    return DGAlgebra(std::move(g), std::move(d), relations_);
  }

  std::string str() const {
    std::string out = "K[";
    for (std::size_t i = 0; i < gens_.size(); ++i) out += (i ? "," : "") + gens_[i].name;
    out += "]";
    if (!relations_.empty()) {
      out += "/(";
      for (std::size_t i = 0; i < relations_.size(); ++i) out += (i ? ", " : "") + relations_[i].str();
      out += ")";
    }
    return out;
  }

private:
  struct Cache {
    std::mutex mutex;
    std::map<std::pair<int, int>, std::shared_ptr<const AlgebraSlice>> slices;
  };

  void check_known(const Poly& p, const std::string& what) const {
    for (const auto& s : p.symbols()) {
      auto it = by_name_.find(s.name);
      if (it == by_name_.end() || !(it->second == s))
        throw InputError(what + " uses unknown generator '" + s.name + "'");
    }
  }

  std::shared_ptr<const AlgebraSlice> build_slice(int degree, int weight) const {
    auto s = std::make_shared<AlgebraSlice>();
    s->degree = degree;
    s->weight = weight;
    s->monomials = slice_basis(gens_, degree, weight);
    for (std::size_t i = 0; i < s->monomials.size(); ++i) s->index.emplace(s->monomials[i], i);
    s->ideal = EchelonBasis(s->monomials.size());
    for (const auto& r : relations_) {
      for (const auto& m : slice_basis(gens_, degree, weight - r.weight())) {
        Poly prod = Poly::term(m, 1) * r;
        s->ideal.insert(s->row_of(prod));
      }
    }
    s->coordinate.assign(s->monomials.size(), -1);
    for (std::size_t c = 0; c < s->monomials.size(); ++c)
      if (!s->ideal.is_pivot(c)) {
        s->coordinate[c] = static_cast<std::ptrdiff_t>(s->basis.size());
        s->basis.push_back(c);
      }
    return s;
  }

  std::vector<Symbol> gens_;
  std::map<std::string, Symbol> by_name_;
  std::map<std::string, Poly> diff_;
  std::vector<Poly> relations_;
  std::shared_ptr<Cache> cache_;
};

using AlgebraPtr = std::shared_ptr<const DGAlgebra>;

inline AlgebraPtr make_algebra(std::vector<Symbol> gens, std::map<std::string, Poly> diff = {},
                               std::vector<Poly> relations = {}) {
  return std::make_shared<const DGAlgebra>(std::move(gens), std::move(diff), std::move(relations));
}

/// The degree-k derivation of `alg` extending `values` (into alg itself).
inline std::function<Poly(const Poly&)> extend_leibniz(const DGAlgebra& alg,
                                                       std::map<std::string, Poly> values, int k) {
  std::optional<int> w;
  for (const auto& [name, v] : values) {
    const Symbol& g = alg.symbol(name);
    for (const auto& [m, c] : v.terms()) {
      if (m.degree() != g.degree + k)
        throw InputError("value on '" + name + "' has degree " + std::to_string(m.degree()) +
                         ", expected " + std::to_string(g.degree + k));
      int mw = m.weight() - g.weight;
      if (w && *w != mw) throw InputError("values have inconsistent derivation weights");
      w = mw;
    }
  }
  auto vals = std::make_shared<std::map<std::string, Poly>>(std::move(values));
  const DGAlgebra* a = &alg;
  return [vals, a, k](const Poly& p) {
    Poly out = leibniz<Poly>(
        p, k, Poly{},
        [&](const Symbol& s) -> const Poly* {
          auto it = vals->find(s.name);
          return it == vals->end() || it->second.is_zero() ? nullptr : &it->second;
        },
        [](const Monomial& m) { return Poly::term(m, 1); },
        [](const Poly& x, const Poly& v) { return x * v; });
    return a->normalize(out);
  };
}

inline bool check_d_squared(const DGAlgebra& alg) {
  for (const auto& g : alg.generators())
    if (!alg.d(alg.d_of(g.name)).is_zero()) return false;
  return true;
}

inline Poly normal_form(const DGAlgebra& s, const Poly& p) { return s.normalize(p); }

inline CohomologyResult cohomology_slice(const DGAlgebra& c, int degree, int weight) {
  return c.cohomology(degree, weight);
}

/// A morphism of DG algebras given by the images of the source generators.
class DGMorphism {
public:
  DGMorphism() = default;
  DGMorphism(AlgebraPtr source, AlgebraPtr target, std::map<std::string, Poly> images)
      : source_(std::move(source)), target_(std::move(target)) {
    for (auto& [name, img] : images) {
      const Symbol& g = source_->symbol(name);
      for (const auto& s : img.symbols())
        if (!target_->has(s.name) || !(target_->symbol(s.name) == s))
          throw InputError("image of '" + name + "' uses unknown target generator '" + s.name + "'");
      Poly n = target_->normalize(img);
      for (const auto& [m, c] : n.terms())
        if (m.degree() != g.degree || m.weight() != g.weight)
          throw InputError("image of '" + name + "' does not preserve degree and weight");
      if (!n.is_zero()) images_.emplace(name, std::move(n));
    }
  }

  static DGMorphism identity(const AlgebraPtr& a) {
    std::map<std::string, Poly> im;
    for (const auto& g : a->generators()) im[g.name] = Poly::of(g);
    return DGMorphism(a, a, std::move(im));
  }

  /// Generator-name inclusion of `a` into `b`.
  static DGMorphism inclusion(const AlgebraPtr& a, const AlgebraPtr& b) {
    std::map<std::string, Poly> im;
    for (const auto& g : a->generators()) im[g.name] = Poly::of(b->symbol(g.name));
    return DGMorphism(a, b, std::move(im));
  }

  const AlgebraPtr& source() const { return source_; }
  const AlgebraPtr& target() const { return target_; }
  const std::map<std::string, Poly>& images() const { return images_; }

  const Poly& image(const std::string& name) const {
    static const Poly zero;
    auto it = images_.find(name);
    return it == images_.end() ? zero : it->second;
  }

  /// Image of a monomial, not yet normalized.
  Poly apply_monomial(const Monomial& m) const {
    Poly out(1);
    for (const auto& [s, e] : m.factors()) {
      const Poly& im = image(s.name);
      if (im.is_zero()) return Poly{};
      for (int i = 0; i < e; ++i) out = out * im;
    }
    return out;
  }

  Poly apply(const Poly& p) const {
    Poly out;
    for (const auto& [m, c] : p.terms()) {
      Poly t = apply_monomial(m);
      t *= c;
      out += t;
    }
    return target_->normalize(out);
  }

  /// Matrix of the map on slice (degree, weight).
  SparseMatrix matrix(int degree, int weight) const {
    auto src = source_->slice(degree, weight);
    auto dst = target_->slice(degree, weight);
    SparseMatrix m(dst->dim(), src->dim());
    for (std::size_t i = 0; i < src->dim(); ++i) m.set_column(i, dst->coords(apply(src->basis_element(i))));
    return m;
  }

  /// Generator on which the map fails to commute with d, if any.
  std::optional<std::string> chain_map_failure() const {
    for (const auto& g : source_->generators())
      if (!(apply(source_->d_of(g.name)) == target_->d(image(g.name)))) return g.name;
    return std::nullopt;
  }
  bool is_chain_map() const { return !chain_map_failure(); }

  /// Source relation whose image is nonzero, if any.
  std::optional<std::string> relation_failure() const {
    for (const auto& r : source_->relations())
      if (!apply(r).is_zero()) return r.str();
    return std::nullopt;
  }

  /// Throws InputError unless the map respects relations and differentials.
  const DGMorphism& validated() const {
    if (auto r = relation_failure()) throw InputError("morphism does not kill the relation '" + *r + "'");
    if (auto g = chain_map_failure())
      throw InputError("morphism does not commute with d on generator '" + *g + "'");
    return *this;
  }

  friend bool operator==(const DGMorphism& a, const DGMorphism& b) {
    return a.source_->generators() == b.source_->generators() && a.images_ == b.images_;
  }

private:
  AlgebraPtr source_;
  AlgebraPtr target_;
  std::map<std::string, Poly> images_;
};

/// g ∘ f
inline DGMorphism compose(const DGMorphism& g, const DGMorphism& f) {
  std::map<std::string, Poly> im;
  for (const auto& s : f.source()->generators()) im[s.name] = g.apply(f.image(s.name));
  return DGMorphism(f.source(), g.target(), std::move(im));
}

/// Whether the induced map on H^degree in the given weight is an isomorphism.
inline bool is_quasi_iso_on(const DGMorphism& f, int degree, int weight) {
  auto hs = f.source()->cohomology(degree, weight);
  auto ht = f.target()->cohomology(degree, weight);
  if (hs.dim != ht.dim) return false;
  if (hs.dim == 0) return true;
  auto dst = f.target()->slice(degree, weight);
  std::vector<Vector> images;
  for (const auto& r : hs.representatives) images.push_back(dst->coords(f.apply(r)));
  auto extra = complement_indices(ht.boundaries, images, dst->dim());
  return extra.size() == hs.dim;
}

inline bool is_surjective_on(const DGMorphism& f, int degree, int weight) {
  return rank(f.matrix(degree, weight)) == f.target()->slice(degree, weight)->dim();
}

/// Preimage under f of an element of the target slice; nullopt if none.
inline std::optional<Poly> preimage(const DGMorphism& f, const Poly& b, int degree, int weight) {
  auto src = f.source()->slice(degree, weight);
  auto sol = solve(f.matrix(degree, weight), f.target()->slice(degree, weight)->coords(b));
  if (!sol) return std::nullopt;
  return src->element(*sol);
}

// ---------------------------------------------------------------------------
// Modules

struct ModuleGenerator {
  std::string name;
  int degree = 0;
  int weight = 0;
  bool operator==(const ModuleGenerator&) const = default;
};

/// Element Σ c[j]·e_j of a free module; coefficients act from the left.
struct ModElem {
  std::vector<Poly> c;

  ModElem() = default;
  explicit ModElem(std::size_t n) : c(n) {}

  bool is_zero() const {
    return std::all_of(c.begin(), c.end(), [](const Poly& p) { return p.is_zero(); });
  }
  ModElem& operator+=(const ModElem& o) {
    if (c.size() < o.c.size()) c.resize(o.c.size());
    for (std::size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
    return *this;
  }
  ModElem& operator-=(const ModElem& o) {
    if (c.size() < o.c.size()) c.resize(o.c.size());
    for (std::size_t i = 0; i < o.c.size(); ++i) c[i] -= o.c[i];
    return *this;
  }
  ModElem& operator*=(const Rational& q) {
    for (auto& p : c) p *= q;
    return *this;
  }
  friend ModElem operator+(ModElem a, const ModElem& b) { return a += b; }
  friend ModElem operator-(ModElem a, const ModElem& b) { return a -= b; }
  friend bool operator==(const ModElem& a, const ModElem& b) {
    std::size_t n = std::max(a.c.size(), b.c.size());
    for (std::size_t i = 0; i < n; ++i) {
      const Poly& x = i < a.c.size() ? a.c[i] : Poly{};
      const Poly& y = i < b.c.size() ? b.c[i] : Poly{};
      if (!(x == y)) return false;
    }
    return true;
  }
};

/// Free DG module over a DG algebra on finitely many generators.
class DGModule {
public:
  DGModule() = default;
  DGModule(AlgebraPtr base, std::vector<ModuleGenerator> gens, std::vector<ModElem> diff)
      : base_(std::move(base)), gens_(std::move(gens)), diff_(std::move(diff)) {
    diff_.resize(gens_.size(), ModElem(gens_.size()));
    for (auto& v : diff_) v.c.resize(gens_.size());
    for (std::size_t j = 0; j < gens_.size(); ++j) {
      diff_[j] = normalize(diff_[j]);
      for (std::size_t i = 0; i < gens_.size(); ++i)
        for (const auto& [m, q] : diff_[j].c[i].terms())
          if (m.degree() + gens_[i].degree != gens_[j].degree + 1 ||
              m.weight() + gens_[i].weight != gens_[j].weight)
            throw InputError("module differential of '" + gens_[j].name + "' is not homogeneous");
    }
  }

  /// The algebra as a module over itself, on the single generator "1".
  static DGModule free_rank_one(const AlgebraPtr& base) {
    return DGModule(base, {ModuleGenerator{"1", 0, 0}}, {ModElem(1)});
  }

  const AlgebraPtr& base() const { return base_; }
  const std::vector<ModuleGenerator>& generators() const { return gens_; }
  const std::vector<ModElem>& differential() const { return diff_; }
  std::size_t rank() const { return gens_.size(); }

  ModElem zero() const { return ModElem(gens_.size()); }
  ModElem unit(std::size_t j, const Poly& coeff = Poly(1)) const {
    ModElem m = zero();
    m.c[j] = coeff;
    return m;
  }

  ModElem normalize(ModElem m) const {
    m.c.resize(gens_.size());
    for (auto& p : m.c) p = base_->normalize(p);
    return m;
  }

  /// a·m
  ModElem act(const Poly& a, const ModElem& m) const {
    ModElem out = zero();
    for (std::size_t j = 0; j < m.c.size(); ++j) out.c[j] = base_->normalize(a * m.c[j]);
    return out;
  }

  /// d(Σ p_j e_j) = Σ d(p_j) e_j + (-1)^{|p_j|} p_j d(e_j)
  ModElem d(const ModElem& m) const {
    ModElem out = zero();
    for (std::size_t j = 0; j < m.c.size(); ++j) {
      if (m.c[j].is_zero()) continue;
      out.c[j] += base_->d(m.c[j]);
      for (const auto& [dw, comp] : m.c[j].components()) {
        Poly sgn_comp = comp;
        sgn_comp *= Rational(koszul(dw.first, 1));
        out += act(sgn_comp, diff_[j]);
      }
    }
    return normalize(out);
  }

  bool check_d_squared() const {
    for (std::size_t j = 0; j < gens_.size(); ++j)
      if (!d(diff_[j]).is_zero()) return false;
    return true;
  }

  struct Slice {
    int degree = 0;
    int weight = 0;
    std::vector<std::shared_ptr<const AlgebraSlice>> blocks;
    std::vector<std::size_t> offsets;
    std::size_t dim = 0;
  };

  Slice slice(int degree, int weight) const {
    Slice s;
    s.degree = degree;
    s.weight = weight;
    for (const auto& g : gens_) {
      s.offsets.push_back(s.dim);
      auto b = base_->slice(degree - g.degree, weight - g.weight);
      s.dim += b->dim();
      s.blocks.push_back(std::move(b));
    }
    return s;
  }

  Vector coords(const Slice& s, const ModElem& m) const {
    Vector v(s.dim);
    for (std::size_t j = 0; j < gens_.size(); ++j) {
      if (j >= m.c.size() || m.c[j].is_zero()) continue;
      auto c = s.blocks[j]->coords(m.c[j]);
      std::copy(c.begin(), c.end(), v.begin() + static_cast<std::ptrdiff_t>(s.offsets[j]));
    }
    return v;
  }

  ModElem element(const Slice& s, const Vector& v) const {
    ModElem m = zero();
    for (std::size_t j = 0; j < gens_.size(); ++j) {
      auto first = v.begin() + static_cast<std::ptrdiff_t>(s.offsets[j]);
      m.c[j] = s.blocks[j]->element(Vector(first, first + static_cast<std::ptrdiff_t>(s.blocks[j]->dim())));
    }
    return m;
  }

  ModElem basis_element(const Slice& s, std::size_t i) const {
    Vector v(s.dim);
    v[i] = 1;
    return element(s, v);
  }

  SparseMatrix d_matrix(int degree, int weight) const {
    auto src = slice(degree, weight);
    auto dst = slice(degree + 1, weight);
    SparseMatrix m(dst.dim, src.dim);
    for (std::size_t i = 0; i < src.dim; ++i) m.set_column(i, coords(dst, d(basis_element(src, i))));
    return m;
  }

  struct Cohomology {
    std::size_t dim = 0;
    std::vector<ModElem> representatives;
  };

  Cohomology cohomology(int degree, int weight) const {
    auto s = slice(degree, weight);
    auto z = rank_kernel(d_matrix(degree, weight)).kernel_basis;
    std::vector<Vector> b;
    for (const auto& col : d_matrix(degree - 1, weight).column_list())
      if (!col.empty()) b.push_back(to_dense(col, s.dim));
    auto sq = subquotient(z, b, s.dim);
    Cohomology out;
    out.dim = sq.dim;
    for (const auto& v : sq.representatives) out.representatives.push_back(element(s, v));
    return out;
  }

private:
  AlgebraPtr base_;
  std::vector<ModuleGenerator> gens_;
  std::vector<ModElem> diff_;
};

inline DGModule::Cohomology cohomology_slice(const DGModule& m, int degree, int weight) {
  return m.cohomology(degree, weight);
}

/// s^n applied to an element written in the generators of M, landing in the
/// generators of the shifted copy: s^n(p e) = (-1)^{n|p|} p s^n e.
inline ModElem shift_element(const ModElem& m, int n) {
  ModElem out(m.c.size());
  for (std::size_t j = 0; j < m.c.size(); ++j)
    for (const auto& [dw, comp] : m.c[j].components()) {
      Poly t = comp;
      t *= Rational(koszul(n, dw.first));
      out.c[j] += t;
    }
  return out;
}

inline std::string shift_name(const std::string& name, int n) {
  return "s" + std::to_string(n) + "(" + name + ")";
}

/// M[-n]: generators s^n e of degree |e| + n, with d(s^n x) = (-1)^n s^n d(x).
inline DGModule shift(const DGModule& m, int n) {
  std::vector<ModuleGenerator> gens;
  std::vector<ModElem> diff;
  for (std::size_t j = 0; j < m.rank(); ++j) {
    const auto& g = m.generators()[j];
    gens.push_back({shift_name(g.name, n), g.degree + n, g.weight});
    ModElem v = shift_element(m.differential()[j], n);
    v *= Rational(n % 2 == 0 ? 1 : -1);
    diff.push_back(std::move(v));
  }
  return DGModule(m.base(), std::move(gens), std::move(diff));
}

/// Cone of the identity: M ⊕ M[1], d(x + s⁻¹y) = dx + y - s⁻¹dy.
/// Generators: those of M (indices 0..r-1), then s⁻¹ of each (indices r..2r-1).
inline DGModule cone(const DGModule& m) {
  const std::size_t r = m.rank();
  std::vector<ModuleGenerator> gens;
  std::vector<ModElem> diff;
  for (const auto& g : m.generators()) gens.push_back(g);
  for (const auto& g : m.generators()) gens.push_back({shift_name(g.name, -1), g.degree - 1, g.weight});
  for (std::size_t j = 0; j < r; ++j) {
    ModElem v(2 * r);
    for (std::size_t i = 0; i < r; ++i) v.c[i] = m.differential()[j].c[i];
    diff.push_back(std::move(v));
  }
  for (std::size_t j = 0; j < r; ++j) {
    ModElem v(2 * r);
    v.c[j] = Poly(1);
    ModElem sd = shift_element(m.differential()[j], -1);
    for (std::size_t i = 0; i < r; ++i) v.c[r + i] = -sd.c[i];
    diff.push_back(std::move(v));
  }
  return DGModule(m.base(), std::move(gens), std::move(diff));
}

} // namespace tatekit
