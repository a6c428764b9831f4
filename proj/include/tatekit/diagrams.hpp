#pragma once

// Finite index categories, truncated nerves, the ε*/τ pair, cosimplicial
// groups of H-valued functions, and Reedy replacement of algebra diagrams
// over direct indices whose latching categories are posets.

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tatekit/derivations.hpp"
#include "tatekit/dgalg.hpp"
#include "tatekit/errors.hpp"
#include "tatekit/factorization.hpp"

namespace tatekit {

// ---------------------------------------------------------------------------
// Small categories

struct Arrow {
  std::string name;
  std::size_t source = 0;
  std::size_t target = 0;
  bool identity = false;
};

class SmallCategory {
public:
  static constexpr std::size_t none = static_cast<std::size_t>(-1);

  SmallCategory() = default;

  /// `arrows` lists the non-identity morphisms; identities are added as
  /// "id_<object>". `composition` holds (g, f, g∘f) by name for every
  /// composable pair of non-identity morphisms.
  SmallCategory(std::vector<std::string> objects, const std::vector<Arrow>& arrows,
                const std::vector<std::array<std::string, 3>>& composition)
      : objects_(std::move(objects)) {
    for (std::size_t i = 0; i < objects_.size(); ++i) {
      if (index_of_object(objects_[i]) != i) throw InputError("duplicate object '" + objects_[i] + "'");
      morphisms_.push_back({"id_" + objects_[i], i, i, true});
    }
    for (const auto& a : arrows) {
      if (a.source >= objects_.size() || a.target >= objects_.size())
        throw InputError("morphism '" + a.name + "' has an unknown endpoint");
      morphisms_.push_back({a.name, a.source, a.target, false});
    }
    init_tables();
    for (const auto& [g, f, gf] : composition) {
      std::size_t ig = find(g), i_f = find(f), igf = find(gf);
      if (morphisms_[i_f].target != morphisms_[ig].source)
        throw InputError("composition " + g + "∘" + f + " is not composable");
      if (morphisms_[igf].source != morphisms_[i_f].source || morphisms_[igf].target != morphisms_[ig].target)
        throw InputError("composite " + g + "∘" + f + " = " + gf + " has wrong endpoints");
      comp_[ig][i_f] = igf;
    }
    validate();
  }

  /// Internal constructor from complete data (identities included).
  static SmallCategory from_table(std::vector<std::string> objects, std::vector<Arrow> morphisms,
                                  std::vector<std::vector<std::size_t>> comp) {
    SmallCategory c;
    c.objects_ = std::move(objects);
    c.morphisms_ = std::move(morphisms);
    c.comp_ = std::move(comp);
    c.index_names();
    c.validate();
    return c;
  }

  /// Poset generated by the given relations a < b, one arrow "a->b" per pair.
  static SmallCategory poset(std::vector<std::string> objects,
                             const std::vector<std::pair<std::string, std::string>>& relations) {
    const std::size_t n = objects.size();
    std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
    auto idx = [&](const std::string& s) {
      auto it = std::find(objects.begin(), objects.end(), s);
      if (it == objects.end()) throw InputError("unknown poset element '" + s + "'");
      return static_cast<std::size_t>(it - objects.begin());
    };
    for (std::size_t i = 0; i < n; ++i) le[i][i] = true;
    for (const auto& [a, b] : relations) le[idx(a)][idx(b)] = true;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (le[i][k] && le[k][j]) le[i][j] = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && le[i][j] && le[j][i]) throw InputError("poset relations contain a cycle");
    std::vector<Arrow> arrows;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && le[i][j]) arrows.push_back({objects[i] + "->" + objects[j], i, j});
    std::vector<std::array<std::string, 3>> comp;
    for (const auto& f : arrows)
      for (const auto& g : arrows)
        if (f.target == g.source)
          comp.push_back({g.name, f.name, objects[f.source] + "->" + objects[g.target]});
    return SmallCategory(std::move(objects), arrows, comp);
  }

  /// One object with morphisms {Id, a}, a∘a = a.
  static SmallCategory idempotent() {
    return SmallCategory({"*"}, {{"a", 0, 0}}, {{"a", "a", "a"}});
  }

  static SmallCategory singleton() { return SmallCategory({"*"}, {}, {}); }

  const std::vector<std::string>& objects() const { return objects_; }
  const std::vector<Arrow>& morphisms() const { return morphisms_; }
  std::size_t size() const { return morphisms_.size(); }

  std::size_t identity(std::size_t object) const { return identities_.at(object); }
  bool is_identity(std::size_t m) const { return morphisms_[m].identity; }

  /// g∘f, or `none` when not composable.
  std::size_t compose(std::size_t g, std::size_t f) const { return comp_[g][f]; }

  std::size_t find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw InputError("unknown morphism '" + name + "'");
    return it->second;
  }
  std::size_t index_of_object(const std::string& name) const {
    auto it = std::find(objects_.begin(), objects_.end(), name);
    return it == objects_.end() ? none : static_cast<std::size_t>(it - objects_.begin());
  }

  std::vector<std::size_t> hom(std::size_t a, std::size_t b) const {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < morphisms_.size(); ++m)
      if (morphisms_[m].source == a && morphisms_[m].target == b) out.push_back(m);
    return out;
  }

  /// An isomorphism is a morphism with a two-sided inverse.
  bool is_isomorphism(std::size_t m) const {
    for (std::size_t n : hom(morphisms_[m].target, morphisms_[m].source))
      if (is_identity(compose(n, m)) && is_identity(compose(m, n))) return true;
    return false;
  }

private:
  void init_tables() {
    comp_.assign(morphisms_.size(), std::vector<std::size_t>(morphisms_.size(), none));
    index_names();
    for (std::size_t m = 0; m < morphisms_.size(); ++m) {
      comp_[m][identities_[morphisms_[m].source]] = m;
      comp_[identities_[morphisms_[m].target]][m] = m;
    }
  }

  void index_names() {
    by_name_.clear();
    identities_.assign(objects_.size(), none);
    for (std::size_t m = 0; m < morphisms_.size(); ++m) {
      if (!by_name_.emplace(morphisms_[m].name, m).second)
        throw InputError("duplicate morphism '" + morphisms_[m].name + "'");
      if (morphisms_[m].identity) identities_[morphisms_[m].source] = m;
    }
    for (std::size_t i = 0; i < objects_.size(); ++i)
      if (identities_[i] == none) throw InputError("object '" + objects_[i] + "' has no identity");
  }

  void validate() const {
    const std::size_t n = morphisms_.size();
    for (std::size_t g = 0; g < n; ++g)
      for (std::size_t f = 0; f < n; ++f) {
        bool composable = morphisms_[f].target == morphisms_[g].source;
        if (composable != (comp_[g][f] != none))
          throw InputError(composable ? "composition table misses " + morphisms_[g].name + "∘" + morphisms_[f].name
                                      : "composition table composes non-composable pair");
      }
    for (std::size_t m = 0; m < n; ++m)
      if (comp_[m][identity(morphisms_[m].source)] != m || comp_[identity(morphisms_[m].target)][m] != m)
        throw InputError("identity law fails for '" + morphisms_[m].name + "'");
    for (std::size_t f = 0; f < n; ++f)
      for (std::size_t g = 0; g < n; ++g) {
        if (comp_[g][f] == none) continue;
        for (std::size_t h = 0; h < n; ++h) {
          if (comp_[h][g] == none) continue;
          if (comp_[h][comp_[g][f]] != comp_[comp_[h][g]][f])
            throw InputError("composition is not associative at (" + morphisms_[h].name + ", " + morphisms_[g].name +
                             ", " + morphisms_[f].name + ")");
        }
      }
  }

  std::vector<std::string> objects_;
  std::vector<Arrow> morphisms_;
  std::vector<std::vector<std::size_t>> comp_;
  std::vector<std::size_t> identities_;
  std::map<std::string, std::size_t> by_name_;
};

using CategoryPtr = std::shared_ptr<const SmallCategory>;

// ---------------------------------------------------------------------------
// Truncated nerve

/// A string x₀ → x₁ → ⋯ → xₙ of morphisms of B.
struct Simplex {
  std::vector<std::size_t> objects;
  std::vector<std::size_t> arrows;  // arrows[j]: objects[j] -> objects[j+1]
  int level() const { return static_cast<int>(arrows.size()); }
};

struct Nerve {
  CategoryPtr base;
  int k = 0;
  std::vector<Simplex> simplices;
  std::vector<std::vector<int>> maps;  // monotone map of each morphism of `cat`
  CategoryPtr cat;

  const Simplex& simplex(std::size_t object) const { return simplices[object]; }
  /// Number of simplices per level 0..k.
  std::vector<std::size_t> level_counts() const {
    std::vector<std::size_t> out(static_cast<std::size_t>(k) + 1, 0);
    for (const auto& s : simplices) ++out[static_cast<std::size_t>(s.level())];
    return out;
  }
  bool is_anchor(std::size_t morphism) const {
    const auto& f = maps[morphism];
    return f.back() == simplices[cat->morphisms()[morphism].target].level();
  }
  bool is_injective(std::size_t morphism) const {
    const auto& f = maps[morphism];
    return std::adjacent_find(f.begin(), f.end()) == f.end();
  }
  /// The morphism with the given monotone map between two simplices.
  std::size_t find(std::size_t source, std::size_t target, const std::vector<int>& f) const {
    for (std::size_t m : cat->hom(source, target))
      if (maps[m] == f) return m;
    throw InputError("no such simplex morphism");
  }
  /// Index of the simplex with the given objects and arrows.
  std::size_t find_simplex(const Simplex& s) const {
    for (std::size_t i = 0; i < simplices.size(); ++i)
      if (simplices[i].objects == s.objects && simplices[i].arrows == s.arrows) return i;
    throw InputError("no such simplex");
  }
  /// Strings without identity arrows.
  std::vector<std::size_t> nondegenerate() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < simplices.size(); ++i) {
      const auto& s = simplices[i];
      if (std::none_of(s.arrows.begin(), s.arrows.end(), [&](std::size_t a) { return base->is_identity(a); }))
        out.push_back(i);
    }
    return out;
  }
};

inline bool is_anchor(const std::vector<int>& f, int target_level) { return f.back() == target_level; }

/// β_{j}∘⋯∘β_{i+1} for the string t, i.e. the composite from t.objects[i] to t.objects[j].
inline std::size_t string_composite(const SmallCategory& b, const Simplex& t, int i, int j) {
  std::size_t out = b.identity(t.objects[static_cast<std::size_t>(i)]);
  for (int p = i; p < j; ++p) out = b.compose(t.arrows[static_cast<std::size_t>(p)], out);
  return out;
}

inline std::string simplex_name(const SmallCategory& b, const Simplex& s) {
  std::string out = "[" + b.objects()[s.objects[0]];
  for (std::size_t j = 0; j < s.arrows.size(); ++j)
    out += ">" + b.morphisms()[s.arrows[j]].name + ">" + b.objects()[s.objects[j + 1]];
  return out + "]";
}

/// N(B)_{≤k}: all strings of length ≤ k, morphisms the compatible monotone maps.
inline Nerve nerve_truncation(const CategoryPtr& b, int k) {
  if (k < 2) throw InputError("nerve truncation needs k >= 2, got " + std::to_string(k));
  Nerve n;
  n.base = b;
  n.k = k;
  std::vector<Simplex> level;
  for (std::size_t o = 0; o < b->objects().size(); ++o) level.push_back({{o}, {}});
  for (int l = 0; l <= k; ++l) {
    n.simplices.insert(n.simplices.end(), level.begin(), level.end());
    if (l == k) break;
    std::vector<Simplex> next;
    for (const auto& s : level)
      for (std::size_t m = 0; m < b->size(); ++m)
        if (b->morphisms()[m].source == s.objects.back()) {
          Simplex t = s;
          t.arrows.push_back(m);
          t.objects.push_back(b->morphisms()[m].target);
          next.push_back(std::move(t));
        }
    level = std::move(next);
  }
  std::vector<std::string> names;
  for (const auto& s : n.simplices) names.push_back(simplex_name(*b, s));

  // monotone maps [p] -> [q]
  std::map<std::pair<int, int>, std::vector<std::vector<int>>> monotone;
  for (int p = 0; p <= k; ++p)
    for (int q = 0; q <= k; ++q) {
      std::vector<std::vector<int>> out;
      std::vector<int> f(static_cast<std::size_t>(p) + 1);
      auto rec = [&](auto&& self, int i, int lo) -> void {
        if (i > p) {
          out.push_back(f);
          return;
        }
        for (int v = lo; v <= q; ++v) {
          f[static_cast<std::size_t>(i)] = v;
          self(self, i + 1, v);
        }
      };
      rec(rec, 0, 0);
      monotone[{p, q}] = std::move(out);
    }

  std::vector<Arrow> morphisms;
  std::map<std::tuple<std::size_t, std::size_t, std::vector<int>>, std::size_t> index;
  for (std::size_t si = 0; si < n.simplices.size(); ++si)
    for (std::size_t ti = 0; ti < n.simplices.size(); ++ti) {
      const auto& s = n.simplices[si];
      const auto& t = n.simplices[ti];
      for (const auto& f : monotone[{s.level(), t.level()}]) {
        bool ok = true;
        for (std::size_t i = 0; ok && i < f.size(); ++i)
          ok = t.objects[static_cast<std::size_t>(f[i])] == s.objects[i];
        for (std::size_t i = 1; ok && i < f.size(); ++i)
          ok = string_composite(*b, t, f[i - 1], f[i]) == s.arrows[i - 1];
        if (!ok) continue;
        std::string digits;
        for (int v : f) digits += std::to_string(v);
        bool id = si == ti && std::is_sorted(f.begin(), f.end()) &&
                  f == [&] {
                    std::vector<int> e(f.size());
                    std::iota(e.begin(), e.end(), 0);
                    return e;
                  }();
        index[{si, ti, f}] = morphisms.size();
        morphisms.push_back({id ? "id_" + names[si] : "f" + digits + "_" + std::to_string(si) + "_" + std::to_string(ti),
                             si, ti, id});
        n.maps.push_back(f);
      }
    }
  std::vector<std::vector<std::size_t>> comp(morphisms.size(),
                                             std::vector<std::size_t>(morphisms.size(), SmallCategory::none));
  for (std::size_t g = 0; g < morphisms.size(); ++g)
    for (std::size_t f = 0; f < morphisms.size(); ++f) {
      if (morphisms[f].target != morphisms[g].source) continue;
      std::vector<int> h;
      for (int v : n.maps[f]) h.push_back(n.maps[g][static_cast<std::size_t>(v)]);
      comp[g][f] = index.at({morphisms[f].source, morphisms[g].target, h});
    }
  n.cat = std::make_shared<const SmallCategory>(SmallCategory::from_table(names, std::move(morphisms), std::move(comp)));
  return n;
}

// ---------------------------------------------------------------------------
// Subcategories

struct Subcategory {
  CategoryPtr cat;
  std::vector<std::size_t> objects;    // new object -> old object
  std::vector<std::size_t> morphisms;  // new morphism -> old morphism
};

/// Subcategory on `objects` whose morphisms satisfy `keep` (identities always kept).
/// The kept set must be closed under composition.
inline Subcategory subcategory(const SmallCategory& c, const std::vector<std::size_t>& objects,
                               const std::function<bool(std::size_t)>& keep) {
  Subcategory s;
  s.objects = objects;
  std::map<std::size_t, std::size_t> obj_new, mor_new;
  for (std::size_t i = 0; i < objects.size(); ++i) obj_new[objects[i]] = i;
  std::vector<std::string> names;
  for (std::size_t o : objects) names.push_back(c.objects()[o]);
  std::vector<Arrow> arrows;
  for (std::size_t m = 0; m < c.size(); ++m) {
    const auto& a = c.morphisms()[m];
    if (!obj_new.count(a.source) || !obj_new.count(a.target)) continue;
    if (!a.identity && !keep(m)) continue;
    mor_new[m] = arrows.size();
    arrows.push_back({a.name, obj_new[a.source], obj_new[a.target], a.identity});
    s.morphisms.push_back(m);
  }
  std::vector<std::vector<std::size_t>> comp(arrows.size(), std::vector<std::size_t>(arrows.size(), SmallCategory::none));
  for (std::size_t g = 0; g < arrows.size(); ++g)
    for (std::size_t f = 0; f < arrows.size(); ++f) {
      if (arrows[f].target != arrows[g].source) continue;
      auto it = mor_new.find(c.compose(s.morphisms[g], s.morphisms[f]));
      if (it == mor_new.end()) throw InputError("subcategory is not closed under composition");
      comp[g][f] = it->second;
    }
  s.cat = std::make_shared<const SmallCategory>(SmallCategory::from_table(names, std::move(arrows), std::move(comp)));
  return s;
}

/// The subcategory of injective simplex maps among the given simplices.
inline Subcategory direct_part(const Nerve& n, const std::vector<std::size_t>& objects) {
  return subcategory(*n.cat, objects, [&](std::size_t m) { return n.is_injective(m); });
}

// ---------------------------------------------------------------------------
// Algebra diagrams

/// Inverse of an algebra isomorphism, or nothing if f is not invertible.
inline std::optional<DGMorphism> inverse(const DGMorphism& f) {
  std::map<std::string, Poly> im;
  for (const auto& g : f.target()->generators()) {
    auto p = preimage(f, Poly::of(g), g.degree, g.weight);
    if (!p) return std::nullopt;
    im[g.name] = *p;
  }
  DGMorphism h(f.target(), f.source(), std::move(im));
  if (!(compose(f, h) == DGMorphism::identity(f.target())) || !(compose(h, f) == DGMorphism::identity(f.source())))
    return std::nullopt;
  return h;
}

struct AlgebraDiagram {
  CategoryPtr index;
  std::vector<AlgebraPtr> objects;
  std::vector<DGMorphism> arrows;  // one per morphism of the index

  /// Fills identities and every composite reachable from the given arrows,
  /// then checks functoriality.
  static AlgebraDiagram make(CategoryPtr index, std::vector<AlgebraPtr> objects,
                             const std::map<std::string, DGMorphism>& given) {
    AlgebraDiagram d;
    d.index = std::move(index);
    d.objects = std::move(objects);
    const auto& c = *d.index;
    if (d.objects.size() != c.objects().size()) throw InputError("diagram needs one algebra per object");
    std::vector<std::optional<DGMorphism>> arr(c.size());
    for (std::size_t o = 0; o < d.objects.size(); ++o) arr[c.identity(o)] = DGMorphism::identity(d.objects[o]);
    for (const auto& [name, f] : given) {
      std::size_t m = c.find(name);
      const auto& a = c.morphisms()[m];
      if (f.source() != d.objects[a.source] || f.target() != d.objects[a.target])
        throw InputError("arrow '" + name + "' does not connect the algebras of its endpoints");
      arr[m] = f;
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t g = 0; g < c.size(); ++g)
        for (std::size_t f = 0; f < c.size(); ++f) {
          std::size_t h = c.compose(g, f);
          if (h == SmallCategory::none || arr[h] || !arr[g] || !arr[f]) continue;
          arr[h] = compose(*arr[g], *arr[f]);
          changed = true;
        }
    }
    for (std::size_t m = 0; m < c.size(); ++m) {
      if (!arr[m]) throw InputError("arrow '" + c.morphisms()[m].name + "' has no value");
      d.arrows.push_back(*arr[m]);
    }
    d.check_functorial();
    return d;
  }

  /// Name of the first composable pair violating functoriality, if any.
  std::optional<std::string> functoriality_failure() const {
    const auto& c = *index;
    for (std::size_t o = 0; o < objects.size(); ++o)
      if (!(arrows[c.identity(o)] == DGMorphism::identity(objects[o]))) return "identity of " + c.objects()[o];
    for (std::size_t g = 0; g < c.size(); ++g)
      for (std::size_t f = 0; f < c.size(); ++f) {
        std::size_t h = c.compose(g, f);
        if (h == SmallCategory::none || c.is_identity(g) || c.is_identity(f)) continue;
        if (!(compose(arrows[g], arrows[f]) == arrows[h]))
          return c.morphisms()[g].name + "∘" + c.morphisms()[f].name;
      }
    for (std::size_t m = 0; m < c.size(); ++m)
      if (auto g = arrows[m].chain_map_failure()) return c.morphisms()[m].name + " (not a chain map at " + *g + ")";
    return std::nullopt;
  }

  void check_functorial() const {
    if (auto f = functoriality_failure()) throw InputError("diagram is not functorial at " + *f);
  }
};

/// ε*(S): [x₀→⋯→xₙ] ↦ S(xₙ), f ↦ S(β_m∘⋯∘β_{f(n)+1}).
inline AlgebraDiagram epsilon_star(const AlgebraDiagram& s, const Nerve& n) {
  AlgebraDiagram out;
  out.index = n.cat;
  for (const auto& simplex : n.simplices) out.objects.push_back(s.objects[simplex.objects.back()]);
  for (std::size_t m = 0; m < n.cat->size(); ++m) {
    const auto& a = n.cat->morphisms()[m];
    const auto& t = n.simplices[a.target];
    std::size_t e = string_composite(*s.index, t, n.maps[m].back(), t.level());
    out.arrows.push_back(s.arrows[e]);
  }
  return out;
}

/// First anchor whose image is not invertible, if any.
inline std::optional<std::size_t> non_invertible_anchor(const AlgebraDiagram& g, const Nerve& n) {
  std::map<std::pair<const void*, std::string>, bool> cache;
  for (std::size_t m = 0; m < n.cat->size(); ++m) {
    if (!n.is_anchor(m) || n.cat->is_identity(m)) continue;
    const auto& f = g.arrows[m];
    std::string images;
    for (const auto& [name, p] : f.images()) images += name + "=" + p.str() + ";";
    auto key = std::make_pair(static_cast<const void*>(f.source().get()), images);
    auto it = cache.find(key);
    bool ok = it != cache.end() ? it->second : (cache[key] = inverse(f).has_value());
    if (!ok) return m;
  }
  return std::nullopt;
}

/// τ(G)(x) = G([x]), τ(G)(α) = G(δ₀)⁻¹ G(δ₁).
inline AlgebraDiagram tau(const AlgebraDiagram& g, const Nerve& n) {
  if (auto bad = non_invertible_anchor(g, n))
    throw InputError("anchor '" + n.cat->morphisms()[*bad].name + "' is not sent to an isomorphism");
  const auto& b = *n.base;
  std::vector<AlgebraPtr> objects;
  std::vector<std::size_t> point(b.objects().size());
  for (std::size_t o = 0; o < b.objects().size(); ++o) {
    point[o] = n.find_simplex({{o}, {}});
    objects.push_back(g.objects[point[o]]);
  }
  std::map<std::string, DGMorphism> arrows;
  for (std::size_t m = 0; m < b.size(); ++m) {
    if (b.is_identity(m)) continue;
    const auto& a = b.morphisms()[m];
    std::size_t edge = n.find_simplex({{a.source, a.target}, {m}});
    std::size_t d1 = n.find(point[a.source], edge, {0});
    std::size_t d0 = n.find(point[a.target], edge, {1});
    auto inv = inverse(g.arrows[d0]);
    arrows.emplace(a.name, compose(*inv, g.arrows[d1]));
  }
  return AlgebraDiagram::make(n.base, std::move(objects), arrows);
}

/// Components φ_s = G([xₙ] → s) of the natural isomorphism ε*τ(G) ≅ G.
struct AnchorIsomorphism {
  AlgebraDiagram source;  // ε*τ(G)
  std::vector<DGMorphism> components;
  bool natural = false;
  bool invertible = false;
};

inline AnchorIsomorphism anchor_isomorphism(const AlgebraDiagram& g, const Nerve& n) {
  AnchorIsomorphism out;
  out.source = epsilon_star(tau(g, n), n);
  out.invertible = true;
  for (std::size_t s = 0; s < n.simplices.size(); ++s) {
    const auto& simplex = n.simplices[s];
    std::size_t last = n.find_simplex({{simplex.objects.back()}, {}});
    std::size_t anchor = n.find(last, s, {simplex.level()});
    out.components.push_back(g.arrows[anchor]);
    if (!inverse(g.arrows[anchor])) out.invertible = false;
  }
  out.natural = true;
  for (std::size_t m = 0; m < n.cat->size() && out.natural; ++m) {
    const auto& a = n.cat->morphisms()[m];
    out.natural = compose(g.arrows[m], out.components[a.source]) == compose(out.components[a.target], out.source.arrows[m]);
  }
  return out;
}

/// Conjugate a diagram by objectwise isomorphisms: G'(f) = φ_t G(f) φ_s⁻¹.
inline AlgebraDiagram conjugate(const AlgebraDiagram& g, const std::vector<DGMorphism>& phi) {
  AlgebraDiagram out = g;
  for (std::size_t o = 0; o < g.objects.size(); ++o) out.objects[o] = phi[o].target();
  for (std::size_t m = 0; m < g.index->size(); ++m) {
    const auto& a = g.index->morphisms()[m];
    auto inv = inverse(phi[a.source]);
    if (!inv) throw InputError("conjugating map is not invertible at '" + g.index->objects()[a.source] + "'");
    out.arrows[m] = compose(phi[a.target], compose(g.arrows[m], *inv));
  }
  return out;
}

inline AlgebraDiagram restrict_diagram(const AlgebraDiagram& d, const Subcategory& s) {
  AlgebraDiagram out;
  out.index = s.cat;
  for (std::size_t o : s.objects) out.objects.push_back(d.objects[o]);
  for (std::size_t m : s.morphisms) out.arrows.push_back(d.arrows[m]);
  return out;
}

// ---------------------------------------------------------------------------
// Cosimplicial groups of H-valued functions on a simplicial set

struct FiniteGroup {
  std::vector<std::vector<int>> table;
  int unit = 0;
  std::vector<int> inverses;

  explicit FiniteGroup(std::vector<std::vector<int>> t) : table(std::move(t)) {
    const int n = size();
    bool found = false;
    for (int e = 0; e < n && !found; ++e) {
      bool ok = true;
      for (int a = 0; a < n && ok; ++a) ok = table[e][a] == a && table[a][e] == a;
      if (ok) unit = e, found = true;
    }
    if (!found) throw InputError("group table has no unit");
    inverses.assign(n, -1);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (table[a][b] == unit) inverses[a] = b;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (table[table[a][b]][c] != table[a][table[b][c]]) throw InputError("group table is not associative");
    if (std::count(inverses.begin(), inverses.end(), -1)) throw InputError("group table has no inverses");
  }
  int size() const { return static_cast<int>(table.size()); }
  int mul(int a, int b) const { return table[a][b]; }
  int inv(int a) const { return inverses[a]; }

  /// S₃ as permutations of {0,1,2} in lexicographic order, (pq)(i) = p(q(i)).
  static FiniteGroup symmetric3() {
    std::vector<std::array<int, 3>> perms;
    std::array<int, 3> p{0, 1, 2};
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    std::vector<std::vector<int>> t(6, std::vector<int>(6));
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        std::array<int, 3> c{};
        for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
        t[a][b] = static_cast<int>(std::find(perms.begin(), perms.end(), c) - perms.begin());
      }
    return FiniteGroup(std::move(t));
  }
};

/// Δ[p], or Δ[p]/∂Δ[p] when `collapse` is set, through level `top`.
/// Simplices are monotone maps [n] → [p]; the collapsed version sends every
/// non-surjective map to a single base point.
struct SimplicialSet {
  int p = 1;
  bool collapse = false;
  int top = 3;
  std::vector<std::vector<std::vector<int>>> simplices;  // per level; base point first when collapsed

  SimplicialSet(int dim, bool collapsed, int top_level) : p(dim), collapse(collapsed), top(top_level) {
    if (dim < 1) throw InputError("simplicial set dimension must be >= 1");
    for (int n = 0; n <= top; ++n) {
      std::vector<std::vector<int>> level;
      if (collapse) level.push_back({});
      std::vector<int> u(static_cast<std::size_t>(n) + 1);
      auto rec = [&](auto&& self, int i, int lo) -> void {
        if (i > n) {
          if (!collapse || surjective(u)) level.push_back(u);
          return;
        }
        for (int v = lo; v <= p; ++v) {
          u[static_cast<std::size_t>(i)] = v;
          self(self, i + 1, v);
        }
      };
      rec(rec, 0, 0);
      simplices.push_back(std::move(level));
    }
  }

  bool surjective(const std::vector<int>& u) const {
    std::set<int> s(u.begin(), u.end());
    return static_cast<int>(s.size()) == p + 1;
  }

  std::size_t size(int n) const { return simplices[static_cast<std::size_t>(n)].size(); }

  /// X(θ)(x) = x∘θ for θ: [n] → [m] and x ∈ X_m.
  std::size_t act(const std::vector<int>& theta, int m, std::size_t x) const {
    const auto& u = simplices[static_cast<std::size_t>(m)][x];
    const int n = static_cast<int>(theta.size()) - 1;
    const auto& level = simplices[static_cast<std::size_t>(n)];
    if (collapse && u.empty()) return 0;
    std::vector<int> v;
    for (int t : theta) v.push_back(u[static_cast<std::size_t>(t)]);
    if (collapse && !surjective(v)) return 0;
    return static_cast<std::size_t>(std::find(level.begin(), level.end(), v) - level.begin());
  }
};

/// δ_i: [n-1] → [n] skipping i, σ_i: [n+1] → [n] repeating i.
inline std::vector<int> coface_map(int i, int n) {
  std::vector<int> f;
  for (int q = 0; q < n; ++q) f.push_back(q < i ? q : q + 1);
  return f;
}
inline std::vector<int> codegeneracy_map(int i, int n) {
  std::vector<int> f;
  for (int q = 0; q <= n + 1; ++q) f.push_back(q <= i ? q : q - 1);
  return f;
}

/// G_n = Map(X_n, H) with pointwise multiplication. Elements at level n are
/// encoded as integers in base |H| over the simplices of X_n.
class CosimplicialGroup {
public:
  using Element = std::vector<int>;

  CosimplicialGroup(FiniteGroup h, SimplicialSet x) : h_(std::move(h)), x_(std::move(x)) {
    for (int n = 0; n <= x_.top; ++n) {
      std::vector<std::vector<std::size_t>> d, s;
      for (int i = 0; i <= n && n >= 1; ++i) {
        std::vector<std::size_t> t;
        for (std::size_t xi = 0; xi < x_.size(n); ++xi) t.push_back(x_.act(coface_map(i, n), n, xi));
        d.push_back(std::move(t));
      }
      for (int i = 0; i <= n && n + 1 <= x_.top; ++i) {
        std::vector<std::size_t> t;
        for (std::size_t xi = 0; xi < x_.size(n); ++xi) t.push_back(x_.act(codegeneracy_map(i, n), n, xi));
        s.push_back(std::move(t));
      }
      face_.push_back(std::move(d));
      degen_.push_back(std::move(s));
    }
  }

  const FiniteGroup& group() const { return h_; }
  const SimplicialSet& simplicial_set() const { return x_; }
  int top() const { return x_.top; }
  std::size_t width(int n) const { return x_.size(n); }

  Element unit(int n) const { return Element(width(n), h_.unit); }
  Element mul(const Element& a, const Element& b) const {
    Element c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = h_.mul(a[i], b[i]);
    return c;
  }
  Element inv(const Element& a) const {
    Element c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = h_.inv(a[i]);
    return c;
  }
  /// δ_i: G_{n-1} → G_n, (δ_i g)(x) = g(x∘δ_i).
  Element delta(int i, int n, const Element& g) const {
    const auto& t = face_[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
    Element out(t.size());
    for (std::size_t x = 0; x < t.size(); ++x) out[x] = g[t[x]];
    return out;
  }
  /// σ_i: G_{n+1} → G_n, (σ_i g)(x) = g(x∘σ_i).
  Element sigma(int i, int n, const Element& g) const {
    const auto& t = degen_[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
    Element out(t.size());
    for (std::size_t x = 0; x < t.size(); ++x) out[x] = g[t[x]];
    return out;
  }

  /// All elements of G_n (|H|^{|X_n|} of them).
  std::vector<Element> elements(int n) const {
    std::vector<Element> out;
    Element e(width(n), 0);
    for (;;) {
      out.push_back(e);
      std::size_t i = 0;
      while (i < e.size() && ++e[i] == h_.size()) e[i++] = 0;
      if (i == e.size()) break;
    }
    return out;
  }

  /// Exhaustive check of the cosimplicial identities on G_0..G_top.
  /// Returns a description of the first failure.
  std::optional<std::string> identity_failure() const {
    for (int n = 0; n <= top(); ++n) {
      for (const auto& g : elements(n)) {
        // δ_i δ_j = δ_{j+1} δ_i for i ≤ j, G_n → G_{n+2}
        for (int j = 0; n + 2 <= top() && j <= n + 1; ++j)
          for (int i = 0; i <= j; ++i)
            if (delta(i, n + 2, delta(j, n + 1, g)) != delta(j + 1, n + 2, delta(i, n + 1, g)))
              return "delta identity at level " + std::to_string(n);
        // σ_i σ_j = σ_j σ_{i+1} for i ≥ j, G_{n} → G_{n-2}
        for (int j = 0; n >= 2 && j <= n - 2; ++j)
          for (int i = j; i <= n - 2; ++i)
            if (sigma(i, n - 2, sigma(j, n - 1, g)) != sigma(j, n - 2, sigma(i + 1, n - 1, g)))
              return "sigma identity at level " + std::to_string(n);
        // mixed identities, G_n → G_{n+1} → G_n
        for (int i = 0; n + 1 <= top() && i <= n; ++i)
          for (int j = 0; j <= n + 1; ++j) {
            Element lhs = sigma(i, n, delta(j, n + 1, g));
            Element rhs;
            if (j == i || j == i + 1)
              rhs = g;
            else if (j > i + 1)
              rhs = n >= 1 ? delta(j - 1, n, sigma(i, n - 1, g)) : g;
            else
              rhs = n >= 1 ? delta(j, n, sigma(i - 1, n - 1, g)) : g;
            if (lhs != rhs) return "mixed identity at level " + std::to_string(n);
          }
      }
    }
    return std::nullopt;
  }

private:
  FiniteGroup h_;
  SimplicialSet x_;
  std::vector<std::vector<std::vector<std::size_t>>> face_;   // [n][i]: X_n → X_{n-1}
  std::vector<std::vector<std::vector<std::size_t>>> degen_;  // [n][i]: X_n → X_{n+1}
};

/// First incompatible pair (i, j), i > j, with σ_{i-1} x_j ≠ σ_j x_i.
inline std::optional<std::pair<int, int>> incompatible_pair(const CosimplicialGroup& g, int n,
                                                            const std::map<int, CosimplicialGroup::Element>& x) {
  for (const auto& [i, xi] : x)
    for (const auto& [j, xj] : x)
      if (i > j && g.sigma(i - 1, n - 1, xj) != g.sigma(j, n - 1, xi)) return std::make_pair(i, j);
  return std::nullopt;
}

/// x ∈ G_{n+1} with σ_i x = x_i for i ∈ I, by the descending recursion
/// z_{i_k} = δ_{i_k} x_{i_k}, z_{i_p} = z_{i_{p+1}} (δ_{i_p} σ_{i_p} z_{i_{p+1}})⁻¹ (δ_{i_p} x_{i_p}).
inline CosimplicialGroup::Element cosimplicial_extend(const CosimplicialGroup& g, int n,
                                                      const std::map<int, CosimplicialGroup::Element>& x) {
  if (n < 1 || n + 1 > g.top()) throw InputError("cosimplicial_extend needs 1 <= n < top level");
  for (const auto& [i, xi] : x) {
    if (i < 0 || i > n) throw InputError("index " + std::to_string(i) + " is outside [n]");
    if (xi.size() != g.width(n)) throw InputError("element has the wrong level");
  }
  if (auto bad = incompatible_pair(g, n, x))
    throw PreconditionError("incompatible pair (i, j) = (" + std::to_string(bad->first) + ", " +
                            std::to_string(bad->second) + ")");
  if (x.empty()) return g.unit(n + 1);
  std::vector<int> idx;
  for (const auto& [i, xi] : x) idx.push_back(i);
  auto z = g.delta(idx.back(), n + 1, x.at(idx.back()));
  for (int p = static_cast<int>(idx.size()) - 1; p >= 0; --p) {
    int ip = idx[static_cast<std::size_t>(p)];
    if (p + 1 < static_cast<int>(idx.size())) {
      auto back = g.delta(ip, n + 1, g.sigma(ip, n, z));
      z = g.mul(g.mul(z, g.inv(back)), g.delta(ip, n + 1, x.at(ip)));
    }
    // σ_{i_m} z_{i_p} = x_{i_m} for all m ≥ p
    for (std::size_t m = static_cast<std::size_t>(p); m < idx.size(); ++m)
      if (g.sigma(idx[m], n, z) != x.at(idx[m]))
        throw IntegrityError("cosimplicial recursion lost σ_" + std::to_string(idx[m]) + " at step " + std::to_string(p));
  }
  return z;
}

struct ExtensionCensus {
  int n = 0;
  std::size_t subsets = 0;
  std::size_t compatible = 0;  // compatible tuples over all nonempty I ⊆ [n]
  std::size_t solved = 0;      // tuples for which the recursion output passed every σ-check
  std::size_t realized = 0;    // distinct tuples (σ_i x)_{i∈I} over all x ∈ G_{n+1}
};

/// Enumerates every compatible tuple for every nonempty I ⊆ [n], runs the
/// recursion on each, and independently counts the tuples realized by some
/// element of G_{n+1}.
inline ExtensionCensus extension_census(const CosimplicialGroup& g, int n) {
  using Element = CosimplicialGroup::Element;
  ExtensionCensus c;
  c.n = n;
  auto level = g.elements(n);
  auto above = g.elements(n + 1);
  // σ_i x for every x ∈ G_n, needed for compatibility
  std::vector<std::vector<Element>> lowered(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (const auto& x : level) lowered[static_cast<std::size_t>(i)].push_back(g.sigma(i, n - 1, x));
  for (unsigned mask = 1; mask < (1u << (n + 1)); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i <= n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    ++c.subsets;
    std::vector<std::size_t> choice(idx.size());
    auto rec = [&](auto&& self, std::size_t pos) -> void {
      if (pos == idx.size()) {
        ++c.compatible;
        std::map<int, Element> x;
        for (std::size_t q = 0; q < idx.size(); ++q) x[idx[q]] = level[choice[q]];
        Element z = cosimplicial_extend(g, n, x);
        bool ok = true;
        for (const auto& [i, xi] : x) ok = ok && g.sigma(i, n, z) == xi;
        if (ok) ++c.solved;
        return;
      }
      for (std::size_t e = 0; e < level.size(); ++e) {
        bool ok = true;
        // σ_{i-1} x_j = σ_j x_i for j < i
        int i = idx[pos];
        for (std::size_t q = 0; q < pos && ok; ++q) {
          int j = idx[q];
          ok = lowered[static_cast<std::size_t>(i - 1)][choice[q]] == lowered[static_cast<std::size_t>(j)][e];
        }
        if (!ok) continue;
        choice[pos] = e;
        self(self, pos + 1);
      }
    };
    rec(rec, 0);
    std::set<std::vector<Element>> seen;
    for (const auto& z : above) {
      std::vector<Element> t;
      for (int i : idx) t.push_back(g.sigma(i, n, z));
      seen.insert(std::move(t));
    }
    c.realized += seen.size();
  }
  return c;
}

// ---------------------------------------------------------------------------
// Direct indices, latching objects and Reedy replacement

/// Degree of each object of a direct category (longest chain of
/// non-identity morphisms ending there). Throws on non-direct input.
inline std::vector<int> direct_degrees(const SmallCategory& c) {
  const std::size_t n = c.objects().size();
  for (std::size_t m = 0; m < c.size(); ++m)
    if (!c.is_identity(m) && c.morphisms()[m].source == c.morphisms()[m].target)
      throw UnsupportedIndexError("index is not direct: endomorphism '" + c.morphisms()[m].name + "'");
  std::vector<int> deg(n, 0);
  for (std::size_t round = 0; round <= n; ++round) {
    bool changed = false;
    for (const auto& a : c.morphisms())
      if (!a.identity && deg[a.target] < deg[a.source] + 1) {
        deg[a.target] = deg[a.source] + 1;
        changed = true;
      }
    if (!changed) return deg;
  }
  throw UnsupportedIndexError("index is not direct: morphisms form a cycle");
}

/// Objects of the latching category at a (non-identity morphisms into a),
/// with morphisms v: u → u' such that u'∘v = u. Checks the poset shape.
struct LatchingCategory {
  std::vector<std::size_t> objects;                                // morphisms u: b → a
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> arrows;  // (u, u', v), v non-identity
};

inline LatchingCategory latching_category(const SmallCategory& c, std::size_t a) {
  LatchingCategory l;
  for (std::size_t m = 0; m < c.size(); ++m)
    if (!c.is_identity(m) && c.morphisms()[m].target == a) l.objects.push_back(m);
  for (std::size_t u : l.objects)
    for (std::size_t u2 : l.objects) {
      std::size_t count = 0;
      for (std::size_t v : c.hom(c.morphisms()[u].source, c.morphisms()[u2].source)) {
        if (c.compose(u2, v) != u) continue;
        ++count;
        if (!c.is_identity(v)) l.arrows.emplace_back(u, u2, v);
      }
      if (count > 1)
        throw UnsupportedIndexError("latching category at '" + c.objects()[a] + "' is not a poset (" +
                                    c.morphisms()[u].name + " -> " + c.morphisms()[u2].name + ")");
    }
  return l;
}

struct LatchingObject {
  AlgebraPtr algebra;
  std::map<std::size_t, DGMorphism> legs;  // u: b → a  ↦  X_b → L_aX
};

/// colim over the latching category of the given partial diagram; objects
/// and arrows with index beyond the built part may be null.
inline LatchingObject latching_object(const SmallCategory& c, const std::vector<AlgebraPtr>& objects,
                                      const std::vector<std::optional<DGMorphism>>& arrows, std::size_t a) {
  auto lc = latching_category(c, a);
  LatchingObject out;
  if (lc.objects.empty()) {
    out.algebra = make_algebra({});
    return out;
  }
  // nodes (u, generator index)
  std::vector<std::pair<std::size_t, std::size_t>> nodes;
  std::map<std::pair<std::size_t, std::string>, std::size_t> node_of;
  for (std::size_t u : lc.objects) {
    const auto& x = objects.at(c.morphisms()[u].source);
    if (!x) throw InputError("latching object needs the value at '" + c.objects()[c.morphisms()[u].source] + "'");
    if (!x->relations().empty())
      throw InputError("latching leg at '" + c.objects()[c.morphisms()[u].source] + "' is not semifree");
    for (std::size_t gi = 0; gi < x->generators().size(); ++gi) {
      node_of[{u, x->generators()[gi].name}] = nodes.size();
      nodes.emplace_back(u, gi);
    }
  }
  std::vector<std::size_t> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = root(parent[i]);
  };
  for (const auto& [u, u2, v] : lc.arrows) {
    const auto& f = arrows.at(v);
    if (!f) throw InputError("latching object needs the arrow '" + c.morphisms()[v].name + "'");
    std::set<std::string> seen;
    for (const auto& g : f->source()->generators()) {
      const Poly& im = f->image(g.name);
      if (im.terms().size() != 1 || im.terms().begin()->second != 1 || im.terms().begin()->first.factors().size() != 1 ||
          im.terms().begin()->first.factors()[0].second != 1)
        throw InputError("arrow '" + c.morphisms()[v].name + "' does not send generator '" + g.name +
                         "' to a generator");
      const std::string& target = im.terms().begin()->first.factors()[0].first.name;
      if (!seen.insert(target).second)
        throw InputError("arrow '" + c.morphisms()[v].name + "' is not injective on generators");
      parent[root(node_of.at({u, g.name}))] = root(node_of.at({u2, target}));
    }
  }
  // representative of each class: lowest source degree, then arrow name, then generator name
  auto degrees = direct_degrees(c);
  auto key = [&](std::size_t i) {
    const auto& [u, gi] = nodes[i];
    const auto& x = objects[c.morphisms()[u].source];
    return std::make_tuple(degrees[c.morphisms()[u].source], c.morphisms()[u].name, x->generators()[gi].name);
  };
  std::map<std::size_t, std::size_t> rep;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::size_t r = root(i);
    auto it = rep.find(r);
    if (it == rep.end() || key(i) < key(it->second)) rep[r] = i;
  }
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size() && nodes[j].first == nodes[i].first; ++j)
      if (root(i) == root(j))
        throw UnsupportedIndexError("latching colimit at '" + c.objects()[a] + "' identifies two generators of one leg");
  std::map<std::string, int> native_count;
  for (const auto& [r, i] : rep) ++native_count[std::get<2>(key(i))];
  std::map<std::size_t, Symbol> class_symbol;
  std::vector<Symbol> gens;
  for (const auto& [r, i] : rep) {
    const auto& [u, gi] = nodes[i];
    Symbol s = objects[c.morphisms()[u].source]->generators()[gi];
    if (native_count[s.name] > 1) s.name = c.morphisms()[u].name + "." + s.name;
    class_symbol[r] = s;
    gens.push_back(s);
  }
  auto free = make_algebra(gens);
  auto leg_into = [&](std::size_t u, const AlgebraPtr& target) {
    const auto& x = objects[c.morphisms()[u].source];
    std::map<std::string, Poly> im;
    for (const auto& g : x->generators()) im[g.name] = Poly::of(class_symbol.at(root(node_of.at({u, g.name}))));
    return DGMorphism(x, target, std::move(im));
  };
  std::map<std::string, Poly> diff;
  for (const auto& [r, i] : rep) {
    std::size_t u = nodes[i].first;
    const auto& g = objects[c.morphisms()[u].source]->generators()[nodes[i].second];
    diff[class_symbol[r].name] = leg_into(u, free).apply(objects[c.morphisms()[u].source]->d_of(g.name));
  }
  // every member of a class must induce the same differential
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::size_t u = nodes[i].first;
    const auto& x = objects[c.morphisms()[u].source];
    const auto& g = x->generators()[nodes[i].second];
    if (!(leg_into(u, free).apply(x->d_of(g.name)) == diff[class_symbol[root(i)].name]))
      throw IntegrityError("latching colimit at '" + c.objects()[a] + "' has inconsistent differential on " +
                           class_symbol[root(i)].name);
  }
  out.algebra = make_algebra(gens, diff);
  for (std::size_t u : lc.objects) out.legs.emplace(u, leg_into(u, out.algebra));
  return out;
}

struct ReedyReplacement {
  AlgebraDiagram diagram;                     // R
  std::vector<DGMorphism> projection;         // R_a → S_a
  std::vector<AlgebraPtr> latching;           // L_aR
  std::vector<DGMorphism> latching_inclusion; // L_aR → R_a
  std::vector<std::map<std::size_t, DGMorphism>> legs;
  std::vector<FactorizationResult> factorizations;
};

/// Objects sorted by direct degree, ties by index.
inline std::vector<std::size_t> reedy_order(const SmallCategory& c) {
  auto deg = direct_degrees(c);
  std::vector<std::size_t> order(c.objects().size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return deg[a] < deg[b]; });
  return order;
}

inline ReedyReplacement reedy_cofibrant_replacement(const AlgebraDiagram& s, int depth, int weight_bound) {
  const auto& c = *s.index;
  const std::size_t n = c.objects().size();
  ReedyReplacement r;
  std::vector<AlgebraPtr> objects(n);
  std::vector<std::optional<DGMorphism>> arrows(c.size());
  r.projection.resize(n);
  r.latching.resize(n);
  r.latching_inclusion.resize(n);
  r.legs.resize(n);
  r.factorizations.resize(n);
  for (std::size_t a : reedy_order(c)) {
    auto l = latching_object(c, objects, arrows, a);
    // L_aR → S_a from the cocone S(u)∘p_b
    std::map<std::string, Poly> im;
    for (const auto& [u, leg] : l.legs) {
      std::size_t b = c.morphisms()[u].source;
      for (const auto& g : leg.source()->generators()) {
        const std::string& cls = leg.image(g.name).terms().begin()->first.factors()[0].first.name;
        Poly v = s.arrows[u].apply(r.projection[b].image(g.name));
        auto [it, fresh] = im.emplace(cls, v);
        if (!fresh && !(it->second == v))
          throw IntegrityError("latching map to '" + c.objects()[a] + "' is inconsistent on " + cls);
      }
    }
    DGMorphism to_s(l.algebra, s.objects[a], std::move(im));
    to_s.validated();
    auto fact = tate_factorize(to_s, depth, weight_bound);
    objects[a] = fact.middle;
    arrows[c.identity(a)] = DGMorphism::identity(fact.middle);
    for (const auto& [u, leg] : l.legs) arrows[u] = compose(fact.inclusion, leg);
    r.projection[a] = fact.projection;
    r.latching[a] = l.algebra;
    r.latching_inclusion[a] = fact.inclusion;
    r.legs[a] = l.legs;
    r.factorizations[a] = std::move(fact);
  }
  r.diagram.index = s.index;
  r.diagram.objects = objects;
  for (auto& f : arrows) r.diagram.arrows.push_back(*f);
  return r;
}

struct ReplacementCheck {
  std::vector<bool> semifree_extension;  // L_aR → R_a
  std::vector<bool> certified;           // R_a → S_a on all slices in the bounds
  std::optional<std::string> functoriality_failure;
  bool projection_natural = true;

  bool ok() const {
    return !functoriality_failure && projection_natural &&
           std::all_of(semifree_extension.begin(), semifree_extension.end(), [](bool b) { return b; }) &&
           std::all_of(certified.begin(), certified.end(), [](bool b) { return b; });
  }
};

inline ReplacementCheck check_replacement(const ReedyReplacement& r, const AlgebraDiagram& s) {
  ReplacementCheck out;
  for (std::size_t a = 0; a < r.diagram.objects.size(); ++a) {
    bool semifree = true;
    try {
      detail::new_generators(r.latching_inclusion[a]);
    } catch (const Error&) {
      semifree = false;
    }
    out.semifree_extension.push_back(semifree && r.diagram.objects[a]->is_semifree());
    const auto& f = r.factorizations[a];
    out.certified.push_back(f.certificate.failed.empty() &&
                            f.certificate.verified.size() ==
                                static_cast<std::size_t>((f.certificate.degree_depth + 1) * (f.certificate.weight_bound + 1)) &&
                            f.projection.is_chain_map());
  }
  out.functoriality_failure = r.diagram.functoriality_failure();
  for (std::size_t m = 0; m < s.index->size(); ++m) {
    const auto& a = s.index->morphisms()[m];
    if (!(compose(r.projection[a.target], r.diagram.arrows[m]) == compose(s.arrows[m], r.projection[a.source])))
      out.projection_natural = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Diagram derivations

using DiagramDerivation = std::vector<Derivation>;

/// Der(R•, M•) where M• is R• itself or S• along the projections.
struct DiagramDer {
  CategoryPtr index;
  std::vector<AlgebraTarget> objects;
  std::vector<DGMorphism> source_arrows;  // R(u)
  std::vector<DGMorphism> target_arrows;  // M(u)

  static DiagramDer endo(const AlgebraDiagram& r) {
    DiagramDer d;
    d.index = r.index;
    for (const auto& o : r.objects) d.objects.push_back(AlgebraTarget::endo(o));
    d.source_arrows = r.arrows;
    d.target_arrows = r.arrows;
    return d;
  }
  static DiagramDer tangent(const AlgebraDiagram& r, const AlgebraDiagram& s, const std::vector<DGMorphism>& p) {
    DiagramDer d;
    d.index = r.index;
    for (const auto& f : p) d.objects.push_back(AlgebraTarget(f));
    d.source_arrows = r.arrows;
    d.target_arrows = s.arrows;
    return d;
  }
  /// A single algebra as a diagram over the one-object category.
  static DiagramDer single(const AlgebraTarget& t) {
    DiagramDer d;
    d.index = std::make_shared<const SmallCategory>(SmallCategory::singleton());
    d.objects.push_back(t);
    d.source_arrows.push_back(DGMorphism::identity(t.f.source()));
    d.target_arrows.push_back(DGMorphism::identity(t.f.target()));
    return d;
  }
};

struct DiagramDerSlice {
  int degree = 0;
  int weight = 0;
  std::vector<DerSlice<AlgebraTarget>> parts;
  std::vector<std::size_t> offsets;
  std::size_t product_dim = 0;
  std::vector<Vector> basis;  // compatible subspace, in product coordinates

  Vector coords(const DiagramDer& l, const DiagramDerivation& a) const {
    Vector v(product_dim);
    for (std::size_t o = 0; o < parts.size(); ++o) {
      auto c = parts[o].coords(l.objects[o], a[o]);
      std::copy(c.begin(), c.end(), v.begin() + static_cast<std::ptrdiff_t>(offsets[o]));
    }
    return v;
  }
  DiagramDerivation element(const DiagramDer& l, const Vector& v) const {
    DiagramDerivation out;
    for (std::size_t o = 0; o < parts.size(); ++o) {
      auto first = v.begin() + static_cast<std::ptrdiff_t>(offsets[o]);
      out.push_back(parts[o].element(l.objects[o], Vector(first, first + static_cast<std::ptrdiff_t>(parts[o].dim))));
    }
    return out;
  }
  std::size_t dim() const { return basis.size(); }
};

inline DiagramDerivation diagram_der_differential(const DiagramDer& l, const DiagramDerivation& a) {
  DiagramDerivation out;
  for (std::size_t o = 0; o < a.size(); ++o) out.push_back(der_differential(l.objects[o], a[o]));
  return out;
}

/// Defect α_b∘R(u) - M(u)∘α_a of every non-identity arrow, stacked.
inline Vector compatibility_defect(const DiagramDer& l, int k, int w, const DiagramDerivation& a) {
  Vector out;
  const auto& c = *l.index;
  for (std::size_t m = 0; m < c.size(); ++m) {
    if (c.is_identity(m)) continue;
    std::size_t s = c.morphisms()[m].source, t = c.morphisms()[m].target;
    const auto& ts = l.objects[t];
    for (const auto& g : l.objects[s].source().generators()) {
      int dg = g.degree + k, wg = g.weight + w;
      if (ts.dim(dg, wg) == 0) continue;
      Poly lhs = evaluate(ts, a[t], l.source_arrows[m].image(g.name));
      const Poly* v = a[s].value(g.name);
      Poly rhs = v ? l.target_arrows[m].apply(*v) : Poly{};
      auto c1 = ts.coords(dg, wg, ts.component(lhs - rhs, dg, wg));
      out.insert(out.end(), c1.begin(), c1.end());
    }
  }
  return out;
}

inline DiagramDerSlice diagram_der_slice(const DiagramDer& l, int k, int w) {
  DiagramDerSlice s;
  s.degree = k;
  s.weight = w;
  for (const auto& t : l.objects) {
    s.offsets.push_back(s.product_dim);
    s.parts.push_back(der_slice(t, k, w));
    s.product_dim += s.parts.back().dim;
  }
  std::vector<Vector> cols;
  for (std::size_t i = 0; i < s.product_dim; ++i) {
    Vector e(s.product_dim);
    e[i] = 1;
    cols.push_back(compatibility_defect(l, k, w, s.element(l, e)));
  }
  std::size_t rows = cols.empty() ? 0 : cols[0].size();
  s.basis = rank_kernel(SparseMatrix::from_columns(rows, cols)).kernel_basis;
  if (rows == 0) {
    s.basis.clear();
    for (std::size_t i = 0; i < s.product_dim; ++i) {
      Vector e(s.product_dim);
      e[i] = 1;
      s.basis.push_back(e);
    }
  }
  return s;
}

inline std::vector<DiagramDerivation> diagram_der_basis(const DiagramDer& l, int k, int w) {
  auto s = diagram_der_slice(l, k, w);
  std::vector<DiagramDerivation> out;
  for (const auto& v : s.basis) out.push_back(s.element(l, v));
  return out;
}

struct DiagramCohomology {
  int weight = 0;
  std::size_t dim = 0;
  std::vector<DiagramDerivation> representatives;
};

/// H^i of the compatible subcomplex, per weight.
inline DiagramCohomology diagram_cohomology(const DiagramDer& l, int i, int w) {
  auto prev = diagram_der_slice(l, i - 1, w);
  auto mid = diagram_der_slice(l, i, w);
  auto next = diagram_der_slice(l, i + 1, w);
  // d on the compatible basis of degree i, in product coordinates of degree i+1
  std::vector<Vector> dmid;
  for (const auto& v : mid.basis) dmid.push_back(next.coords(l, diagram_der_differential(l, mid.element(l, v))));
  auto ker = rank_kernel(SparseMatrix::from_columns(next.product_dim, dmid)).kernel_basis;
  std::vector<Vector> cycles;
  for (const auto& kv : ker) {
    Vector v(mid.product_dim);
    for (std::size_t j = 0; j < kv.size(); ++j)
      for (std::size_t r = 0; r < v.size(); ++r) v[r] += kv[j] * mid.basis[j][r];
    cycles.push_back(v);
  }
  if (next.product_dim == 0) cycles = mid.basis;
  std::vector<Vector> bounds;
  for (const auto& v : prev.basis) bounds.push_back(mid.coords(l, diagram_der_differential(l, prev.element(l, v))));
  auto sq = subquotient(cycles, bounds, mid.product_dim);
  DiagramCohomology out;
  out.weight = w;
  out.dim = sq.dim;
  for (const auto& v : sq.representatives) out.representatives.push_back(mid.element(l, v));
  return out;
}

// ---------------------------------------------------------------------------
// Lifting against objectwise surjections of diagrams (graded algebras)

/// γ: R• → E• of graded algebras with p∘γ = g and γ compatible with the
/// arrows, for R• a Reedy replacement. Each object is lifted against the
/// trivial fibration p ⊗ K[d⁻¹] and then projected along d⁻¹ ↦ 0.
inline std::vector<DGMorphism> lift_graded_morphism(const ReedyReplacement& r, const AlgebraDiagram& e,
                                                    const AlgebraDiagram& f, const std::vector<DGMorphism>& p,
                                                    const std::vector<DGMorphism>& g, int weight_bound) {
  const auto& c = *r.diagram.index;
  const std::size_t n = c.objects().size();
  struct Extended {
    AlgebraPtr algebra;
    Symbol u;
  };
  auto extend = [](const AlgebraPtr& a) {
    Symbol s{detail::fresh_name(*a, "dinv"), -1, 0};
    return Extended{std::make_shared<const DGAlgebra>(a->extended({s}, {{s.name, Poly(1)}})), s};
  };
  auto tensor = [](const DGMorphism& m, const Extended& src, const Extended& tgt) {
    std::map<std::string, Poly> im = m.images();
    im[src.u.name] = Poly::of(tgt.u);
    return DGMorphism(src.algebra, tgt.algebra, std::move(im));
  };
  // φ(x) = h(x) + d⁻¹ (h(dx) - d h(x)) turns a graded map h into a chain map
  auto straighten = [](const DGMorphism& h, const Extended& tgt) {
    std::map<std::string, Poly> im;
    for (const auto& x : h.source()->generators()) {
      Poly hx = h.image(x.name);
      Poly theta = h.apply(h.source()->d_of(x.name)) - h.target()->d(hx);
      im[x.name] = hx + Poly::of(tgt.u) * theta;
    }
    return DGMorphism(h.source(), tgt.algebra, std::move(im));
  };
  std::vector<Extended> ee(n), ff(n);
  for (std::size_t a = 0; a < n; ++a) {
    ee[a] = extend(e.objects[a]);
    ff[a] = extend(f.objects[a]);
  }
  std::vector<DGMorphism> lifted(n), gamma(n);
  for (std::size_t a : reedy_order(c)) {
    for (int d = -r.factorizations[a].certificate.degree_depth - 1; d <= 0; ++d)
      for (int w = 0; w <= weight_bound; ++w)
        if (!is_surjective_on(p[a], d, w))
          throw PreconditionError("map is not surjective at object '" + c.objects()[a] + "', slice " +
                                  detail::slice_name(d, w));
    DGMorphism p2 = tensor(p[a], ee[a], ff[a]);
    DGMorphism beta = straighten(g[a], ff[a]);
    std::map<std::string, Poly> alpha_im;
    for (const auto& [u, leg] : r.legs[a]) {
      std::size_t b = c.morphisms()[u].source;
      DGMorphism eu = tensor(e.arrows[u], ee[b], ee[a]);
      for (const auto& x : leg.source()->generators()) {
        const std::string& cls = leg.image(x.name).terms().begin()->first.factors()[0].first.name;
        alpha_im[cls] = eu.apply(lifted[b].image(x.name));
      }
    }
    DGMorphism alpha(r.latching[a], ee[a].algebra, std::move(alpha_im));
    lifted[a] = lift_against_trivial_fibration(r.latching_inclusion[a], p2, alpha, beta, weight_bound);
    std::map<std::string, Poly> drop;
    for (const auto& s : e.objects[a]->generators()) drop[s.name] = Poly::of(s);
    DGMorphism proj(ee[a].algebra, e.objects[a], std::move(drop));
    gamma[a] = compose(proj, lifted[a]);
  }
  return gamma;
}

} // namespace tatekit
