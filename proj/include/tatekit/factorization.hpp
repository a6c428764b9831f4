#pragma once

// Factorizations and lifts.
//
// tate_factorize adds generators stage by stage: stage 0 makes the map onto
// degree 0 surjective, stage n adds degree -n generators that (a) hit the
// remaining cocycles of the target in degree -n and (b) kill the kernel of
// H^{-n+1}. Weights are processed in ascending order inside each stage, so
// generators of low weight are already present when a heavier slice is
// examined and only genuinely new classes get a generator.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tatekit/dgalg.hpp"
#include "tatekit/errors.hpp"

namespace tatekit {

struct StageBatch {
  int stage = 0;
  int degree = 0;
  std::vector<Symbol> generators;
  std::map<std::string, Poly> differentials;
  std::map<std::string, Poly> images;
};

struct DepthCertificate {
  int degree_depth = 0;
  int weight_bound = 0;
  std::vector<std::pair<int, int>> verified;  // (degree, weight)
  std::vector<std::pair<int, int>> failed;

  bool covers(int degree, int weight) const {
    return std::find(verified.begin(), verified.end(), std::make_pair(degree, weight)) != verified.end();
  }
};

struct FactorizationResult {
  AlgebraPtr middle;
  DGMorphism inclusion;
  DGMorphism projection;
  std::vector<StageBatch> stages;
  DepthCertificate certificate;
};

namespace detail {

inline std::string fresh_name(const DGAlgebra& a, const std::string& base) {
  if (!a.has(base)) return base;
  for (int i = 1;; ++i) {
    std::string n = base + "_" + std::to_string(i);
    if (!a.has(n)) return n;
  }
}

/// Basis of the cocycles of a slice, as polynomials.
inline std::vector<Vector> cycle_coords(const DGAlgebra& a, int degree, int weight) {
  return rank_kernel(a.d_matrix(degree, weight)).kernel_basis;
}

/// Checks that a morphism is the inclusion of A into a semifree extension of A.
inline std::vector<Symbol> new_generators(const DGMorphism& i) {
  for (const auto& g : i.source()->generators()) {
    if (!i.target()->has(g.name) || !(i.image(g.name) == Poly::of(i.target()->symbol(g.name))))
      throw InputError("map is not a generator inclusion at '" + g.name + "'");
    if (!(i.target()->d_of(g.name) == i.source()->d_of(g.name)))
      throw InputError("inclusion changes the differential of '" + g.name + "'");
  }
  if (!i.target()->relations().empty()) throw InputError("extension has relations");
  std::vector<Symbol> out;
  for (const auto& g : i.target()->generators())
    if (!i.source()->has(g.name)) out.push_back(g);
  std::stable_sort(out.begin(), out.end(), [](const Symbol& a, const Symbol& b) {
    if (a.degree != b.degree) return a.degree > b.degree;
    return a.weight < b.weight;
  });
  return out;
}

inline void check_square(const DGMorphism& i, const DGMorphism& g, const DGMorphism& alpha,
                         const DGMorphism& beta) {
  for (const auto& a : i.source()->generators())
    if (!(g.apply(alpha.image(a.name)) == beta.apply(i.image(a.name))))
      throw PreconditionError("square does not commute on generator '" + a.name + "'");
}

inline std::string slice_name(int degree, int weight) {
  return "(" + std::to_string(degree) + ", " + std::to_string(weight) + ")";
}

} // namespace detail

inline DepthCertificate certify(const DGMorphism& projection, int depth, int weight_bound) {
  DepthCertificate c;
  c.degree_depth = depth;
  c.weight_bound = weight_bound;
  for (int i = -depth; i <= 0; ++i)
    for (int w = 0; w <= weight_bound; ++w) {
      bool ok = is_quasi_iso_on(projection, i, w) && is_surjective_on(projection, i, w);
      (ok ? c.verified : c.failed).emplace_back(i, w);
    }
  return c;
}

/// Factors f: A -> B as A -> C (semifree) followed by C -> B (trivial
/// fibration on the slices of degree >= -depth and weight <= weight_bound).
inline FactorizationResult tate_factorize(const DGMorphism& f, int depth, int weight_bound) {
  if (!f.source()->relations().empty()) throw InputError("tate_factorize: source must be semifree");
  if (depth < 0 || weight_bound < 0) throw InputError("tate_factorize: negative bounds");
  f.validated();
  const AlgebraPtr& target = f.target();
  DGAlgebra c = *f.source();
  std::map<std::string, Poly> images = f.images();
  std::vector<StageBatch> stages;

  auto projection = [&](const DGAlgebra& cur) {
    return DGMorphism(std::make_shared<const DGAlgebra>(cur), target, images);
  };

  // Stage 0: hit the degree-0 generators of the target.
  {
    StageBatch batch;
    batch.stage = 0;
    batch.degree = 0;
    for (const auto& b : target->generators()) {
      if (b.degree != 0) continue;
      Poly tb = Poly::of(b);
      if (preimage(projection(c), tb, 0, b.weight)) continue;
      Symbol g{detail::fresh_name(c, b.name), 0, b.weight};
      c = c.extended({g}, {});
      images[g.name] = tb;
      batch.generators.push_back(g);
      batch.images[g.name] = tb;
    }
    stages.push_back(std::move(batch));
  }

  bool target_negative = target->min_degree() < 0;
  for (int n = 1; n <= depth; ++n) {
    StageBatch batch;
    batch.stage = n;
    batch.degree = -n;
    int counter = 0;
    auto add = [&](const Poly& dx, const Poly& image, int weight) {
      std::string name;
      do name = "T" + std::to_string(n) + "_" + std::to_string(counter++);
      while (c.has(name));
      Symbol g{name, -n, weight};
      std::map<std::string, Poly> d;
      if (!dx.is_zero()) d[name] = dx;
      c = c.extended({g}, d);
      images[name] = image;
      batch.generators.push_back(g);
      if (!dx.is_zero()) batch.differentials[name] = dx;
      batch.images[name] = image;
    };

    for (int w = 0; w <= weight_bound; ++w) {
      // (a) surject onto the cocycles Z^{-n}(B) of this weight
      if (target_negative) {
        auto zb = detail::cycle_coords(*target, -n, w);
        if (!zb.empty()) {
          auto pi = projection(c);
          auto bslice = target->slice(-n, w);
          std::vector<Vector> hit;
          for (const auto& z : detail::cycle_coords(c, -n, w))
            hit.push_back(bslice->coords(pi.apply(c.slice(-n, w)->element(z))));
          for (std::size_t idx : complement_indices(hit, zb, bslice->dim()))
            add(Poly{}, bslice->element(zb[idx]), w);
        }
      }
      // (b) kill ker(H^{-n+1}(C) -> H^{-n+1}(B)) in this weight
      auto hc = c.cohomology(-n + 1, w);
      if (hc.dim == 0) continue;
      auto pi = projection(c);
      auto bslice = target->slice(-n + 1, w);
      auto cslice = c.slice(-n + 1, w);
      std::vector<Vector> cols;
      for (const auto& r : hc.representatives) cols.push_back(bslice->coords(pi.apply(r)));
      auto bb = target->cohomology(-n + 1, w).boundaries;
      for (const auto& v : bb) {
        Vector neg = v;
        for (auto& q : neg) q = -q;
        cols.push_back(neg);
      }
      auto ker = rank_kernel(SparseMatrix::from_columns(bslice->dim(), cols)).kernel_basis;
      EchelonBasis proj(hc.dim);
      for (const auto& k : ker) proj.insert(to_sparse(Vector(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(hc.dim))));
      for (const auto& row : proj.rows()) {
        Vector coeffs = to_dense(row, hc.dim);
        Vector z(cslice->dim());
        for (std::size_t i = 0; i < hc.dim; ++i)
          for (std::size_t j = 0; j < z.size(); ++j) z[j] += coeffs[i] * hc.rep_coords[i][j];
        Poly cyc = cslice->element(z);
        Poly target_image = pi.apply(cyc);
        auto sol = solve(target->d_matrix(-n, w), bslice->coords(target_image));
        if (!sol) throw IntegrityError("tate_factorize: kernel class without a bounding element");
        add(cyc, target->slice(-n, w)->element(*sol), w);
      }
    }
    stages.push_back(std::move(batch));
  }

  FactorizationResult out;
  out.middle = std::make_shared<const DGAlgebra>(c);
  out.inclusion = DGMorphism::inclusion(f.source(), out.middle);
  out.projection = DGMorphism(out.middle, target, images);
  if (auto g = out.projection.chain_map_failure())
    throw IntegrityError("tate_factorize: projection is not a chain map at '" + *g + "'");
  out.stages = std::move(stages);
  out.certificate = certify(out.projection, depth, weight_bound);
  return out;
}

/// The algebra after the first `stage` stages of a factorization.
inline AlgebraPtr stage_algebra(const FactorizationResult& r, const AlgebraPtr& source, int stage) {
  DGAlgebra a = *source;
  for (const auto& b : r.stages)
    if (b.stage <= stage) a = a.extended(b.generators, b.differentials);
  return std::make_shared<const DGAlgebra>(a);
}

/// Factors f as a free extension A -> A[x_b, dx_b] followed by a map sending
/// x_b to b and dx_b to db, for each chosen element b.
inline FactorizationResult free_factorize(const DGMorphism& f, const std::vector<Poly>& generating_set) {
  f.validated();
  DGAlgebra c = *f.source();
  std::map<std::string, Poly> images = f.images();
  StageBatch batch;
  batch.stage = 1;
  for (std::size_t j = 0; j < generating_set.size(); ++j) {
    Poly b = f.target()->normalize(generating_set[j]);
    if (b.is_zero() || !b.is_homogeneous())
      throw InputError("free_factorize: element " + std::to_string(j) + " is not homogeneous");
    if (b.degree() >= 0) throw InputError("free_factorize: element " + std::to_string(j) + " has degree >= 0");
    Symbol x{detail::fresh_name(c, "xb" + std::to_string(j)), b.degree(), b.weight()};
    Symbol dx{detail::fresh_name(c, "dxb" + std::to_string(j)), b.degree() + 1, b.weight()};
    c = c.extended({x, dx}, {{x.name, Poly::of(dx)}});
    images[x.name] = b;
    images[dx.name] = f.target()->d(b);
    batch.generators.push_back(x);
    batch.generators.push_back(dx);
    batch.differentials[x.name] = Poly::of(dx);
    batch.images[x.name] = images[x.name];
    batch.images[dx.name] = images[dx.name];
  }
  FactorizationResult out;
  out.middle = std::make_shared<const DGAlgebra>(c);
  out.inclusion = DGMorphism::inclusion(f.source(), out.middle);
  out.projection = DGMorphism(out.middle, f.target(), images);
  out.projection.validated();
  out.stages.push_back(std::move(batch));
  return out;
}

/// Lift γ: A[x] -> C in the square (α: A -> C, β: A[x] -> D) against a
/// trivial fibration g: C -> D, with g∘γ = β and γ∘i = α.
inline DGMorphism lift_against_trivial_fibration(const DGMorphism& i, const DGMorphism& g, const DGMorphism& alpha,
                                                 const DGMorphism& beta, int weight_bound) {
  auto fresh = detail::new_generators(i);
  detail::check_square(i, g, alpha, beta);
  const AlgebraPtr& ax = i.target();
  const DGAlgebra& cc = *g.source();
  const DGAlgebra& dd = *g.target();

  std::map<std::string, Poly> gamma;
  for (const auto& a : i.source()->generators()) gamma[a.name] = alpha.image(a.name);

  for (const auto& x : fresh) {
    const int n = -x.degree, w = x.weight;
    if (w > weight_bound)
      throw TruncationError("lift: generator '" + x.name + "' has weight " + std::to_string(w) +
                            " beyond the bound " + std::to_string(weight_bound));
    for (int deg : {-n + 1, -n})
      if (deg <= 0 && !is_quasi_iso_on(g, deg, w))
        throw PreconditionError("lift: g is not a quasi-isomorphism on slice " + detail::slice_name(deg, w));
    for (int deg : {-n, -n - 1})
      if (!is_surjective_on(g, deg, w))
        throw PreconditionError("lift: g is not surjective on slice " + detail::slice_name(deg, w));

    DGMorphism partial(ax, g.source(), gamma);
    Poly gdx = partial.apply(ax->d_of(x.name));
    // y with dy = γ(dx)
    Poly y;
    if (n >= 1) {
      auto sol = solve(cc.d_matrix(-n, w), cc.slice(-n + 1, w)->coords(gdx));
      if (!sol) throw TruncationError("lift: γ(d" + x.name + ") is not a boundary within the bounds");
      y = cc.slice(-n, w)->element(*sol);
    }
    Poly z = beta.image(x.name) - g.apply(y);
    z = dd.normalize(z);
    // c with dc = 0 and g(c) = z
    auto src = cc.slice(-n, w);
    auto dmat = cc.d_matrix(-n, w);
    auto gmat = g.matrix(-n, w);
    SparseMatrix stacked(dmat.rows() + gmat.rows(), src->dim());
    for (const auto& [rc, q] : dmat.entries()) stacked.set(rc.first, rc.second, q);
    for (const auto& [rc, q] : gmat.entries()) stacked.set(dmat.rows() + rc.first, rc.second, q);
    Vector rhs(stacked.rows());
    auto zc = dd.slice(-n, w)->coords(z);
    std::copy(zc.begin(), zc.end(), rhs.begin() + static_cast<std::ptrdiff_t>(dmat.rows()));
    auto sol = solve(stacked, rhs);
    if (!sol) throw TruncationError("lift: no cocycle preimage for generator '" + x.name + "'");
    gamma[x.name] = y + src->element(*sol);
  }

  DGMorphism out(ax, g.source(), gamma);
  if (auto bad = out.chain_map_failure()) throw IntegrityError("lift is not a chain map at '" + *bad + "'");
  for (const auto& s : ax->generators())
    if (!(g.apply(out.image(s.name)) == beta.image(s.name)))
      throw IntegrityError("lift fails g∘γ = β at '" + s.name + "'");
  return out;
}

/// Lift h: A[x, dx] -> C against g: C -> D surjective in negative degrees.
inline DGMorphism lift_against_fibration(const DGMorphism& i, const DGMorphism& g, const DGMorphism& alpha,
                                         const DGMorphism& beta) {
  auto fresh = detail::new_generators(i);
  detail::check_square(i, g, alpha, beta);
  const AlgebraPtr& ax = i.target();
  std::map<std::string, std::string> pair_of;  // x -> dx
  std::map<std::string, bool> used;
  for (const auto& s : fresh) {
    const Poly& dx = ax->d_of(s.name);
    if (dx.size() != 1) continue;
    const auto& [m, q] = *dx.terms().begin();
    if (q != 1 || m.factors().size() != 1 || m.factors()[0].second != 1) continue;
    const std::string& t = m.factors()[0].first.name;
    if (i.source()->has(t) || !ax->d_of(t).is_zero()) continue;
    pair_of[s.name] = t;
    used[s.name] = used[t] = true;
  }
  for (const auto& s : fresh)
    if (!used[s.name]) throw InputError("lift: '" + s.name + "' is not part of a free pair (x, dx)");

  std::map<std::string, Poly> h;
  for (const auto& a : i.source()->generators()) h[a.name] = alpha.image(a.name);
  for (const auto& [x, dx] : pair_of) {
    const Symbol& s = ax->symbol(x);
    if (s.degree >= 0) throw InputError("lift: free generator '" + x + "' must have negative degree");
    auto pre = preimage(g, beta.image(x), s.degree, s.weight);
    if (!pre) throw PreconditionError("lift: β(" + x + ") has no preimage on slice " +
                                      detail::slice_name(s.degree, s.weight));
    h[x] = *pre;
    h[dx] = g.source()->d(*pre);
  }
  DGMorphism out(ax, g.source(), h);
  if (auto bad = out.chain_map_failure()) throw IntegrityError("lift is not a chain map at '" + *bad + "'");
  for (const auto& s : ax->generators())
    if (!(g.apply(out.image(s.name)) == beta.image(s.name)))
      throw IntegrityError("lift fails g∘h = β at '" + s.name + "'");
  return out;
}

} // namespace tatekit
