#pragma once

// Random objects for property tests.

#include <random>

#include "tatekit/dgalg.hpp"

namespace fixtures {

using namespace tatekit;

inline Rational small_rational(std::mt19937& rng) {
  static const int nums[] = {-2, -1, 1, 1, 2, 3};
  static const int dens[] = {1, 1, 1, 2};
  return frac(nums[rng() % 6], dens[rng() % 4]);
}

/// Random element of a slice (possibly zero).
inline Poly random_element(std::mt19937& rng, const DGAlgebra& a, int degree, int weight, double density = 0.6) {
  auto s = a.slice(degree, weight);
  Vector v(s->dim());
  std::bernoulli_distribution keep(density);
  for (auto& q : v)
    if (keep(rng)) q = small_rational(rng);
  return s->element(v);
}

/// Random cocycle of a slice; nonzero whenever the slice has cocycles.
inline Poly random_cocycle(std::mt19937& rng, const DGAlgebra& a, int degree, int weight) {
  auto z = rank_kernel(a.d_matrix(degree, weight)).kernel_basis;
  auto s = a.slice(degree, weight);
  Vector v(s->dim());
  if (z.empty()) return Poly{};
  while (is_zero(v))
    for (const auto& k : z) {
      Rational c = rng() % 3 ? small_rational(rng) : Rational(0);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += c * k[i];
    }
  return s->element(v);
}

/// Adjoins `count` negative-degree generators one at a time; each differential
/// is a random cocycle of the algebra built so far (nonzero when possible), so
/// d² = 0 holds by construction.
inline DGAlgebra extend_randomly(std::mt19937& rng, DGAlgebra a, const std::string& prefix, int first,
                                 int count, int min_degree, int max_weight) {
  for (int i = first; i < first + count; ++i) {
    Symbol g;
    Poly dg;
    for (int attempt = 0; attempt < 6; ++attempt) {
      int deg = -1 - static_cast<int>(rng() % static_cast<unsigned>(-min_degree));
      // weight >= 2 keeps most differentials decomposable
      int wt = 2 + static_cast<int>(rng() % static_cast<unsigned>(std::max(1, max_weight - 1)));
      g = Symbol{prefix + std::to_string(i), deg, wt};
      dg = random_cocycle(rng, a, deg + 1, wt);
      if (!dg.is_zero()) break;
    }
    std::map<std::string, Poly> d;
    if (!dg.is_zero()) d[g.name] = dg;
    a = a.extended({g}, d);
  }
  return a;
}

/// `even` degree-0 generators g0.. of weight 1 or 2, then `count` negative ones.
inline DGAlgebra random_semifree(std::mt19937& rng, int count = 3, int min_degree = -2, int max_weight = 3,
                                 int even = 2) {
  std::vector<Symbol> gens;
  for (int i = 0; i < even; ++i) gens.push_back({"g" + std::to_string(i), 0, 1 + static_cast<int>(rng() % 2)});
  return extend_randomly(rng, DGAlgebra(gens), "g", even, count, min_degree, max_weight);
}

} // namespace fixtures

#include "tatekit/factorization.hpp"

namespace fixtures {

/// H⁰ of a semifree algebra as a presented algebra: its degree-0 generators
/// modulo the differentials of its degree -1 generators.
inline AlgebraPtr h0_presentation(const DGAlgebra& e) {
  std::vector<Symbol> vars;
  std::vector<Poly> rels;
  for (const auto& g : e.generators()) {
    if (g.degree == 0) vars.push_back(g);
    if (g.degree == -1 && !e.d_of(g.name).is_zero()) rels.push_back(e.d_of(g.name));
  }
  return make_algebra(vars, {}, rels);
}

/// Projection of a semifree algebra onto its H⁰ presentation.
inline DGMorphism h0_projection(const AlgebraPtr& e, const AlgebraPtr& h0) {
  std::map<std::string, Poly> im;
  for (const auto& g : e->generators())
    if (g.degree == 0) im[g.name] = Poly::of(g);
  return DGMorphism(e, h0, im);
}

/// Sub-algebra on the first `count` generators in creation order (closed under d
/// for algebras built by extend_randomly).
inline AlgebraPtr prefix_subalgebra(const DGAlgebra& e, const std::string& prefix, int count) {
  std::vector<Symbol> gens;
  std::map<std::string, Poly> d;
  for (int i = 0; i < count; ++i) {
    const Symbol& s = e.symbol(prefix + std::to_string(i));
    gens.push_back(s);
    if (!e.d_of(s.name).is_zero()) d[s.name] = e.d_of(s.name);
  }
  return make_algebra(gens, d);
}

struct Square {
  DGMorphism i, g, alpha, beta;
};

/// i: A -> E random semifree extension, g: C -> H⁰(E) a Tate resolution,
/// β: E -> H⁰(E) the projection and α: A -> C a lift of β restricted to A.
inline Square trivial_fibration_square(std::mt19937& rng, int weight_bound = 3) {
  DGAlgebra e = random_semifree(rng, 3, -2, 3);
  auto ep = std::make_shared<const DGAlgebra>(e);
  auto a = prefix_subalgebra(e, "g", 1 + static_cast<int>(rng() % 3));
  auto d = h0_presentation(e);
  auto k = make_algebra({});
  auto fact = tate_factorize(DGMorphism(k, d, {}), 3, weight_bound);
  DGMorphism beta = h0_projection(ep, d);
  DGMorphism i = DGMorphism::inclusion(a, ep);
  DGMorphism beta_a = compose(beta, i);
  DGMorphism alpha = lift_against_trivial_fibration(DGMorphism(k, a, {}), fact.projection,
                                                    DGMorphism(k, fact.middle, {}), beta_a, weight_bound);
  return {i, fact.projection, alpha, beta};
}

/// i: K -> K[x, dx] free pairs, g: C -> E a Tate resolution of a random
/// semifree E, β sends each x to a random element of E.
inline Square fibration_square(std::mt19937& rng, int weight_bound = 3) {
  auto e = std::make_shared<const DGAlgebra>(random_semifree(rng, 3, -2, 3));
  auto k = make_algebra({});
  auto fact = tate_factorize(DGMorphism(k, e, {}), 3, weight_bound);
  std::vector<Symbol> gens;
  std::map<std::string, Poly> d, beta_im;
  for (int j = 0; j < 2; ++j) {
    int deg = -1 - static_cast<int>(rng() % 2);
    int wt = 1 + static_cast<int>(rng() % 2);
    Symbol x{"x" + std::to_string(j), deg, wt}, dx{"dx" + std::to_string(j), deg + 1, wt};
    gens.push_back(x);
    gens.push_back(dx);
    d[x.name] = Poly::of(dx);
    Poly b = random_element(rng, *e, deg, wt);
    beta_im[x.name] = b;
    beta_im[dx.name] = e->d(b);
  }
  auto ax = make_algebra(gens, d);
  return {DGMorphism(k, ax, {}), fact.projection, DGMorphism(k, fact.middle, {}), DGMorphism(ax, e, beta_im)};
}

} // namespace fixtures
