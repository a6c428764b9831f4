#include <gtest/gtest.h>

#include <random>

#include "tatekit/gradedalg.hpp"

using namespace tatekit;

namespace {

const Symbol x{"x", 0, 1}, y{"y", 0, 1}, z{"z", 0, 2};
const Symbol a{"a", -1, 1}, b{"b", -1, 2}, T{"T", -1, 2}, U{"U", -2, 3};

Poly random_homogeneous(std::mt19937& rng, const std::vector<Symbol>& gens, int deg, int wt) {
  Poly p;
  for (const auto& m : slice_basis(gens, deg, wt))
    if (rng() % 2) p.add_term(m, Rational(static_cast<int>(rng() % 5) - 2));
  return p;
}

} // namespace

TEST(Multiply, OddGeneratorsAnticommute) {
  Poly ab = multiply(Poly::of(a), Poly::of(b));
  Poly ba = multiply(Poly::of(b), Poly::of(a));
  EXPECT_FALSE(ab.is_zero());
  EXPECT_EQ(ab, -ba);
}

TEST(Multiply, OddSquareVanishes) {
  EXPECT_TRUE(multiply(Poly::of(a), Poly::of(a)).is_zero());
}

TEST(Multiply, EvenIsOrdinaryPolynomialRing) {
  Poly px = Poly::of(x), py = Poly::of(y);
  EXPECT_EQ(multiply(px + py, px - py), Poly::of(x, 2) - Poly::of(y, 2));
}

TEST(Multiply, MismatchedGradingsRejected) {
  Symbol x_odd{"x", -1, 1};
  EXPECT_THROW(multiply(Poly::of(x), Poly::of(x_odd)), InputError);
}

TEST(SliceBasis, Examples) {
  auto s1 = slice_basis({x}, 0, 3);
  ASSERT_EQ(s1.size(), 1u);
  EXPECT_EQ(s1[0], Monomial::of(x, 3));

  EXPECT_EQ(slice_basis({x, y}, 0, 2).size(), 3u);
}

TEST(SliceBasis, ExhaustiveOracle) {
  // Enumerate exponent vectors (ex, ey, eT) with eT <= 1 directly.
  std::vector<Symbol> gens{x, y, T};
  auto basis = slice_basis(gens, -1, 3);
  std::vector<Monomial> oracle;
  for (int ex = 0; ex <= 3; ++ex)
    for (int ey = 0; ey <= 3; ++ey)
      for (int et = 0; et <= 1; ++et)
        if (-et == -1 && ex + ey + 2 * et == 3) {
          Poly p = Poly::of(x, ex) * Poly::of(y, ey) * Poly::of(T, et);
          oracle.push_back(p.terms().begin()->first);
        }
  std::sort(oracle.begin(), oracle.end());
  EXPECT_EQ(basis, oracle);
  ASSERT_EQ(basis.size(), 2u);
  EXPECT_EQ(Poly::term(basis[0], 1).str(), "x*T");
  EXPECT_EQ(Poly::term(basis[1], 1).str(), "y*T");
}

TEST(Property, GradedCommutativity) {
  std::mt19937 rng(21);
  std::vector<Symbol> gens{x, y, z, a, b, U};
  for (int trial = 0; trial < 100; ++trial) {
    int d1 = -static_cast<int>(rng() % 3), d2 = -static_cast<int>(rng() % 3);
    int w1 = 1 + rng() % 4, w2 = 1 + rng() % 4;
    Poly p = random_homogeneous(rng, gens, d1, w1), q = random_homogeneous(rng, gens, d2, w2);
    Poly pq = multiply(p, q), qp = multiply(q, p);
    EXPECT_EQ(pq, qp * Rational((d1 * d2) % 2 ? -1 : 1));
  }
}

TEST(Property, Associativity) {
  std::mt19937 rng(22);
  std::vector<Symbol> gens{x, y, a, b, U};
  for (int trial = 0; trial < 100; ++trial) {
    Poly p = random_homogeneous(rng, gens, -static_cast<int>(rng() % 2), 1 + rng() % 3);
    Poly q = random_homogeneous(rng, gens, -static_cast<int>(rng() % 3), 1 + rng() % 3);
    Poly r = random_homogeneous(rng, gens, -static_cast<int>(rng() % 2), 1 + rng() % 3);
    EXPECT_EQ((p * q) * r, p * (q * r));
  }
}

TEST(Property, SliceProductsLandInSummedSlice) {
  std::vector<Symbol> gens{x, y, a, b, U};
  for (int d1 = -2; d1 <= 0; ++d1)
    for (int w1 = 0; w1 <= 3; ++w1)
      for (int d2 = -2; d2 <= 0; ++d2)
        for (int w2 = 0; w2 <= 3; ++w2)
          for (const auto& m1 : slice_basis(gens, d1, w1))
            for (const auto& m2 : slice_basis(gens, d2, w2)) {
              auto [sign, m] = Monomial::multiply(m1, m2);
              if (sign == 0) continue;
              EXPECT_EQ(m.degree(), d1 + d2);
              EXPECT_EQ(m.weight(), w1 + w2);
            }
}

TEST(Property, SliceSizeIndependentOfOrder) {
  std::vector<Symbol> g1{x, y, z, a, b, U};
  std::vector<Symbol> g2(g1.rbegin(), g1.rend());
  for (int d = -4; d <= 0; ++d)
    for (int w = 0; w <= 6; ++w) EXPECT_EQ(slice_basis(g1, d, w).size(), slice_basis(g2, d, w).size());
}
