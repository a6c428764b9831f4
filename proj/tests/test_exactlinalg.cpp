#include <gtest/gtest.h>

#include <random>

#include "tatekit/exactlinalg.hpp"

using namespace tatekit;

namespace {

SparseMatrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols) {
  std::uniform_int_distribution<int> val(-3, 3);
  std::bernoulli_distribution keep(0.5);
  SparseMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (keep(rng)) m.set(r, c, frac(val(rng), 1 + (val(rng) + 3) % 3));
  return m;
}

} // namespace

TEST(RankKernel, Identity) {
  auto rk = rank_kernel(SparseMatrix::identity(2));
  EXPECT_EQ(rk.rank, 2u);
  EXPECT_TRUE(rk.kernel_basis.empty());
}

TEST(RankKernel, RowOfOnes) {
  auto rk = rank_kernel(SparseMatrix::from_dense({{1, 1}}));
  EXPECT_EQ(rk.rank, 1u);
  ASSERT_EQ(rk.kernel_basis.size(), 1u);
  // unique up to scale; the canonical choice has a 1 on the free column
  EXPECT_EQ(rk.kernel_basis[0], (Vector{-1, 1}));
}

TEST(RankKernel, AllOnesThreeByThree) {
  // Hand reduction: one pivot row (1 1 1), free columns 1 and 2.
  auto m = SparseMatrix::from_dense({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  auto rk = rank_kernel(m);
  EXPECT_EQ(rk.rank, 1u);
  ASSERT_EQ(rk.kernel_basis.size(), 2u);
  EXPECT_EQ(rk.kernel_basis[0], (Vector{-1, 1, 0}));
  EXPECT_EQ(rk.kernel_basis[1], (Vector{-1, 0, 1}));
}

TEST(Solve, Identity) {
  Vector b{Rational(3), frac(-1, 2)};
  EXPECT_EQ(*solve(SparseMatrix::identity(2), b), b);
}

TEST(Solve, ZeroFreeVariables) {
  auto x = solve(SparseMatrix::from_dense({{1, 1}}), {1});
  ASSERT_TRUE(x);
  EXPECT_EQ(*x, (Vector{1, 0}));
}

TEST(Solve, Unsolvable) {
  EXPECT_FALSE(solve(SparseMatrix(2, 2), {1, 0}));
}

TEST(Solve, LengthMismatch) {
  EXPECT_THROW(solve(SparseMatrix::identity(2), {1}), InputError);
}

TEST(RationalParse, Canonical) {
  EXPECT_EQ(parse_rational("6/4"), frac(3, 2));
  EXPECT_EQ(parse_rational("-0/5"), Rational(0));
  EXPECT_THROW(parse_rational("1/0"), InputError);
  EXPECT_THROW(parse_rational("x"), InputError);
}

TEST(Property, RankNullity) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    auto m = random_matrix(rng, r, c);
    auto rk = rank_kernel(m);
    EXPECT_EQ(rk.rank + rk.kernel_basis.size(), c);
    for (const auto& v : rk.kernel_basis) EXPECT_TRUE(is_zero(m.apply(v)));
    EXPECT_EQ(span_rank(rk.kernel_basis, c), rk.kernel_basis.size());
    EXPECT_EQ(rank_kernel(m).kernel_basis, rk.kernel_basis);  // deterministic
  }
}

TEST(Property, SolveReproducesRhs) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    auto m = random_matrix(rng, r, c);
    Vector x0(c);
    for (auto& q : x0) q = Rational(static_cast<int>(rng() % 7) - 3);
    Vector b = m.apply(x0);
    auto x = solve(m, b);
    ASSERT_TRUE(x);
    EXPECT_EQ(m.apply(*x), b);
  }
}

TEST(Property, RankInvariantUnderRowPermutation) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t r = 2 + rng() % 5, c = 1 + rng() % 6;
    auto m = random_matrix(rng, r, c);
    std::vector<std::size_t> perm(r);
    for (std::size_t i = 0; i < r; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    SparseMatrix p(r, c);
    for (const auto& [rc, q] : m.entries()) p.set(perm[rc.first], rc.second, q);
    EXPECT_EQ(rank(m), rank(p));
  }
}
