#include <random>

#include <gtest/gtest.h>

#include "locgap/bitmatrix.hpp"
#include "locgap/pauli.hpp"
#include "naive_gf2.hpp"

using namespace locgap;

namespace {

PauliOperator random_pauli(const Lattice& lat, std::mt19937_64& rng) {
  PauliOperator p(lat);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int q = 0; q < lat.num_qubits(); ++q) {
    if (bit(rng)) p.set_x(q, true);
    if (bit(rng)) p.set_z(q, true);
  }
  return p;
}

}  // namespace

TEST(Pauli, ComposeIdentity) {
  Lattice lat({3, 3, 3}, 2);
  std::mt19937_64 rng(7);
  PauliOperator p = random_pauli(lat, rng);
  EXPECT_EQ(compose(p, PauliOperator::identity(lat)), p);
  EXPECT_TRUE(compose(p, p).is_identity());
}

TEST(Pauli, ComposeXZGivesY) {
  Lattice lat({4, 1, 1}, 1);
  auto x = PauliOperator::single(lat, 2, Pauli::X);
  auto z = PauliOperator::single(lat, 2, Pauli::Z);
  auto y = compose(x, z);
  EXPECT_TRUE(y.x_bit(2));
  EXPECT_TRUE(y.z_bit(2));
  EXPECT_EQ(y.weight(), 1u);
}

TEST(Pauli, CommutationSingleQubit) {
  Lattice lat({4, 1, 1}, 1);
  auto x = PauliOperator::single(lat, 1, Pauli::X);
  auto z1 = PauliOperator::single(lat, 1, Pauli::Z);
  auto z3 = PauliOperator::single(lat, 3, Pauli::Z);
  EXPECT_FALSE(commutes(x, z1));
  EXPECT_TRUE(commutes(x, z3));  // disjoint support
}

TEST(Pauli, MismatchedLatticesThrow) {
  Lattice a({3, 3, 3}, 1), b({4, 4, 4}, 1);
  EXPECT_THROW(compose(PauliOperator(a), PauliOperator(b)), std::invalid_argument);
  EXPECT_THROW(commutes(PauliOperator(a), PauliOperator(b)), std::invalid_argument);
}

TEST(Pauli, ComposeAssociativeCommutative) {
  Lattice lat({3, 3, 1}, 2);
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_pauli(lat, rng);
    auto b = random_pauli(lat, rng);
    auto c = random_pauli(lat, rng);
    EXPECT_EQ(compose(a, b), compose(b, a));
    EXPECT_EQ(compose(compose(a, b), c), compose(a, compose(b, c)));
  }
}

// Symplectic bilinearity: commutes(ab, c) == commutes(a,c) XNOR commutes(b,c).
TEST(Pauli, CommutationBilinearity) {
  Lattice lat({3, 3, 1}, 2);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_pauli(lat, rng);
    auto b = random_pauli(lat, rng);
    auto c = random_pauli(lat, rng);
    EXPECT_EQ(commutes(a, c), commutes(c, a));
    bool lhs = commutes(compose(a, b), c);
    bool rhs = !(commutes(a, c) ^ commutes(b, c));
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(BitMatrix, SolveIdentity) {
  std::mt19937_64 rng(3);
  auto m = BitMatrix::identity(40);
  BitVec b(40);
  for (int i = 0; i < 40; ++i) b.set(i, rng() & 1);
  auto sol = m.solve(b);
  ASSERT_TRUE(sol.feasible);
  EXPECT_EQ(sol.witness, b);
}

TEST(BitMatrix, SolveZeroMatrixInfeasible) {
  BitMatrix m(10, 12);
  BitVec b(10);
  b.set(4, true);
  auto sol = m.solve(b);
  EXPECT_FALSE(sol.feasible);
  EXPECT_EQ(sol.rank, 0u);
  EXPECT_EQ(sol.rank_augmented, 1u);
}

// Witnesses from random full-rank systems re-verify by multiplication.
TEST(BitMatrix, SolveRandomFullRankReMultiplies) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 5 + rng() % 60;
    BitMatrix m(0, 0);
    do {
      m = BitMatrix::random(n, n, rng);
    } while (m.rank() != n);
    BitVec b(n);
    for (std::size_t i = 0; i < n; ++i) b.set(i, rng() & 1);
    auto sol = m.solve(b);
    ASSERT_TRUE(sol.feasible);
    EXPECT_EQ(m.multiply(sol.witness), b);
  }
}

// Any feasible solve re-multiplies; any infeasible one has rank gap one.
TEST(BitMatrix, SolveRandomRectangular) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t rows = 1 + rng() % 40, cols = 1 + rng() % 40;
    auto m = BitMatrix::random(rows, cols, rng);
    BitVec b(rows);
    for (std::size_t i = 0; i < rows; ++i) b.set(i, rng() & 1);
    auto sol = m.solve(b);
    if (sol.feasible) {
      EXPECT_EQ(m.multiply(sol.witness), b);
      EXPECT_EQ(sol.rank_augmented, sol.rank);
    } else {
      EXPECT_EQ(sol.rank_augmented, sol.rank + 1);
    }
  }
}

TEST(BitMatrix, RankMatchesNaiveElimination) {
  std::mt19937_64 rng(29);
  for (std::size_t n : {1u, 7u, 64u, 65u, 130u, 200u}) {
    for (int trial = 0; trial < 3; ++trial) {
      auto m = BitMatrix::random(n, n, rng);
      naive::Matrix nm(n, std::vector<std::uint8_t>(n, 0));
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) nm[r][c] = m.get(r, c);
      EXPECT_EQ(static_cast<int>(m.rank()), naive::rank(nm)) << "n=" << n;
    }
  }
}

TEST(BitMatrix, RankInvariantUnderRowPermutation) {
  std::mt19937_64 rng(31);
  auto m = BitMatrix::random(50, 70, rng);
  std::vector<std::size_t> perm(50);
  for (std::size_t i = 0; i < 50; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  EXPECT_EQ(m.rank(), m.select_rows(perm).rank());
}

TEST(BitMatrix, NullspaceVectorsAnnihilate) {
  std::mt19937_64 rng(37);
  auto m = BitMatrix::random(20, 35, rng);
  auto basis = m.nullspace();
  EXPECT_EQ(basis.size(), 35 - m.rank());
  for (const auto& v : basis) EXPECT_FALSE(m.multiply(v).any());
}

TEST(Lattice, ChebyshevTorusDistance) {
  Lattice lat({5, 5, 5}, 1);
  EXPECT_EQ(lat.distance(lat.site({0, 0, 0}), lat.site({4, 0, 0})), 1);  // wraps
  EXPECT_EQ(lat.distance(lat.site({0, 0, 0}), lat.site({2, 2, 1})), 2);
  EXPECT_EQ(lat.max_distance(), 2);
  Lattice flat({6, 6, 1}, 1);
  EXPECT_EQ(flat.distance(flat.site({0, 0, 0}), flat.site({3, 5, 0})), 3);
  EXPECT_EQ(flat.min_used_dim(), 6);
}

TEST(Pauli, TranslationWrapsPeriodically) {
  Lattice lat({3, 4, 5}, 2);
  std::mt19937_64 rng(41);
  auto p = random_pauli(lat, rng);
  auto q = p.translated({3, 4, 5});  // full period
  EXPECT_EQ(p, q);
  auto r = p.translated({1, 2, 3}).translated({-1, -2, -3});
  EXPECT_EQ(p, r);
}
