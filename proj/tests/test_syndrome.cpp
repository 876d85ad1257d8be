#include <random>
#include <set>

#include <gtest/gtest.h>

#include "locgap/syndrome.hpp"

using namespace locgap;

namespace {

PauliOperator random_pauli(const Lattice& lat, std::mt19937_64& rng) {
  PauliOperator p(lat);
  for (int q = 0; q < lat.num_qubits(); ++q) {
    if (rng() & 1) p.set_x(q, true);
    if (rng() & 1) p.set_z(q, true);
  }
  return p;
}

}  // namespace

TEST(Syndrome, IdentityHasEmptySyndrome) {
  auto m = build_model_cubic(ModelName::cubic_code, 3);
  SyndromeMap map(m);
  auto c = map.syndrome(PauliOperator::identity(m.lattice()));
  EXPECT_EQ(c.total(), 0u);
}

// A single sigma-z excites exactly the four X-type generators incident on
// its qubit; for flavor 0 these sit at the site and the three negative
// double shifts.
TEST(Syndrome, SingleZMakesFourXDefects) {
  auto m = build_model_cubic(ModelName::cubic_code, 5);
  const Lattice& lat = m.lattice();
  SyndromeMap map(m);
  auto p = PauliOperator::single(lat, lat.qubit({0, 0, 0}, 0), Pauli::Z);
  auto c = map.syndrome(p);
  EXPECT_EQ(c.total(), 4u);
  EXPECT_EQ(c.count(0), 0u);  // no Z-type defects
  EXPECT_EQ(c.count(1), 4u);
  std::set<int> expected = {lat.site({0, 0, 0}), lat.site({0, -1, -1}), lat.site({-1, 0, -1}),
                            lat.site({-1, -1, 0})};
  std::set<int> got;
  for (auto [site, type] : c.defects()) {
    EXPECT_EQ(type, 1);
    got.insert(site);
  }
  EXPECT_EQ(got, expected);
}

TEST(Syndrome, SyndromeIsLinear) {
  auto m = build_model_cubic(ModelName::cubic_code, 3);
  SyndromeMap map(m);
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = random_pauli(m.lattice(), rng);
    auto q = random_pauli(m.lattice(), rng);
    auto lhs = map.syndrome(compose(p, q));
    auto rhs = map.syndrome(p);
    rhs ^= map.syndrome(q);
    EXPECT_EQ(lhs, rhs);
  }
}

// Every single-qubit Pauli flips an even number of defects of each type.
TEST(Syndrome, SingleQubitParityConservation) {
  auto m = build_model_cubic(ModelName::cubic_code, 3);
  SyndromeMap map(m);
  for (int q = 0; q < m.lattice().num_qubits(); ++q) {
    for (Pauli l : {Pauli::X, Pauli::Z}) {
      auto c = map.syndrome(PauliOperator::single(m.lattice(), q, l));
      EXPECT_EQ(c.count(0) % 2, 0u);
      EXPECT_EQ(c.count(1) % 2, 0u);
    }
  }
}

TEST(Syndrome, EmptyConfigurationValid) {
  auto m = build_model_cubic(ModelName::cubic_code, 3);
  SyndromeMap map(m);
  auto res = map.is_valid(DefectConfiguration::empty(m));
  ASSERT_TRUE(res.valid);
  EXPECT_TRUE(res.witness->is_identity());
}

TEST(Syndrome, SingleDefectInvalid) {
  auto m = build_model_cubic(ModelName::cubic_code, 3);
  SyndromeMap map(m);
  auto c = DefectConfiguration::empty(m);
  c.set(5, 1, true);
  auto res = map.is_valid(c);
  EXPECT_FALSE(res.valid);
  EXPECT_EQ(res.rank_augmented, res.rank + 1);
}

// At L = 3 every even-even configuration is valid; sweep all X-type pairs.
TEST(Syndrome, AllXTypePairsValidAtL3) {
  auto m = build_model_cubic(ModelName::cubic_code, 3);
  SyndromeMap map(m);
  const int V = m.lattice().volume();
  for (int a = 0; a < V; ++a) {
    for (int b = a + 1; b < V; ++b) {
      auto c = DefectConfiguration::empty(m);
      c.set(a, 1, true);
      c.set(b, 1, true);
      auto res = map.is_valid(c);
      ASSERT_TRUE(res.valid) << "pair " << a << "," << b;
      ASSERT_EQ(map.syndrome(*res.witness), c);
    }
  }
}

TEST(Syndrome, RandomPauliSyndromesAreValid) {
  auto m = build_model_cubic(ModelName::toric_code_2d, 3);
  SyndromeMap map(m);
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    auto p = random_pauli(m.lattice(), rng);
    auto c = map.syndrome(p);
    auto res = map.is_valid(c);
    ASSERT_TRUE(res.valid);
    EXPECT_EQ(map.syndrome(*res.witness), c);
  }
}

TEST(Syndrome, Degeneracy) {
  EXPECT_EQ(SyndromeMap(build_model_cubic(ModelName::cubic_code, 3)).encoded_qubits(), 2);
  EXPECT_EQ(SyndromeMap(build_model_cubic(ModelName::toric_code_2d, 4)).encoded_qubits(), 2);
  EXPECT_EQ(SyndromeMap(build_model_cubic(ModelName::ising_chain, 8)).encoded_qubits(), 0);
}

// The toric code's only generator redundancies are the two global products.
TEST(Syndrome, ToricRedundancyHandCount) {
  auto m = build_model_cubic(ModelName::toric_code_2d, 4);
  auto star_product = PauliOperator::identity(m.lattice());
  auto plaq_product = PauliOperator::identity(m.lattice());
  for (int s = 0; s < m.lattice().volume(); ++s) {
    star_product *= m.generator_at(s, 0);
    plaq_product *= m.generator_at(s, 1);
  }
  EXPECT_TRUE(star_product.is_identity());
  EXPECT_TRUE(plaq_product.is_identity());
  SyndromeMap map(m);
  EXPECT_EQ(map.stabilizer_rank(), static_cast<std::size_t>(m.num_generators() - 2));
}

TEST(Syndrome, DegeneracyInvariantUnderRowPermutation) {
  auto m = build_model_cubic(ModelName::cubic_code, 3);
  SyndromeMap map(m);
  std::mt19937_64 rng(23);
  std::vector<std::size_t> perm(map.matrix().rows());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  EXPECT_EQ(map.matrix().rank(), map.matrix().select_rows(perm).rank());
}

TEST(Syndrome, LogicalBasisStructure) {
  for (auto name : {ModelName::cubic_code, ModelName::toric_code_2d}) {
    auto m = build_model_cubic(name, name == ModelName::cubic_code ? 3 : 4);
    SyndromeMap map(m);
    auto basis = map.logical_basis();
    ASSERT_EQ(basis.k(), map.encoded_qubits());
    auto gens = m.all_generators();
    for (int i = 0; i < basis.k(); ++i) {
      // Hyperbolic pairing: X_i and Z_i anticommute, everything else commutes.
      EXPECT_FALSE(commutes(basis.x_ops[i], basis.z_ops[i]));
      for (int j = 0; j < basis.k(); ++j) {
        if (i != j) {
          EXPECT_TRUE(commutes(basis.x_ops[i], basis.z_ops[j]));
          EXPECT_TRUE(commutes(basis.x_ops[i], basis.x_ops[j]));
          EXPECT_TRUE(commutes(basis.z_ops[i], basis.z_ops[j]));
        }
      }
      for (const auto& g : gens) {
        EXPECT_TRUE(commutes(basis.x_ops[i], g));
        EXPECT_TRUE(commutes(basis.z_ops[i], g));
      }
    }
  }
}

TEST(Syndrome, EnergyAccounting) {
  auto m = build_model_cubic(ModelName::cubic_code, 3);
  SyndromeMap map(m);
  auto p = PauliOperator::single(m.lattice(), 0, Pauli::Z);
  auto c = map.syndrome(p);
  EXPECT_DOUBLE_EQ(c.energy_above_ground(1.0), 8.0);  // 4 defects, 2J each
  EXPECT_DOUBLE_EQ(c.energy_above_ground(2.5), 20.0);
}
