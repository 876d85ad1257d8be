#include <random>

#include <gtest/gtest.h>

#include "locgap/entanglement.hpp"

using namespace locgap;

namespace {

Region random_region(const Lattice& lat, std::mt19937_64& rng) {
  Region r;
  for (int q = 0; q < lat.num_qubits(); ++q)
    if (rng() & 1) r.qubits.push_back(q);
  return r;
}

PauliOperator random_pauli(const Lattice& lat, std::mt19937_64& rng) {
  PauliOperator p(lat);
  for (int q = 0; q < lat.num_qubits(); ++q) {
    if (rng() & 1) p.set_x(q, true);
    if (rng() & 1) p.set_z(q, true);
  }
  return p;
}

}  // namespace

TEST(Entanglement, EmptyRegionZero) {
  auto m = build_model_cubic(ModelName::toric_code_2d, 3);
  SyndromeMap map(m);
  StabilizerEigenstate state(map, PauliOperator::identity(m.lattice()), {false, false});
  EXPECT_EQ(state.entropy_bits(Region{}), 0);
}

// Pauli excitations only flip generator signs, so every region entropy
// matches the ground state's.
TEST(Entanglement, ExcitationsMatchGroundStateEntropy) {
  auto m = build_model_cubic(ModelName::cubic_code, 4);
  SyndromeMap map(m);
  std::vector<bool> sector(map.encoded_qubits(), false);
  StabilizerEigenstate ground(map, PauliOperator::identity(m.lattice()), sector);
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    StabilizerEigenstate excited(map, random_pauli(m.lattice(), rng), sector);
    for (int reg = 0; reg < 5; ++reg) {
      Region r = random_region(m.lattice(), rng);
      EXPECT_EQ(excited.entropy_bits(r), ground.entropy_bits(r));
    }
  }
}

// Purity: S(M) == S(complement of M).
TEST(Entanglement, PureStateSymmetry) {
  auto m = build_model_cubic(ModelName::toric_code_2d, 4);
  SyndromeMap map(m);
  std::vector<bool> sector(map.encoded_qubits(), true);
  StabilizerEigenstate state(map, PauliOperator::identity(m.lattice()), sector);
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    Region r = random_region(m.lattice(), rng);
    EXPECT_EQ(state.entropy_bits(r), state.entropy_bits(r.complement(m.lattice())));
  }
}

// Degenerate ground states are locally identical: for a contractible box
// the entropy does not depend on the sector label.
TEST(Entanglement, SectorsLookAlikeLocally) {
  auto m = build_model_cubic(ModelName::toric_code_2d, 4);
  SyndromeMap map(m);
  Region box = Region::box(m.lattice(), {0, 0, 0}, {2, 2, 1});
  std::vector<int> entropies;
  for (int sector = 0; sector < 4; ++sector) {
    StabilizerEigenstate state(map, PauliOperator::identity(m.lattice()),
                               {static_cast<bool>(sector & 1), static_cast<bool>(sector & 2)});
    entropies.push_back(state.entropy_bits(box));
  }
  for (int s : entropies) EXPECT_EQ(s, entropies[0]);
}

// Boundary-area scaling on cubic boxes of side 1, 2, 3 at L = 6: entropy
// per boundary site (the a^3 - (a-2)^3 shell) stays within a factor of two,
// while the per-volume density falls strictly. The measured values follow
// S(a) = 6a(a-1) + 2, an area law with edge corrections.
TEST(Entanglement, AreaLawWitness) {
  auto m = build_model_cubic(ModelName::cubic_code, 6);
  SyndromeMap map(m);
  std::vector<bool> sector(map.encoded_qubits(), false);
  StabilizerEigenstate state(map, PauliOperator::identity(m.lattice()), sector);
  std::vector<double> per_area, per_volume;
  for (int a = 1; a <= 3; ++a) {
    Region r = Region::box(m.lattice(), {0, 0, 0}, {a, a, a});
    int s = state.entropy_bits(r);
    ASSERT_GT(s, 0);
    EXPECT_EQ(s, 6 * a * (a - 1) + 2);
    int volume = a * a * a;
    int interior = std::max(0, (a - 2) * (a - 2) * (a - 2));
    per_area.push_back(static_cast<double>(s) / (volume - interior));
    per_volume.push_back(static_cast<double>(s) / volume);
  }
  double lo = *std::min_element(per_area.begin(), per_area.end());
  double hi = *std::max_element(per_area.begin(), per_area.end());
  EXPECT_LE(hi / lo, 2.0);
  EXPECT_LT(per_volume[2], per_volume[1]);
  EXPECT_LT(per_volume[1], per_volume[0]);
}

TEST(Entanglement, SectorLabelValidated) {
  auto m = build_model_cubic(ModelName::toric_code_2d, 3);
  SyndromeMap map(m);
  EXPECT_THROW(StabilizerEigenstate(map, PauliOperator::identity(m.lattice()), {false}),
               std::invalid_argument);
}
