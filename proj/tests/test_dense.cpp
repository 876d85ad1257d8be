#include <random>

#include <gtest/gtest.h>

#include "locgap/dense.hpp"
#include "locgap/entanglement.hpp"

using namespace locgap;

namespace {

std::vector<PauliTerm> random_terms(const Lattice& lat, int count, std::mt19937_64& rng,
                                    bool allow_y = true) {
  std::vector<PauliTerm> terms;
  std::uniform_real_distribution<double> coeff(-1, 1);
  for (int i = 0; i < count; ++i) {
    PauliOperator p(lat);
    for (int q = 0; q < lat.num_qubits(); ++q) {
      switch (rng() % 4) {
        case 0: break;
        case 1: p.set_x(q, true); break;
        case 2: p.set_z(q, true); break;
        case 3:
          if (allow_y) {
            p.set_x(q, true);
            p.set_z(q, true);
          }
          break;
      }
    }
    terms.push_back(PauliTerm::from_pauli(p, coeff(rng)));
  }
  return terms;
}

}  // namespace

// Matrix-free application agrees with the dense matrix entry for entry,
// including Y phases.
TEST(Dense, ApplyTermsMatchesDenseMatrix) {
  Lattice lat({3, 1, 1}, 2);  // 6 qubits
  std::mt19937_64 rng(61);
  auto terms = random_terms(lat, 5, rng, /*allow_y=*/true);
  const Eigen::Index dim = 1ll << lat.num_qubits();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : terms)
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double sign =
          (__builtin_popcountll(static_cast<std::uint64_t>(i) & t.z_mask) & 1) ? -1.0 : 1.0;
      h(i ^ static_cast<Eigen::Index>(t.x_mask), i) += t.amp * sign;
    }
  // Terms built from Hermitian Paulis give a Hermitian sum.
  EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  VectorXcd v(dim);
  std::normal_distribution<double> g;
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(g(rng), g(rng));
  VectorXcd out;
  apply_terms(terms, v, out);
  EXPECT_LT((out - h * v).norm(), 1e-12);
}

TEST(Dense, EigensolveTwoLevel) {
  MatrixXd h(2, 2);
  h << 1, 2, 2, 1;
  auto sys = eigensolve_sym(h);
  EXPECT_NEAR(sys.evals[0], -1.0, 1e-12);
  EXPECT_NEAR(sys.evals[1], 3.0, 1e-12);
  MatrixXd recon = sys.evecs * sys.evals.asDiagonal() * sys.evecs.transpose();
  EXPECT_LT((recon - h).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dense, EigensolveRejectsAsymmetry) {
  MatrixXd h(2, 2);
  h << 0, 1e-6, 0, 0;
  EXPECT_THROW(eigensolve_sym(h), std::invalid_argument);
}

TEST(Dense, StabilizerStateSatisfiesGenerators) {
  auto m = build_model_cubic(ModelName::toric_code_2d, 2);
  SyndromeMap map(m);
  auto logicals = map.logical_basis();
  std::vector<PauliTerm> terms;
  std::vector<bool> signs;
  for (int s = 0; s < m.lattice().volume(); ++s)
    for (int t = 0; t < 2; ++t) {
      terms.push_back(PauliTerm::from_pauli(m.generator_at(s, t), 1.0));
      signs.push_back(false);
    }
  for (const auto& z : logicals.z_ops) {
    terms.push_back(PauliTerm::from_pauli(z, 1.0));
    signs.push_back(true);
  }
  VectorXd psi = stabilizer_state_dense(terms, signs, 8);
  VectorXd gp(psi.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    apply_terms_real({terms[k]}, psi, gp);
    EXPECT_LT((gp - (signs[k] ? -1.0 : 1.0) * psi).norm(), 1e-10);
  }
}

TEST(Dense, InconsistentSectorRejected) {
  // Z0 = -1 and Z0 = +1 cannot hold at once.
  Lattice lat({2, 1, 1}, 1);
  auto z = PauliTerm::from_pauli(PauliOperator::single(lat, 0, Pauli::Z), 1.0);
  EXPECT_THROW(stabilizer_state_dense({z, z}, {false, true}, 2), std::invalid_argument);
}

// The GF(2) rank formula reproduces the dense partial-trace entropy for
// excited eigenstates of the 8-qubit toric code, across random regions,
// sectors, and excitations.
TEST(Dense, RankEntropyMatchesDenseEntropy) {
  auto m = build_model_cubic(ModelName::toric_code_2d, 2);
  SyndromeMap map(m);
  auto logicals = map.logical_basis();
  const int n = m.lattice().num_qubits();
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 8; ++trial) {
    PauliOperator excitation(m.lattice());
    for (int q = 0; q < n; ++q) {
      if (rng() & 1) excitation.set_x(q, true);
      if (rng() & 1) excitation.set_z(q, true);
    }
    std::vector<bool> sector = {static_cast<bool>(rng() & 1), static_cast<bool>(rng() & 1)};

    StabilizerEigenstate gf2_state(map, excitation, sector);

    std::vector<PauliTerm> terms;
    std::vector<bool> signs;
    for (std::size_t i = 0; i < gf2_state.generators().size(); ++i) {
      terms.push_back(PauliTerm::from_pauli(gf2_state.generators()[i], 1.0));
      signs.push_back(gf2_state.signs()[i]);
    }
    VectorXd psi = stabilizer_state_dense(terms, signs, n, 100 + trial);
    VectorXcd psic = psi.cast<Complex>();

    for (int reg = 0; reg < 6; ++reg) {
      Region r;
      for (int q = 0; q < n; ++q)
        if (rng() & 1) r.qubits.push_back(q);
      if (r.qubits.empty()) continue;
      const double dense = state_entropy_bits(psic, r.qubits, n);
      EXPECT_NEAR(dense, gf2_state.entropy_bits(r), 1e-10);
    }
  }
}

// A definite-configuration stabilizer state has exactly 2^{S0} equal
// Schmidt coefficients; superposing c configurations that differ inside M
// raises the rank by at most a factor c.
TEST(Dense, SchmidtRankBounds) {
  auto m = build_model_cubic(ModelName::toric_code_2d, 2);
  SyndromeMap map(m);
  const int n = m.lattice().num_qubits();
  auto logicals = map.logical_basis();
  std::vector<PauliTerm> terms;
  std::vector<bool> signs;
  for (int s = 0; s < m.lattice().volume(); ++s)
    for (int t = 0; t < 2; ++t) {
      terms.push_back(PauliTerm::from_pauli(m.generator_at(s, t), 1.0));
      signs.push_back(false);
    }
  for (const auto& z : logicals.z_ops) {
    terms.push_back(PauliTerm::from_pauli(z, 1.0));
    signs.push_back(false);
  }
  VectorXd ground = stabilizer_state_dense(terms, signs, n);

  std::vector<int> region = {0, 1, 2};
  StabilizerEigenstate gf2_state(map, PauliOperator::identity(m.lattice()), {false, false});
  const int s0 = gf2_state.entropy_bits(Region{region});
  VectorXcd groundc = ground.cast<Complex>();
  EXPECT_EQ(schmidt_rank(groundc, region, n), 1 << s0);

  // Excite inside the region and superpose.
  auto p = PauliTerm::from_pauli(PauliOperator::single(m.lattice(), 0, Pauli::X), 1.0);
  VectorXd excited(ground.size());
  apply_terms_real({p}, ground, excited);
  VectorXcd super = (groundc + excited.cast<Complex>()) / std::sqrt(2.0);
  EXPECT_LE(schmidt_rank(super, region, n), 2 * (1 << s0));
}

TEST(Dense, PartialTraceOfLocalOperator) {
  // A sigma-z on qubit 0 of three qubits: tracing onto {0} returns it,
  // tracing onto {1} returns zero.
  Lattice lat({3, 1, 1}, 1);
  auto z0 = PauliTerm::from_pauli(PauliOperator::single(lat, 0, Pauli::Z), 1.0);
  MatrixXd w = dense_matrix_real({z0}, 3);
  MatrixXd on0 = operator_partial_trace(w, {0}, 3);
  EXPECT_NEAR(on0(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(on0(1, 1), -1.0, 1e-14);
  MatrixXd on1 = operator_partial_trace(w, {1}, 3);
  EXPECT_LT(on1.cwiseAbs().maxCoeff(), 1e-14);
  // Embedding back reproduces the original.
  MatrixXd back = embed_operator(on0, {0}, {0, 1, 2});
  EXPECT_LT((back - w).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Dense, OperatorNormLanczos) {
  std::mt19937_64 rng(71);
  MatrixXd a = MatrixXd::Random(300, 300);
  MatrixXd h = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
  const double exact = std::max(std::abs(es.eigenvalues().minCoeff()),
                                std::abs(es.eigenvalues().maxCoeff()));
  const double lanczos =
      sym_operator_norm([&](const VectorXd& x, VectorXd& y) { y.noalias() = h * x; }, 300, 80);
  EXPECT_NEAR(lanczos, exact, 1e-8 * exact);
}
