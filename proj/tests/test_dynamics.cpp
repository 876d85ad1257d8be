#include <random>

#include <gtest/gtest.h>

#include "locgap/dynamics.hpp"

using namespace locgap;

namespace {

struct WenSetup {
  StabilizerModel model;
  SyndromeMap map;
  DenseInstance inst;

  explicit WenSetup(int lx, int ly)
      : model(build_model(ModelName::wen_plaquette, {lx, ly, 1})),
        map(model),
        inst(DenseInstance::make(model, uniform_field_terms(model.lattice(), 1.0, 1.0))) {}
};

}  // namespace

// On the 2x4 Wen model the two-defect band has one valid configuration per
// same-sublattice plaquette pair and four topological sectors each.
TEST(Dynamics, BandBasisStructure) {
  WenSetup w(2, 4);
  auto band = build_band_basis(w.map, 2);
  EXPECT_EQ(w.map.encoded_qubits(), 2);
  EXPECT_EQ(band.configs.size(), 12u);
  EXPECT_EQ(band.columns.cols(), 48);
  EXPECT_NEAR(band.energy, -4.0, 1e-12);

  // Columns are H0 eigenvectors at the band energy.
  MatrixXd hb = apply_terms_matrix(w.inst.h0_terms, band.columns);
  EXPECT_LT((hb - band.energy * band.columns).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Dynamics, OffdiagonalVanishesUnperturbed) {
  WenSetup w(2, 4);
  auto band = build_band_basis(w.map, 2);
  auto res = offdiagonal_sum(w.inst, 0.0, band.columns, 0);
  EXPECT_LT(res.g_sum, 1e-10);
  EXPECT_LT(res.q_norm, 1e-10);
  EXPECT_LT(res.band_leak, 1e-10);
}

TEST(Dynamics, SurvivalStartsAtOne) {
  WenSetup w(2, 4);
  auto eig = eigensolve_sym(w.inst.hs(0.05));
  VectorXd psi = VectorXd::Random(w.inst.dim());
  psi.normalize();
  auto series = survival_series(eig, psi, {0.0, 1.0});
  EXPECT_NEAR(series[0], 1.0, 1e-12);
  EXPECT_LE(series[1], 1.0 + 1e-12);
}

// The survival amplitude of a flowed band state obeys the truncation bound
// 1 - t ||P(Q - H_s)P|| at every sampled time.
TEST(Dynamics, SurvivalBoundHolds) {
  WenSetup w(2, 4);
  const double s = 0.05;
  auto band = build_band_basis(w.map, 2);
  FlowOptions opts;
  opts.n_steps = 8;
  opts.track_eigensystems = true;
  auto flow = flow_unitary(w.inst, s, opts);
  MatrixXd flowed = gemm(flow.u, band.columns);
  auto off = offdiagonal_sum(w.inst, s, flowed, 0);
  EXPECT_GT(off.g_sum, 0.0);

  VectorXd psi = flowed.col(0);
  std::vector<double> t_grid;
  for (int i = 1; i <= 20; ++i) t_grid.push_back(0.5 * i);
  auto surv = survival_series(flow.eig_s, psi, t_grid);
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    EXPECT_GE(surv[i], 1.0 - t_grid[i] * off.q_norm - 1e-6) << "t=" << t_grid[i];
}

TEST(Dynamics, IomUnperturbedIsExact) {
  WenSetup w(2, 4);
  auto band = build_band_basis(w.map, 2);
  auto eig = eigensolve_sym(w.inst.hs(0.0));
  auto clusters = BandClustering::from_evals(eig.evals, 0.4);
  MatrixXd band_exact = match_band(eig, clusters, band.columns);
  MatrixXd id = MatrixXd::Identity(w.inst.dim(), w.inst.dim());
  auto res = iom_drift(w.inst, 0.0, id, eig, band_exact, band.columns, 0, {1.0, 5.0, 10.0});
  EXPECT_LT(res.comm_norm_loc, 1e-10);
  EXPECT_LT(res.comm_norm_band, 1e-10);
  for (std::size_t i = 1; i < res.expectation.size(); ++i)
    EXPECT_NEAR(res.expectation[i], res.expectation[0], 1e-9);
}

// Perturbed integrals of motion: the drift of <I_j> stays below
// t * ||P [H_s, I_j] P|| pointwise for band states.
TEST(Dynamics, IomDriftBounded) {
  WenSetup w(2, 4);
  const double s = 0.05;
  auto band = build_band_basis(w.map, 2);
  FlowOptions opts;
  opts.n_steps = 8;
  opts.track_eigensystems = true;
  auto flow = flow_unitary(w.inst, s, opts);
  MatrixXd band_exact = match_band(flow.eig_s, flow.clusters_s, gemm(flow.u, band.columns));
  auto res = iom_drift(w.inst, s, flow.u, flow.eig_s, band_exact, band.columns, 0,
                       {1.0, 2.0, 5.0, 10.0});
  EXPECT_GT(res.comm_norm_band, 0.0);
  for (std::size_t i = 0; i < res.t_grid.size(); ++i) {
    const double drift = std::abs(res.expectation[i] - res.expectation[0]);
    EXPECT_LE(drift, res.t_grid[i] * res.comm_norm_band + 1e-6) << "t=" << res.t_grid[i];
  }
}

// An exact eigenstate of H_s keeps <I_j> constant.
TEST(Dynamics, IomEigenstateConstant) {
  WenSetup w(2, 4);
  const double s = 0.05;
  auto band = build_band_basis(w.map, 2);
  FlowOptions opts;
  opts.n_steps = 8;
  opts.track_eigensystems = true;
  auto flow = flow_unitary(w.inst, s, opts);
  // Hand iom_drift a single eigenvector as the "band": the sampled state
  // is then that eigenstate, and the expectation is frozen.
  MatrixXd single = flow.eig_s.evecs.col(3);
  auto res = iom_drift(w.inst, s, flow.u, flow.eig_s, single, band.columns, 0, {2.0, 7.0});
  for (std::size_t i = 1; i < res.expectation.size(); ++i)
    EXPECT_NEAR(res.expectation[i], res.expectation[0], 1e-9);
}

// Rank of a single band basis state is exactly 2^{S0}; sampled
// superpositions stay below the (Vol M)^m 2^{S0} bound.
TEST(Dynamics, SchmidtRankBoundCheck) {
  WenSetup w(2, 4);
  auto band = build_band_basis(w.map, 2);
  Region region = Region::box(w.model.lattice(), {0, 0, 0}, {2, 2, 1});
  auto check = schmidt_rank_bound_check(w.map, band, 2, region, 10, 3);
  EXPECT_EQ(check.single_state_rank, 1 << check.s0);
  EXPECT_LE(check.max_observed_rank, check.bound);
  EXPECT_GE(check.max_observed_rank, check.single_state_rank);
}

// Lanczos band edges agree with the dense eigensolve on the lowest bands.
TEST(Dynamics, SparseBandSpectrumMatchesDense) {
  WenSetup w(2, 4);
  auto dense_rows = band_spectrum(w.inst, {0.05}, 0.4);
  auto sparse_rows =
      band_spectrum_sparse(w.inst.h0_terms, w.inst.y_terms, w.inst.n_qubits, 0.05, 6, 0.4, 200);
  ASSERT_GE(sparse_rows.size(), 2u);
  EXPECT_NEAR(sparse_rows[0].e_min, dense_rows[0].e_min, 1e-8);
  EXPECT_NEAR(sparse_rows[0].e_max, dense_rows[0].e_max, 1e-8);
  EXPECT_NEAR(sparse_rows[1].e_min, dense_rows[1].e_min, 1e-8);
}

TEST(Dynamics, MatchBandRejectsJunkReference) {
  WenSetup w(2, 4);
  auto eig = eigensolve_sym(w.inst.hs(0.0));
  auto clusters = BandClustering::from_evals(eig.evals, 0.4);
  // A reference straddling two bands cannot be matched to any cluster.
  MatrixXd ref(w.inst.dim(), 2);
  ref.col(0) = (eig.evecs.col(0) + eig.evecs.col(w.inst.dim() - 1)).normalized();
  ref.col(1) = eig.evecs.col(1);
  EXPECT_THROW(match_band(eig, clusters, ref), std::runtime_error);
}
