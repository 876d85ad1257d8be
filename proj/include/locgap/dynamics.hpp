#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "locgap/entanglement.hpp"
#include "locgap/flow.hpp"

namespace locgap {

/*
 * Orthonormal basis of the unperturbed m-defect band: one column per
 * (valid defect configuration, topological sector). Column q is
 * P_q |ground, sector>, with P_q a syndrome witness; distinct
 * configurations and sectors are exactly orthogonal.
 */
struct BandBasis {
  MatrixXd columns;
  std::vector<DefectConfiguration> configs;
  std::vector<std::pair<int, int>> labels;  // (config index, sector index)
  int k = 0;
  double energy = 0;  // unperturbed band energy
};

namespace detail {

inline void enumerate_combinations(int n, int m, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(m);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == m) {
      fn(idx);
      return;
    }
    for (int i = start; i < n; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

}  // namespace detail

inline BandBasis build_band_basis(const SyndromeMap& map, int m_defects,
                                  std::uint64_t seed = 77) {
  const StabilizerModel& model = map.model();
  const Lattice& lat = model.lattice();
  const int n = lat.num_qubits();
  if (n > 13) throw std::invalid_argument("build_band_basis: dense band basis capped at 13 qubits");

  BandBasis band;
  band.k = map.encoded_qubits();
  band.energy = -model.coupling() * model.num_generators() +
                2.0 * model.coupling() * m_defects;

  // Valid m-defect configurations with witnesses.
  std::vector<PauliOperator> witnesses;
  detail::enumerate_combinations(model.num_generators(), m_defects, [&](const std::vector<int>& idx) {
    auto c = DefectConfiguration::empty(model);
    for (int i : idx) c.set(model.generator_site(i), model.generator_type(i), true);
    auto res = map.is_valid(c);
    if (!res.valid) return;
    band.configs.push_back(c);
    witnesses.push_back(*res.witness);
  });
  if (band.configs.empty())
    throw std::runtime_error("build_band_basis: no valid configurations with m = " +
                             std::to_string(m_defects));

  // One dense ground state per topological sector.
  LogicalBasis logicals = map.logical_basis();
  std::vector<PauliTerm> gen_terms;
  for (int s = 0; s < lat.volume(); ++s)
    for (int t = 0; t < model.num_generator_types(); ++t)
      gen_terms.push_back(PauliTerm::from_pauli(model.generator_at(s, t), 1.0));
  const int sectors = 1 << band.k;
  std::vector<VectorXd> ground(sectors);
  for (int sec = 0; sec < sectors; ++sec) {
    std::vector<PauliTerm> terms = gen_terms;
    std::vector<bool> signs(gen_terms.size(), false);
    for (int i = 0; i < band.k; ++i) {
      terms.push_back(PauliTerm::from_pauli(logicals.z_ops[i], 1.0));
      signs.push_back((sec >> i) & 1);
    }
    ground[sec] = stabilizer_state_dense(terms, signs, n, seed + sec);
  }

  const Eigen::Index dim = 1ll << n;
  band.columns.resize(dim, static_cast<Eigen::Index>(band.configs.size()) * sectors);
  Eigen::Index col = 0;
  VectorXd tmp(dim);
  for (std::size_t c = 0; c < band.configs.size(); ++c) {
    // Phases are irrelevant for the subspace: apply X^x Z^z, not the
    // Hermitian Pauli (they differ by i^|Y|).
    PauliTerm w = PauliTerm::from_pauli(witnesses[c], 1.0);
    w.amp = 1.0;
    for (int sec = 0; sec < sectors; ++sec) {
      apply_terms_real({w}, ground[sec], tmp);
      band.columns.col(col) = tmp;
      band.labels.emplace_back(static_cast<int>(c), sec);
      ++col;
    }
  }

  // Distinct syndrome or sector labels make the columns exactly orthogonal;
  // verify and polish away roundoff.
  MatrixXd gram = gemm(band.columns, band.columns, true, false);
  const double defect = (gram - MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (defect > 1e-10)
    throw std::logic_error("build_band_basis: basis not orthonormal, defect " +
                           std::to_string(defect));
  return band;
}

/*
 * Off-diagonal structure of H_s in a flowed band basis. g_sum is
 * sum_{q != ref} |<q~|H_s|ref~>|; q_norm is ||P(Q - H_s)P|| for the
 * truncation Q that zeroes the ref row/column off-diagonals, which equals
 * the 2-norm of that off-diagonal vector.
 */
struct OffdiagonalResult {
  double g_sum = 0;
  double q_norm = 0;
  double band_leak = 0;  // max column norm of (1 - P) H_s P
  VectorXd offdiag_abs;
  MatrixXd band_matrix;
};

inline OffdiagonalResult offdiagonal_sum(const DenseInstance& inst, double s,
                                         const MatrixXd& flowed_basis, int ref_col) {
  OffdiagonalResult out;
  MatrixXd hb = apply_terms_matrix(inst.hs_terms(s), flowed_basis);
  out.band_matrix = gemm(flowed_basis, hb, true, false);
  const Eigen::Index nb = out.band_matrix.cols();
  if (ref_col < 0 || ref_col >= nb) throw std::out_of_range("offdiagonal_sum: reference column");
  out.offdiag_abs.resize(nb);
  double sq = 0;
  for (Eigen::Index q = 0; q < nb; ++q) {
    const double v = (q == ref_col) ? 0.0 : std::abs(out.band_matrix(q, ref_col));
    out.offdiag_abs[q] = v;
    out.g_sum += v;
    sq += v * v;
  }
  out.q_norm = std::sqrt(sq);
  MatrixXd residual = hb - gemm(flowed_basis, out.band_matrix);
  out.band_leak = residual.colwise().norm().maxCoeff();
  return out;
}

/* |<psi| exp(-itH_s) |psi>| over a time grid, by spectral decomposition. */
inline std::vector<double> survival_series(const EigenSystem& eig, const VectorXd& psi,
                                           const std::vector<double>& t_grid) {
  VectorXd w = eig.evecs.transpose() * psi;
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    Complex acc(0, 0);
    for (Eigen::Index i = 0; i < w.size(); ++i)
      acc += w[i] * w[i] * std::exp(Complex(0, -t * eig.evals[i]));
    out.push_back(std::abs(acc));
  }
  return out;
}

/*
 * Integrals of motion: I_j(s) = U_s h_j U_s^T for a local term h_j of H0.
 * Reports the projected commutator norms over the flowed localized basis
 * and over the exact band subspace, and the drift series of <I_j> for a
 * state in the exact band, whose pointwise bound
 *   |<I_j>(t) - <I_j>(0)| <= t * ||P [H_s, I_j] P||
 * is rigorous because the band projector commutes with exp(-itH_s).
 */
struct IomResult {
  double comm_norm_loc = 0;    // over the flowed localized basis
  double comm_norm_band = 0;   // over the exact band eigenbasis
  double i_op_norm = 0;
  std::vector<double> t_grid;
  std::vector<double> expectation;  // <I_j>(t)
  std::vector<double> bound;        // <I_j>(0) +- t * comm_norm_band envelope half-width
};

inline IomResult iom_drift(const DenseInstance& inst, double s, const MatrixXd& u,
                           const EigenSystem& eig_s, const MatrixXd& band_exact,
                           const MatrixXd& basis0_loc, int term_index,
                           const std::vector<double>& t_grid, std::uint64_t seed = 99) {
  if (term_index < 0 || term_index >= static_cast<int>(inst.h0_terms.size()))
    throw std::out_of_range("iom_drift: H0 term index");
  IomResult out;
  out.t_grid = t_grid;
  const PauliTerm hj = inst.h0_terms[term_index];
  out.i_op_norm = std::abs(hj.amp);
  auto hs_terms = inst.hs_terms(s);

  // Flowed localized basis: B = U B0, I_j B = U (h_j B0).
  MatrixXd b_loc = gemm(u, basis0_loc);
  MatrixXd hb = apply_terms_matrix(hs_terms, b_loc);
  MatrixXd ijb = gemm(u, apply_terms_matrix({hj}, basis0_loc));
  MatrixXd m_comm = gemm(hb, ijb, true, false) - gemm(ijb, hb, true, false);
  {
    Eigen::JacobiSVD<MatrixXd> svd(m_comm);
    out.comm_norm_loc = svd.singularValues().size() ? svd.singularValues().maxCoeff() : 0.0;
  }

  // Exact band version: I_j B_ex = U h_j U^T B_ex.
  MatrixXd hb_ex = apply_terms_matrix(hs_terms, band_exact);
  MatrixXd ijb_ex = gemm(u, apply_terms_matrix({hj}, gemm(u, band_exact, true, false)));
  MatrixXd m_ex = gemm(hb_ex, ijb_ex, true, false) - gemm(ijb_ex, hb_ex, true, false);
  {
    Eigen::JacobiSVD<MatrixXd> svd(m_ex);
    out.comm_norm_band = svd.singularValues().size() ? svd.singularValues().maxCoeff() : 0.0;
  }

  // Drift of <I_j> for a random normalized state in the exact band.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  VectorXd coeff(band_exact.cols());
  for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff[i] = g(rng);
  VectorXd psi0 = band_exact * coeff;
  psi0.normalize();

  auto expect_i = [&](const VectorXcd& psi) {
    VectorXcd w = apply_real_matrix(u, psi, true);
    VectorXcd hw(w.size());
    apply_terms(std::vector<PauliTerm>{hj}, w, hw);
    VectorXcd iw = apply_real_matrix(u, hw, false);
    return std::real(psi.dot(iw));
  };

  VectorXcd psi0c = psi0.cast<Complex>();
  const double i0 = expect_i(psi0c);
  for (double t : t_grid) {
    VectorXcd psit = evolve_dense(eig_s, psi0c, t);
    out.expectation.push_back(expect_i(psit));
    out.bound.push_back(t * out.comm_norm_band);
  }
  out.expectation.insert(out.expectation.begin(), i0);
  out.bound.insert(out.bound.begin(), 0.0);
  out.t_grid.insert(out.t_grid.begin(), 0.0);
  return out;
}

/*
 * Schmidt-rank bound check for band superpositions: sample states that are
 * superpositions of at most `spread` defect-configuration basis states in
 * the unperturbed m-defect band, measure their Schmidt rank across region M
 * densely, and compare with (Vol M)^m * 2^{S0}, where S0 is the ground
 * state entropy of M and Vol M its site count. Single basis states have
 * rank exactly 2^{S0}.
 */
struct SchmidtRankCheck {
  int max_observed_rank = 0;
  long long bound = 0;
  int single_state_rank = 0;
  int s0 = 0;
};

inline SchmidtRankCheck schmidt_rank_bound_check(const SyndromeMap& map, const BandBasis& band,
                                                 int m_defects, const Region& region,
                                                 int samples = 8, int spread = 3,
                                                 std::uint64_t seed = 31) {
  const StabilizerModel& model = map.model();
  const int n = model.lattice().num_qubits();
  SchmidtRankCheck out;
  StabilizerEigenstate ground(map, PauliOperator::identity(model.lattice()),
                              std::vector<bool>(map.encoded_qubits(), false));
  out.s0 = ground.entropy_bits(region);
  long long vol_m = static_cast<long long>(region.qubits.size()) / model.lattice().qubits_per_site;
  out.bound = 1ll << out.s0;
  for (int i = 0; i < m_defects; ++i) out.bound *= std::max(1ll, vol_m);

  out.single_state_rank =
      schmidt_rank(band.columns.col(0).cast<Complex>(), region.qubits, n);
  out.max_observed_rank = out.single_state_rank;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < samples; ++trial) {
    VectorXcd psi = VectorXcd::Zero(band.columns.rows());
    const int terms = 1 + static_cast<int>(rng() % spread);
    for (int t = 0; t < terms; ++t)
      psi += Complex(g(rng), g(rng)) *
             band.columns.col(rng() % band.columns.cols()).cast<Complex>();
    const double norm = psi.norm();
    if (norm < 1e-9) continue;
    psi /= norm;
    out.max_observed_rank =
        std::max(out.max_observed_rank, schmidt_rank(psi, region.qubits, n));
  }
  return out;
}

/* Exact band eigenbasis columns whose cluster best overlaps a reference
 * subspace; refuses ambiguous identifications. */
inline MatrixXd match_band(const EigenSystem& eig, const BandClustering& clusters,
                           const MatrixXd& reference, double min_capture = 0.999) {
  double best = -1;
  int best_c = -1;
  for (int c = 0; c < clusters.size(); ++c) {
    const auto [b, e] = clusters.ranges[c];
    MatrixXd overlap = gemm(eig.evecs.middleCols(b, e - b), reference, true, false);
    const double captured = overlap.squaredNorm() / static_cast<double>(reference.cols());
    if (captured > best) {
      best = captured;
      best_c = c;
    }
  }
  if (best < min_capture)
    throw std::runtime_error("match_band: band identification ambiguous (best capture " +
                             std::to_string(best) + ")");
  const auto [b, e] = clusters.ranges[best_c];
  return eig.evecs.middleCols(b, e - b);
}

}  // namespace locgap
