#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "locgap/dense.hpp"
#include "locgap/krylov.hpp"

namespace locgap {

/*
 * Contiguous clusters of sorted eigenvalues separated by gaps above a
 * threshold; each cluster is a band subspace while the gaps persist.
 */
struct BandClustering {
  std::vector<std::pair<int, int>> ranges;  // [begin, end) into the sorted spectrum
  double min_intercluster_gap = 0;

  static BandClustering from_evals(const VectorXd& evals, double gap_threshold) {
    BandClustering c;
    const int n = static_cast<int>(evals.size());
    int begin = 0;
    c.min_intercluster_gap = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n; ++i) {
      if (i == n || evals[i] - evals[i - 1] > gap_threshold) {
        c.ranges.emplace_back(begin, i);
        if (i < n) c.min_intercluster_gap = std::min(c.min_intercluster_gap, evals[i] - evals[i - 1]);
        begin = i;
      }
    }
    if (c.ranges.size() < 2) c.min_intercluster_gap = 0;
    return c;
  }

  int cluster_of(int index) const {
    for (std::size_t c = 0; c < ranges.size(); ++c)
      if (index >= ranges[c].first && index < ranges[c].second) return static_cast<int>(c);
    throw std::out_of_range("BandClustering: index outside spectrum");
  }

  int size() const { return static_cast<int>(ranges.size()); }
};

/*
 * A Hamiltonian pair small enough for the dense Hilbert-space engine:
 * H_s = H0 + s Y, with H0 a stabilizer Hamiltonian (or any commuting
 * Pauli sum). Everything in this engine is real (the models and default
 * fields are Y-free), so flow unitaries are real orthogonal.
 */
struct DenseInstance {
  Lattice lattice;
  std::vector<PauliTerm> h0_terms;
  std::vector<PauliTerm> y_terms;
  int n_qubits = 0;
  MatrixXd h0_dense;
  MatrixXd y_dense;

  static DenseInstance from_terms(const Lattice& lat, std::vector<PauliTerm> h0,
                                  std::vector<PauliTerm> y, int max_qubits = 13) {
    DenseInstance inst{lat, std::move(h0), std::move(y), lat.num_qubits(), {}, {}};
    if (inst.n_qubits > max_qubits)
      throw std::invalid_argument("DenseInstance: " + std::to_string(inst.n_qubits) +
                                  " qubits exceed the dense cap of " + std::to_string(max_qubits));
    inst.h0_dense = dense_matrix_real(inst.h0_terms, inst.n_qubits);
    inst.y_dense = dense_matrix_real(inst.y_terms, inst.n_qubits);
    return inst;
  }

  static DenseInstance make(const StabilizerModel& model, std::vector<PauliTerm> y_terms,
                            int max_qubits = 13) {
    return from_terms(model.lattice(), hamiltonian_terms(model), std::move(y_terms), max_qubits);
  }

  Eigen::Index dim() const { return 1ll << n_qubits; }

  MatrixXd hs(double s) const { return h0_dense + s * y_dense; }

  std::vector<PauliTerm> hs_terms(double s) const {
    std::vector<PauliTerm> terms = h0_terms;
    for (auto t : y_terms) {
      t.amp *= s;
      terms.push_back(t);
    }
    return terms;
  }
};

/*
 * Flow generator in the instantaneous eigenbasis. The hermitian generator
 * is K = iA with A real antisymmetric,
 *   A_ab = Ytilde_ab / (E_a - E_b)   across clusters,   0 within,
 * i.e. the cross-band kernel i Y_ab / omega fixed by any filter whose
 * Fourier transform is supported on [-gamma, gamma]; the vanishing
 * within-band block is a gauge choice. Refuses when gamma reaches the
 * smallest inter-cluster gap.
 */
struct FlowKernel {
  EigenSystem eig;
  BandClustering clusters;
  MatrixXd a_eigenbasis;  // antisymmetric kernel in the eigenbasis

  /* A in the computational basis: V * a_eigenbasis * V^T. */
  MatrixXd a_dense() const {
    return gemm(gemm(eig.evecs, a_eigenbasis), eig.evecs, false, true);
  }
};

inline FlowKernel flow_kernel(const DenseInstance& inst, double s, double gamma,
                              double cluster_threshold) {
  FlowKernel k;
  k.eig = eigensolve_sym(inst.hs(s));
  k.clusters = BandClustering::from_evals(k.eig.evals, cluster_threshold);
  if (k.clusters.size() > 1 && gamma >= k.clusters.min_intercluster_gap)
    throw std::runtime_error("flow_kernel: gamma=" + std::to_string(gamma) +
                             " >= smallest inter-band gap " +
                             std::to_string(k.clusters.min_intercluster_gap) +
                             " at s=" + std::to_string(s) + "; flow invalid");
  const Eigen::Index dim = k.eig.evals.size();
  MatrixXd ytil = gemm(k.eig.evecs, apply_terms_matrix(inst.y_terms, k.eig.evecs), true, false);
  std::vector<int> cluster_index(dim);
  for (Eigen::Index i = 0; i < dim; ++i) cluster_index[i] = k.clusters.cluster_of(static_cast<int>(i));
  k.a_eigenbasis = MatrixXd::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    for (Eigen::Index a = 0; a < dim; ++a) {
      if (cluster_index[a] == cluster_index[b]) continue;
      k.a_eigenbasis(a, b) = ytil(a, b) / (k.eig.evals[a] - k.eig.evals[b]);
    }
  }
  return k;
}

struct FlowOptions {
  int n_steps = 8;
  double gamma = 1.0;
  double cluster_threshold = 0.4;  // 0.2 * (2J) at J = 1
  double flow_tol = 1e-6;          // projector transport defect target
  int max_refinements = 2;
  bool track_eigensystems = false;  // keep the first/last eigensystems
};

struct FlowResult {
  MatrixXd u;             // the flow unitary U_s (real orthogonal)
  double s = 0;
  int n_steps = 0;
  double unitarity_defect = 0;
  double projector_defect = 0;  // max over bands of ||U P0 U^T - P_s||
  EigenSystem eig0, eig_s;      // populated when track_eigensystems
  BandClustering clusters0, clusters_s;
};

/* ||P1 - P2|| for equal-rank projectors given by orthonormal column bases:
 * the sine of the largest principal angle. */
inline double projector_distance(const MatrixXd& b1, const MatrixXd& b2) {
  if (b1.cols() != b2.cols())
    throw std::invalid_argument("projector_distance: projector ranks differ");
  if (b1.cols() == 0) return 0.0;
  MatrixXd overlap = gemm(b1, b2, true, false);
  Eigen::JacobiSVD<MatrixXd> svd(overlap);
  const double smin = svd.singularValues().minCoeff();
  return std::sqrt(std::max(0.0, 1.0 - smin * smin));
}

/* Produces the generator matrix A(s); injectable for gauge experiments. */
using KernelFn = std::function<MatrixXd(const DenseInstance&, double)>;

inline KernelFn standard_kernel(double gamma, double cluster_threshold) {
  return [gamma, cluster_threshold](const DenseInstance& inst, double s) {
    return flow_kernel(inst, s, gamma, cluster_threshold).a_dense();
  };
}

namespace detail {

/* One RK4 sweep of U' = -A(s) U with kernels supplied per point. */
inline MatrixXd rk4_flow(const DenseInstance& inst, double s_target, int n_steps,
                         const KernelFn& kernel) {
  const Eigen::Index dim = inst.dim();
  MatrixXd u = MatrixXd::Identity(dim, dim);
  if (s_target == 0.0) return u;
  const double h = s_target / n_steps;
  MatrixXd a0 = kernel(inst, 0.0);
  for (int step = 0; step < n_steps; ++step) {
    const double s0 = step * h;
    MatrixXd am = kernel(inst, s0 + h / 2);
    MatrixXd a1 = kernel(inst, s0 + h);
    MatrixXd k1 = -gemm(a0, u);
    MatrixXd stage = u + (h / 2) * k1;
    MatrixXd k2 = -gemm(am, stage);
    stage = u + (h / 2) * k2;
    MatrixXd k3 = -gemm(am, stage);
    stage = u + h * k3;
    MatrixXd k4 = -gemm(a1, stage);
    u += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    a0.swap(a1);
  }
  return u;
}

}  // namespace detail

/* Max over clusters of the transport defect ||U P0 U^T - P_s||. */
inline double max_band_defect(const MatrixXd& u, const EigenSystem& eig0,
                              const BandClustering& c0, const EigenSystem& eig_s,
                              const BandClustering& cs) {
  if (c0.size() != cs.size())
    throw std::runtime_error("max_band_defect: band count changed along the flow (collision)");
  MatrixXd flowed = gemm(u, eig0.evecs);
  double worst = 0;
  for (int c = 0; c < c0.size(); ++c) {
    const auto [b0, e0] = c0.ranges[c];
    const auto [bs, es] = cs.ranges[c];
    if (e0 - b0 != es - bs)
      throw std::runtime_error("max_band_defect: band " + std::to_string(c) +
                               " changed dimension along the flow");
    worst = std::max(worst, projector_distance(flowed.middleCols(b0, e0 - b0),
                                               eig_s.evecs.middleCols(bs, es - bs)));
  }
  return worst;
}

/*
 * Quasi-adiabatic flow unitary from s = 0 to s, integrating
 * dU/ds = i K(s) U with RK4 and doubling the step count until the
 * projector transport defect against the exact eigensolve meets flow_tol.
 */
inline FlowResult flow_unitary(const DenseInstance& inst, double s_target,
                               const FlowOptions& opts = {}, const KernelFn& kernel_override = {}) {
  FlowResult res;
  res.s = s_target;
  EigenSystem eig0 = eigensolve_sym(inst.hs(0.0));
  BandClustering c0 = BandClustering::from_evals(eig0.evals, opts.cluster_threshold);
  EigenSystem eig_s = eigensolve_sym(inst.hs(s_target));
  BandClustering cs = BandClustering::from_evals(eig_s.evals, opts.cluster_threshold);
  const KernelFn kernel =
      kernel_override ? kernel_override : standard_kernel(opts.gamma, opts.cluster_threshold);

  int n = opts.n_steps;
  for (int attempt = 0;; ++attempt) {
    res.u = detail::rk4_flow(inst, s_target, n, kernel);
    res.n_steps = n;
    res.projector_defect = max_band_defect(res.u, eig0, c0, eig_s, cs);
    if (res.projector_defect <= opts.flow_tol) break;
    if (attempt >= opts.max_refinements)
      throw std::runtime_error("flow_unitary: defect " + std::to_string(res.projector_defect) +
                               " above tolerance " + std::to_string(opts.flow_tol) + " after " +
                               std::to_string(n) + " steps");
    n *= 2;
  }
  res.unitarity_defect =
      (gemm(res.u, res.u, true, false) - MatrixXd::Identity(inst.dim(), inst.dim()))
          .cwiseAbs()
          .maxCoeff();
  if (opts.track_eigensystems) {
    res.eig0 = std::move(eig0);
    res.eig_s = std::move(eig_s);
    res.clusters0 = c0;
    res.clusters_s = cs;
  }
  return res;
}

/*
 * Central finite difference of the band projector against the generator
 * commutator: || (P(s+d) - P(s-d)) / 2d - [P, A] || for one band, plus the
 * same at d/2 for a convergence ratio. i[K, P] = [P, A] for K = iA.
 */
struct FdCheck {
  double err = 0;
  double err_half = 0;
};

inline MatrixXd band_projector_at(const DenseInstance& inst, double s, int cluster,
                                  double cluster_threshold) {
  EigenSystem eig = eigensolve_sym(inst.hs(s));
  BandClustering c = BandClustering::from_evals(eig.evals, cluster_threshold);
  const auto [b, e] = c.ranges.at(cluster);
  MatrixXd basis = eig.evecs.middleCols(b, e - b);
  return gemm(basis, basis, false, true);
}

inline FdCheck fd_check_band_flow(const DenseInstance& inst, double s, int cluster, double delta,
                                  const FlowOptions& opts) {
  FlowKernel k = flow_kernel(inst, s, opts.gamma, opts.cluster_threshold);
  const auto [b, e] = k.clusters.ranges.at(cluster);
  MatrixXd basis = k.eig.evecs.middleCols(b, e - b);
  MatrixXd p = gemm(basis, basis, false, true);
  MatrixXd a = k.a_dense();
  MatrixXd commutator = gemm(p, a) - gemm(a, p);
  FdCheck out;
  for (double d : {delta, delta / 2}) {
    MatrixXd fd = (band_projector_at(inst, s + d, cluster, opts.cluster_threshold) -
                   band_projector_at(inst, s - d, cluster, opts.cluster_threshold)) /
                  (2 * d);
    const double err = sym_matrix_norm(fd - commutator);
    (d == delta ? out.err : out.err_half) = err;
  }
  return out;
}

/* Qubits on sites within Chebyshev distance r of a center site. */
inline std::vector<int> ball_qubits(const Lattice& lat, int center, int r) {
  std::vector<int> out;
  for (int s = 0; s < lat.volume(); ++s)
    if (lat.distance(center, s) <= r)
      for (int f = 0; f < lat.qubits_per_site; ++f) out.push_back(lat.qubit(s, f));
  std::sort(out.begin(), out.end());
  return out;
}

/*
 * Shell decomposition of the dressed operator W = U^T O U: the best
 * approximation on the ball of radius r is the conditional expectation
 * E_r(W), and the shell component is O'_r = E_r(W) - E_{r-1}(W). Returns
 * ||O'_r|| for r = 0 .. max torus distance.
 */
inline std::vector<double> locality_profile(const MatrixXd& u, const std::vector<PauliTerm>& o,
                                            int center_site, const Lattice& lat) {
  const int n = lat.num_qubits();
  MatrixXd w = gemm(u, apply_terms_matrix(o, u), true, false);
  const int r_max = lat.max_distance();
  std::vector<double> norms;
  std::vector<int> prev_keep;
  MatrixXd prev_bar;
  for (int r = 0; r <= r_max; ++r) {
    std::vector<int> keep = ball_qubits(lat, center_site, r);
    if (static_cast<int>(keep.size()) == n) {
      MatrixXd diff = w - embed_operator(prev_bar, prev_keep, keep);
      norms.push_back(sym_matrix_norm(diff));
    } else {
      MatrixXd bar = operator_partial_trace(w, keep, n);
      if (r == 0) {
        norms.push_back(sym_matrix_norm(bar));
      } else {
        norms.push_back(sym_matrix_norm(bar - embed_operator(prev_bar, prev_keep, keep)));
      }
      prev_keep = std::move(keep);
      prev_bar = std::move(bar);
    }
  }
  return norms;
}

/* Band intervals and gaps of H_s across an s grid (dense eigensolve). */
struct BandSpectrumRow {
  double s = 0;
  int band = 0;
  double e_min = 0, e_max = 0, width = 0;
  double gap_above = 0;  // 0 for the top band
  bool collision = false;
};

inline std::vector<BandSpectrumRow> band_spectrum(const DenseInstance& inst,
                                                  const std::vector<double>& s_values,
                                                  double cluster_threshold) {
  std::vector<BandSpectrumRow> rows;
  int bands_at_zero = -1;
  for (double s : s_values) {
    EigenSystem eig = eigensolve_sym(inst.hs(s));
    BandClustering c = BandClustering::from_evals(eig.evals, cluster_threshold);
    if (bands_at_zero < 0) bands_at_zero = c.size();
    const bool collision = c.size() != bands_at_zero;
    for (int b = 0; b < c.size(); ++b) {
      BandSpectrumRow row;
      row.s = s;
      row.band = b;
      row.e_min = eig.evals[c.ranges[b].first];
      row.e_max = eig.evals[c.ranges[b].second - 1];
      row.width = row.e_max - row.e_min;
      row.gap_above =
          (b + 1 < c.size()) ? eig.evals[c.ranges[b + 1].first] - row.e_max : 0.0;
      row.collision = collision;
      rows.push_back(row);
    }
  }
  return rows;
}

/*
 * Lowest band edges through the sparse extremal route: Lanczos Ritz values
 * of the matrix-free H_s, clustered like the dense path. Reaches qubit
 * counts the dense eigensolve cannot; only the lowest bands are reported.
 */
inline std::vector<BandSpectrumRow> band_spectrum_sparse(const std::vector<PauliTerm>& h0,
                                                         const std::vector<PauliTerm>& y,
                                                         int n_qubits, double s,
                                                         int lowest_count,
                                                         double cluster_threshold,
                                                         int iters = 160) {
  std::vector<PauliTerm> terms = h0;
  for (auto t : y) {
    t.amp *= s;
    terms.push_back(t);
  }
  VectorXd evals =
      lanczos_lowest_evals(make_apply(terms), 1ll << n_qubits, lowest_count, iters);
  BandClustering c = BandClustering::from_evals(evals, cluster_threshold);
  std::vector<BandSpectrumRow> rows;
  for (int b = 0; b < c.size(); ++b) {
    BandSpectrumRow row;
    row.s = s;
    row.band = b;
    row.e_min = evals[c.ranges[b].first];
    row.e_max = evals[c.ranges[b].second - 1];
    row.width = row.e_max - row.e_min;
    row.gap_above = (b + 1 < c.size()) ? evals[c.ranges[b + 1].first] - row.e_max : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace locgap
