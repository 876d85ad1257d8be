#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <cblas.h>
#include <lapacke.h>

#include "locgap/pauli_terms.hpp"

namespace locgap {

/* C = op(A) * op(B) through BLAS; Eigen's own product is slower here. */
inline MatrixXd gemm(const MatrixXd& a, const MatrixXd& b, bool trans_a = false,
                     bool trans_b = false) {
  const int m = static_cast<int>(trans_a ? a.cols() : a.rows());
  const int k = static_cast<int>(trans_a ? a.rows() : a.cols());
  const int kb = static_cast<int>(trans_b ? b.cols() : b.rows());
  const int n = static_cast<int>(trans_b ? b.rows() : b.cols());
  if (k != kb) throw std::invalid_argument("gemm: inner dimensions disagree");
  MatrixXd c(m, n);
  cblas_dgemm(CblasColMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, 1.0, a.data(),
              static_cast<int>(a.rows()), b.data(), static_cast<int>(b.rows()), 0.0, c.data(), m);
  return c;
}

struct EigenSystem {
  VectorXd evals;
  MatrixXd evecs;  // columns are eigenvectors, ascending eigenvalues
};

/* Full symmetric eigensolve (LAPACK dsyevd). Input checked for symmetry. */
inline EigenSystem eigensolve_sym(const MatrixXd& h, double hermiticity_tol = 1e-12) {
  const auto n = h.rows();
  if (h.cols() != n) throw std::invalid_argument("eigensolve_sym: matrix not square");
  const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
  if (asym > hermiticity_tol)
    throw std::invalid_argument("eigensolve_sym: matrix asymmetry " + std::to_string(asym) +
                                " exceeds tolerance");
  EigenSystem sys;
  sys.evecs = h;
  sys.evals.resize(n);
  const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<int>(n),
                                  sys.evecs.data(), static_cast<int>(n), sys.evals.data());
  if (info != 0) throw std::runtime_error("eigensolve_sym: dsyevd failed, info=" + std::to_string(info));
  return sys;
}

inline VectorXcd apply_real_matrix(const MatrixXd& m, const VectorXcd& v, bool transpose = false) {
  VectorXd re = v.real(), im = v.imag();
  VectorXd mre, mim;
  if (transpose) {
    mre = m.transpose() * re;
    mim = m.transpose() * im;
  } else {
    mre = m * re;
    mim = m * im;
  }
  VectorXcd out(m.rows());
  out.real() = mre;
  out.imag() = mim;
  return out;
}

/* exp(-itH)|v> through a precomputed eigensystem. */
inline VectorXcd evolve_dense(const EigenSystem& sys, const VectorXcd& v, double t) {
  VectorXcd w = apply_real_matrix(sys.evecs, v, true);
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w[i] *= std::exp(Complex(0, -t * sys.evals[i]));
  return apply_real_matrix(sys.evecs, w, false);
}

/*
 * Largest |eigenvalue| of a symmetric operator given by matrix-free
 * application, via Lanczos with full reorthogonalization. Deterministic
 * start vector.
 */
inline double sym_operator_norm(const std::function<void(const VectorXd&, VectorXd&)>& apply,
                                Eigen::Index dim, int iters = 60) {
  if (dim == 0) return 0.0;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> g;
  VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = g(rng);
  v.normalize();
  std::vector<VectorXd> basis;
  std::vector<double> alpha, beta;
  VectorXd w(dim);
  for (int it = 0; it < std::min<Eigen::Index>(iters, dim); ++it) {
    basis.push_back(v);
    apply(v, w);
    double a = v.dot(w);
    alpha.push_back(a);
    w -= a * v;
    if (it > 0) w -= beta.back() * basis[it - 1];
    for (const auto& b : basis) w -= b.dot(w) * b;  // reorthogonalize
    double nb = w.norm();
    if (nb < 1e-13) break;
    beta.push_back(nb);
    v = w / nb;
  }
  const int m = static_cast<int>(alpha.size());
  MatrixXd t = MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
  return std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
}

inline double sym_matrix_norm(const MatrixXd& m) {
  if (m.rows() <= 256) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    return std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
  }
  return sym_operator_norm([&](const VectorXd& x, VectorXd& y) { y.noalias() = m * x; }, m.rows());
}

/*
 * Dense state vector of the joint +1/-1 eigenspace of signed commuting
 * Pauli terms, built by projector products on a random real start vector.
 * The generator list must pin a unique state (stabilizer rank n with the
 * logical completion); an inconsistent sign assignment projects to zero and
 * is reported.
 */
inline VectorXd stabilizer_state_dense(const std::vector<PauliTerm>& generators,
                                       const std::vector<bool>& minus_signs, int n_qubits,
                                       std::uint64_t seed = 2024) {
  if (generators.size() != minus_signs.size())
    throw std::invalid_argument("stabilizer_state_dense: sign count mismatch");
  const Eigen::Index dim = 1ll << n_qubits;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int attempt = 0; attempt < 10; ++attempt) {
    VectorXd psi(dim);
    for (Eigen::Index i = 0; i < dim; ++i) psi[i] = g(rng);
    psi.normalize();
    VectorXd gp(dim);
    for (std::size_t k = 0; k < generators.size(); ++k) {
      apply_terms_real({generators[k]}, psi, gp);
      const double s = minus_signs[k] ? -1.0 : 1.0;
      psi = 0.5 * (psi + s * gp);
    }
    const double norm = psi.norm();
    if (norm > 1e-8) {
      psi /= norm;
      // Confirm the eigenvalue pattern; a wrong sector would have died.
      for (std::size_t k = 0; k < generators.size(); ++k) {
        apply_terms_real({generators[k]}, psi, gp);
        const double s = minus_signs[k] ? -1.0 : 1.0;
        if ((gp - s * psi).norm() > 1e-8)
          throw std::logic_error("stabilizer_state_dense: projector product left a mixed state");
      }
      return psi;
    }
  }
  throw std::invalid_argument(
      "stabilizer_state_dense: sign assignment inconsistent with the group (zero projection)");
}

/* Reduced density matrix over `keep` qubits (bit q of the index = qubit q). */
inline Eigen::MatrixXcd reduced_density_matrix(const VectorXcd& state,
                                               const std::vector<int>& keep, int n_qubits) {
  const int nk = static_cast<int>(keep.size());
  const int nc = n_qubits - nk;
  std::vector<int> comp;
  {
    std::vector<bool> in(n_qubits, false);
    for (int q : keep) in[q] = true;
    for (int q = 0; q < n_qubits; ++q)
      if (!in[q]) comp.push_back(q);
  }
  auto spread = [](std::uint64_t bits, const std::vector<int>& positions) {
    std::uint64_t out = 0;
    for (std::size_t j = 0; j < positions.size(); ++j)
      if (bits & (1ull << j)) out |= 1ull << positions[j];
    return out;
  };
  const std::uint64_t dk = 1ull << nk, dc = 1ull << nc;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dk, dk);
  for (std::uint64_t b = 0; b < dc; ++b) {
    const std::uint64_t base = spread(b, comp);
    for (std::uint64_t a = 0; a < dk; ++a) {
      const Complex va = state[base | spread(a, keep)];
      if (va == Complex(0, 0)) continue;
      for (std::uint64_t a2 = 0; a2 < dk; ++a2)
        rho(a, a2) += va * std::conj(state[base | spread(a2, keep)]);
    }
  }
  return rho;
}

/* Von Neumann entropy in bits of a density matrix. */
inline double entropy_bits_dense(const Eigen::MatrixXcd& rho, double tol = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  double s = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()[i];
    if (p > tol) s -= p * std::log2(p);
  }
  return s;
}

inline double state_entropy_bits(const VectorXcd& state, const std::vector<int>& keep,
                                 int n_qubits) {
  return entropy_bits_dense(reduced_density_matrix(state, keep, n_qubits));
}

/* Schmidt rank across (keep | rest): Schmidt weights above tol. */
inline int schmidt_rank(const VectorXcd& state, const std::vector<int>& keep, int n_qubits,
                        double tol = 1e-12) {
  auto rho = reduced_density_matrix(state, keep, n_qubits);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  int rank = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > tol) ++rank;
  return rank;
}

/*
 * Conditional expectation of an operator onto the qubits in `keep`:
 * W-bar = Tr_rest(W) / 2^(n - |keep|), the matrix part of E(W) = W-bar x I.
 */
inline MatrixXd operator_partial_trace(const MatrixXd& w, const std::vector<int>& keep,
                                       int n_qubits) {
  const int nk = static_cast<int>(keep.size());
  const int nc = n_qubits - nk;
  std::vector<int> comp;
  {
    std::vector<bool> in(n_qubits, false);
    for (int q : keep) in[q] = true;
    for (int q = 0; q < n_qubits; ++q)
      if (!in[q]) comp.push_back(q);
  }
  auto spread = [](std::uint64_t bits, const std::vector<int>& positions) {
    std::uint64_t out = 0;
    for (std::size_t j = 0; j < positions.size(); ++j)
      if (bits & (1ull << j)) out |= 1ull << positions[j];
    return out;
  };
  const std::uint64_t dk = 1ull << nk, dc = 1ull << nc;
  MatrixXd out = MatrixXd::Zero(dk, dk);
  for (std::uint64_t a = 0; a < dk; ++a) {
    const std::uint64_t sa = spread(a, keep);
    for (std::uint64_t a2 = 0; a2 < dk; ++a2) {
      const std::uint64_t sa2 = spread(a2, keep);
      double acc = 0;
      for (std::uint64_t b = 0; b < dc; ++b) {
        const std::uint64_t sb = spread(b, comp);
        acc += w(sa | sb, sa2 | sb);
      }
      out(a, a2) = acc / static_cast<double>(dc);
    }
  }
  return out;
}

/* Embed a keep-subset operator into a larger qubit set as M x Identity. */
inline MatrixXd embed_operator(const MatrixXd& m, const std::vector<int>& from,
                               const std::vector<int>& to) {
  // Positions of `from` qubits inside `to` (from must be a subset of to).
  std::vector<int> pos;
  for (int q : from) {
    auto it = std::find(to.begin(), to.end(), q);
    if (it == to.end()) throw std::invalid_argument("embed_operator: qubit sets not nested");
    pos.push_back(static_cast<int>(it - to.begin()));
  }
  const int nf = static_cast<int>(from.size()), nt = static_cast<int>(to.size());
  std::vector<int> rest;
  for (int j = 0; j < nt; ++j)
    if (std::find(pos.begin(), pos.end(), j) == pos.end()) rest.push_back(j);
  auto spread = [](std::uint64_t bits, const std::vector<int>& positions) {
    std::uint64_t out = 0;
    for (std::size_t j = 0; j < positions.size(); ++j)
      if (bits & (1ull << j)) out |= 1ull << positions[j];
    return out;
  };
  const std::uint64_t df = 1ull << nf, dr = 1ull << (nt - nf);
  MatrixXd out = MatrixXd::Zero(1ll << nt, 1ll << nt);
  for (std::uint64_t a = 0; a < df; ++a)
    for (std::uint64_t a2 = 0; a2 < df; ++a2) {
      const double val = m(a, a2);
      if (val == 0.0) continue;
      const std::uint64_t sa = spread(a, pos), sa2 = spread(a2, pos);
      for (std::uint64_t b = 0; b < dr; ++b) {
        const std::uint64_t sb = spread(b, rest);
        out(sa | sb, sa2 | sb) = val;
      }
    }
  return out;
}

}  // namespace locgap
