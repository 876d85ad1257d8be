#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "locgap/pauli_terms.hpp"

namespace locgap {

using ApplyFn = std::function<void(const VectorXcd&, VectorXcd&)>;

struct KrylovOptions {
  double tol = 1e-10;     // local error per substep
  int max_basis = 40;     // Lanczos basis size per substep
  int max_substeps = 100000;
};

namespace detail {

/* y = exp(-i tau T) e1 for a real symmetric tridiagonal T. */
inline VectorXcd expm_tridiag_e1(const std::vector<double>& alpha, const std::vector<double>& beta,
                                 double tau) {
  const int m = static_cast<int>(alpha.size());
  MatrixXd t = MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
  VectorXd e1 = es.eigenvectors().row(0);
  VectorXcd w(m);
  for (int i = 0; i < m; ++i)
    w[i] = std::exp(Complex(0, -tau * es.eigenvalues()[i])) * e1[i];
  return es.eigenvectors() * w;
}

}  // namespace detail

/*
 * Krylov (Lanczos) approximation of exp(-itH)|v> for hermitian H given by
 * a matrix-free apply. The step is split adaptively: the standard a
 * posteriori estimate beta_m * |y_m| controls the local error, and a step
 * that cannot meet the tolerance is halved. Norm is preserved exactly by
 * the tridiagonal exponential, up to orthogonalization roundoff.
 */
inline VectorXcd krylov_expm(const ApplyFn& apply, VectorXcd v, double t,
                             const KrylovOptions& opts = {}) {
  if (t == 0.0) return v;
  const double norm0 = v.norm();
  if (norm0 == 0.0) return v;

  double remaining = std::abs(t);
  const double dir = t > 0 ? 1.0 : -1.0;
  double step = remaining;
  int substeps = 0;

  while (remaining > 0) {
    if (++substeps > opts.max_substeps)
      throw std::runtime_error("krylov_expm: did not converge within the substep budget");
    const double tau = std::min(step, remaining);

    const double beta0 = v.norm();
    std::vector<VectorXcd> basis;
    std::vector<double> alpha, beta;
    VectorXcd w;
    basis.push_back(v / beta0);
    bool happy = false;
    for (int j = 0; j < opts.max_basis; ++j) {
      apply(basis[j], w);
      double a = std::real(basis[j].dot(w));
      alpha.push_back(a);
      w -= a * basis[j];
      if (j > 0) w -= beta[j - 1] * basis[j - 1];
      for (const auto& b : basis) w -= b.dot(w) * b;
      const double nb = w.norm();
      if (nb < 1e-14) {  // invariant subspace: the result is exact
        happy = true;
        break;
      }
      beta.push_back(nb);
      basis.push_back(w / nb);
    }
    const int m = static_cast<int>(alpha.size());
    VectorXcd y = detail::expm_tridiag_e1(alpha, beta, dir * tau);
    const double err = happy ? 0.0 : beta[m - 1] * std::abs(y[m - 1]);
    if (!happy && err > opts.tol && tau > 1e-12) {
      step = tau / 2;  // retry the same span with a shorter substep
      continue;
    }
    VectorXcd next = VectorXcd::Zero(v.size());
    for (int j = 0; j < m; ++j) next += (beta0 * y[j]) * basis[j];
    v = next;
    remaining -= tau;
    if (err < opts.tol / 4 && step < remaining) step *= 1.5;
  }
  return v;
}

inline ApplyFn make_apply(const std::vector<PauliTerm>& terms) {
  return [terms](const VectorXcd& in, VectorXcd& out) { apply_terms(terms, in, out); };
}

/* Nearest-neighbor hopping ring in first quantization:
 * H|x> = -(lambda/2)(|x+1> + |x-1>), dispersion -lambda cos k. */
inline ApplyFn make_hopping_chain_apply(int length, double lambda) {
  return [length, lambda](const VectorXcd& in, VectorXcd& out) {
    out.resize(length);
    for (int x = 0; x < length; ++x) {
      const int l = (x + length - 1) % length, r = (x + 1) % length;
      out[x] = -0.5 * lambda * (in[l] + in[r]);
    }
  };
}

/*
 * Lowest Ritz values of a hermitian operator by Lanczos with full
 * reorthogonalization; the extremal route to band edges when the dense
 * eigensolve is out of reach. Converged to roughly machine precision for
 * well-separated low eigenvalues once iters is a few times `count`.
 */
inline VectorXd lanczos_lowest_evals(const ApplyFn& apply, Eigen::Index dim, int count,
                                     int iters = 120, std::uint64_t seed = 4242) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(g(rng), g(rng));
  v.normalize();
  std::vector<VectorXcd> basis;
  std::vector<double> alpha, beta;
  VectorXcd w;
  const int m_max = static_cast<int>(std::min<Eigen::Index>(iters, dim));
  for (int it = 0; it < m_max; ++it) {
    basis.push_back(v);
    apply(v, w);
    const double a = std::real(basis[it].dot(w));
    alpha.push_back(a);
    w -= a * basis[it];
    if (it > 0) w -= beta[it - 1] * basis[it - 1];
    for (const auto& b : basis) w -= b.dot(w) * b;
    const double nb = w.norm();
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
  const int k = std::min(count, m);
  return es.eigenvalues().head(k);
}

}  // namespace locgap
