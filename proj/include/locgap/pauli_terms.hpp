#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "locgap/model.hpp"

namespace locgap {

using Complex = std::complex<double>;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/*
 * One term of a Pauli-sum Hamiltonian on n <= 63 qubits, in the
 * computational z basis: basis index bit q is qubit q. The amplitude of
 * |i XOR x_mask> in term|i> is
 *   amp * (-1)^popcount(i & z_mask),
 * where amp = coeff * i^(#Y letters) folds the Y phases once.
 */
struct PauliTerm {
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;
  Complex amp = 1.0;

  static PauliTerm from_pauli(const PauliOperator& p, Complex coeff) {
    const int n = p.lattice().num_qubits();
    if (n > 63) throw std::invalid_argument("PauliTerm: more than 63 qubits");
    PauliTerm t;
    int y_count = 0;
    for (int q = 0; q < n; ++q) {
      if (p.x_bit(q)) t.x_mask |= 1ull << q;
      if (p.z_bit(q)) t.z_mask |= 1ull << q;
      if (p.x_bit(q) && p.z_bit(q)) ++y_count;
    }
    static const Complex i_powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    t.amp = coeff * i_powers[y_count & 3];
    return t;
  }

  bool is_real() const { return std::abs(amp.imag()) < 1e-14; }

  /* Largest Chebyshev distance between two support sites. */
  int support_diameter(const Lattice& lat) const {
    std::vector<int> sites;
    for (int q = 0; q < lat.num_qubits(); ++q)
      if ((x_mask | z_mask) & (1ull << q)) sites.push_back(lat.site_of_qubit(q));
    int d = 0;
    for (std::size_t i = 0; i < sites.size(); ++i)
      for (std::size_t j = i + 1; j < sites.size(); ++j)
        d = std::max(d, lat.distance(sites[i], sites[j]));
    return d;
  }
};

inline void apply_terms(const std::vector<PauliTerm>& terms, const VectorXcd& in, VectorXcd& out) {
  const std::int64_t dim = in.size();
  out.setZero(dim);
  for (const auto& t : terms) {
    for (std::int64_t i = 0; i < dim; ++i) {
      const double sign = (__builtin_popcountll(static_cast<std::uint64_t>(i) & t.z_mask) & 1)
                              ? -1.0
                              : 1.0;
      out[i ^ static_cast<std::int64_t>(t.x_mask)] += t.amp * sign * in[i];
    }
  }
}

inline VectorXcd apply_terms(const std::vector<PauliTerm>& terms, const VectorXcd& in) {
  VectorXcd out;
  apply_terms(terms, in, out);
  return out;
}

/* Real fast path; rejects terms with imaginary amplitude. */
inline void apply_terms_real(const std::vector<PauliTerm>& terms, const VectorXd& in,
                             VectorXd& out) {
  out.setZero(in.size());
  const std::int64_t dim = in.size();
  for (const auto& t : terms) {
    if (!t.is_real()) throw std::invalid_argument("apply_terms_real: complex term amplitude");
    const double a = t.amp.real();
    for (std::int64_t i = 0; i < dim; ++i) {
      const double sign = (__builtin_popcountll(static_cast<std::uint64_t>(i) & t.z_mask) & 1)
                              ? -a
                              : a;
      out[i ^ static_cast<std::int64_t>(t.x_mask)] += sign * in[i];
    }
  }
}

/* Column-wise real application: OUT = (sum of terms) * IN for matrices. */
inline MatrixXd apply_terms_matrix(const std::vector<PauliTerm>& terms, const MatrixXd& in) {
  MatrixXd out = MatrixXd::Zero(in.rows(), in.cols());
  const std::int64_t dim = in.rows();
  for (const auto& t : terms) {
    if (!t.is_real()) throw std::invalid_argument("apply_terms_matrix: complex term amplitude");
    const double a = t.amp.real();
    for (std::int64_t i = 0; i < dim; ++i) {
      const double sign = (__builtin_popcountll(static_cast<std::uint64_t>(i) & t.z_mask) & 1)
                              ? -a
                              : a;
      out.row(i ^ static_cast<std::int64_t>(t.x_mask)) += sign * in.row(i);
    }
  }
  return out;
}

inline MatrixXd dense_matrix_real(const std::vector<PauliTerm>& terms, int n_qubits) {
  const std::int64_t dim = 1ll << n_qubits;
  MatrixXd h = MatrixXd::Zero(dim, dim);
  for (const auto& t : terms) {
    if (!t.is_real()) throw std::invalid_argument("dense_matrix_real: complex term amplitude");
    const double a = t.amp.real();
    for (std::int64_t i = 0; i < dim; ++i) {
      const double sign = (__builtin_popcountll(static_cast<std::uint64_t>(i) & t.z_mask) & 1)
                              ? -a
                              : a;
      h(i ^ static_cast<std::int64_t>(t.x_mask), i) += sign;
    }
  }
  return h;
}

/* H0 = -J * sum of generators, as Pauli terms. */
inline std::vector<PauliTerm> hamiltonian_terms(const StabilizerModel& model) {
  std::vector<PauliTerm> terms;
  terms.reserve(model.num_generators());
  for (int s = 0; s < model.lattice().volume(); ++s)
    for (int t = 0; t < model.num_generator_types(); ++t)
      terms.push_back(PauliTerm::from_pauli(model.generator_at(s, t), -model.coupling()));
  return terms;
}

/*
 * The default perturbation: uniform transverse plus longitudinal fields,
 * Y = sum_i (h_x sigma^x_i + h_z sigma^z_i), strength carried by s.
 */
inline std::vector<PauliTerm> uniform_field_terms(const Lattice& lat, double hx, double hz) {
  std::vector<PauliTerm> terms;
  for (int q = 0; q < lat.num_qubits(); ++q) {
    if (hx != 0.0) terms.push_back(PauliTerm::from_pauli(PauliOperator::single(lat, q, Pauli::X), hx));
    if (hz != 0.0) terms.push_back(PauliTerm::from_pauli(PauliOperator::single(lat, q, Pauli::Z), hz));
  }
  return terms;
}

/* Supremum of the term norms; each Pauli product has unit norm. */
inline double perturbation_strength(const std::vector<PauliTerm>& terms) {
  double s = 0;
  for (const auto& t : terms) s = std::max(s, std::abs(t.amp));
  return s;
}

inline int max_term_diameter(const std::vector<PauliTerm>& terms, const Lattice& lat) {
  int d = 0;
  for (const auto& t : terms) d = std::max(d, t.support_diameter(lat));
  return d;
}

}  // namespace locgap
