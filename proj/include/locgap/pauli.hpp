#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "locgap/bitvec.hpp"
#include "locgap/lattice.hpp"

namespace locgap {

/* Single-qubit Pauli letter, as an (x,z) bit pair. Y carries both bits. */
enum class Pauli : unsigned char { X = 1, Z = 2, Y = 3 };

inline bool pauli_has_x(Pauli p) { return static_cast<unsigned char>(p) & 1; }
inline bool pauli_has_z(Pauli p) { return static_cast<unsigned char>(p) & 2; }

inline char pauli_letter(Pauli p) {
  switch (p) {
    case Pauli::X: return 'X';
    case Pauli::Z: return 'Z';
    case Pauli::Y: return 'Y';
  }
  return '?';
}

inline Pauli pauli_from_letter(char c) {
  switch (c) {
    case 'X': case 'x': return Pauli::X;
    case 'Z': case 'z': return Pauli::Z;
    case 'Y': case 'y': return Pauli::Y;
  }
  throw std::invalid_argument(std::string("unknown Pauli letter: ") + c);
}

/*
 * Tensor product of Pauli matrices over the qubits of a lattice, phases
 * dropped. Only the GF(2) image (x bits, z bits) is kept: composition is
 * bitwise XOR and commutation is the symplectic form
 *   a.x . b.z + a.z . b.x (mod 2).
 */
class PauliOperator {
 public:
  PauliOperator() = default;

  explicit PauliOperator(const Lattice& lat)
      : lattice_(lat), x_bits_(lat.num_qubits()), z_bits_(lat.num_qubits()) {}

  static PauliOperator identity(const Lattice& lat) { return PauliOperator(lat); }

  static PauliOperator single(const Lattice& lat, int qubit, Pauli letter) {
    PauliOperator p(lat);
    p.apply_letter(qubit, letter);
    return p;
  }

  const Lattice& lattice() const { return lattice_; }
  const BitVec& x_bits() const { return x_bits_; }
  const BitVec& z_bits() const { return z_bits_; }

  bool x_bit(int q) const { return x_bits_.get(q); }
  bool z_bit(int q) const { return z_bits_.get(q); }

  void set_x(int q, bool v) { x_bits_.set(q, v); }
  void set_z(int q, bool v) { z_bits_.set(q, v); }

  /* XOR the letter onto qubit q (composition with a single-qubit Pauli). */
  void apply_letter(int q, Pauli letter) {
    if (pauli_has_x(letter)) x_bits_.flip(q);
    if (pauli_has_z(letter)) z_bits_.flip(q);
  }

  bool is_identity() const { return !x_bits_.any() && !z_bits_.any(); }

  /* Number of qubits acted on by a non-identity letter. */
  std::size_t weight() const {
    std::size_t w = 0;
    for (std::size_t i = 0; i < x_bits_.num_words(); ++i)
      w += static_cast<std::size_t>(__builtin_popcountll(x_bits_.words()[i] | z_bits_.words()[i]));
    return w;
  }

  std::vector<int> support() const {
    std::vector<int> out;
    for (int q = 0; q < lattice_.num_qubits(); ++q)
      if (x_bits_.get(q) || z_bits_.get(q)) out.push_back(q);
    return out;
  }

  PauliOperator& operator*=(const PauliOperator& o) {
    check_lattice(o);
    x_bits_ ^= o.x_bits_;
    z_bits_ ^= o.z_bits_;
    return *this;
  }

  bool operator==(const PauliOperator& o) const {
    return lattice_ == o.lattice_ && x_bits_ == o.x_bits_ && z_bits_ == o.z_bits_;
  }
  bool operator!=(const PauliOperator& o) const { return !(*this == o); }

  /* Shift every qubit by a site offset (periodic). */
  PauliOperator translated(Coord delta) const {
    PauliOperator out(lattice_);
    for (int q = 0; q < lattice_.num_qubits(); ++q) {
      bool x = x_bits_.get(q), z = z_bits_.get(q);
      if (!x && !z) continue;
      Coord c = lattice_.coords(lattice_.site_of_qubit(q));
      int nq = lattice_.qubit({c[0] + delta[0], c[1] + delta[1], c[2] + delta[2]},
                              lattice_.flavor_of_qubit(q));
      if (x) out.x_bits_.flip(nq);
      if (z) out.z_bits_.flip(nq);
    }
    return out;
  }

  /* Symplectic vector (x part | z part) of length 2N. */
  BitVec symplectic() const {
    const int n = lattice_.num_qubits();
    BitVec v(2 * n);
    for (int q = 0; q < n; ++q) {
      if (x_bits_.get(q)) v.set(q, true);
      if (z_bits_.get(q)) v.set(n + q, true);
    }
    return v;
  }

  static PauliOperator from_symplectic(const Lattice& lat, const BitVec& v) {
    const int n = lat.num_qubits();
    if (static_cast<int>(v.size()) != 2 * n)
      throw std::invalid_argument("PauliOperator::from_symplectic: length mismatch");
    PauliOperator p(lat);
    for (int q = 0; q < n; ++q) {
      if (v.get(q)) p.x_bits_.set(q, true);
      if (v.get(n + q)) p.z_bits_.set(q, true);
    }
    return p;
  }

  std::string to_string() const {
    std::string s;
    for (int q : support()) {
      if (!s.empty()) s += ' ';
      Pauli l = x_bits_.get(q) ? (z_bits_.get(q) ? Pauli::Y : Pauli::X) : Pauli::Z;
      s += pauli_letter(l);
      s += std::to_string(q);
    }
    return s.empty() ? "I" : s;
  }

  void check_lattice(const PauliOperator& o) const {
    if (lattice_ != o.lattice_)
      throw std::invalid_argument("PauliOperator: mismatched lattice dimensions");
  }

 private:
  Lattice lattice_;
  BitVec x_bits_, z_bits_;
};

inline PauliOperator compose(PauliOperator a, const PauliOperator& b) { return a *= b; }

inline bool commutes(const PauliOperator& a, const PauliOperator& b) {
  a.check_lattice(b);
  return !(a.x_bits().dot(b.z_bits()) ^ a.z_bits().dot(b.x_bits()));
}

}  // namespace locgap
