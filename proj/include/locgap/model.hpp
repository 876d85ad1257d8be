#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "locgap/lattice.hpp"
#include "locgap/pauli.hpp"
#include "locgap/stencil.hpp"

namespace locgap {

enum class ModelName { cubic_code, toric_code_2d, wen_plaquette, ising_chain };

inline std::string model_name_string(ModelName m) {
  switch (m) {
    case ModelName::cubic_code: return "cubic_code";
    case ModelName::toric_code_2d: return "toric_code_2d";
    case ModelName::wen_plaquette: return "wen_plaquette";
    case ModelName::ising_chain: return "ising_chain";
  }
  return "?";
}

inline ModelName model_name_from_string(const std::string& s) {
  if (s == "cubic_code") return ModelName::cubic_code;
  if (s == "toric_code_2d") return ModelName::toric_code_2d;
  if (s == "wen_plaquette") return ModelName::wen_plaquette;
  if (s == "ising_chain") return ModelName::ising_chain;
  throw std::invalid_argument("unknown model name: " + s);
}

/*
 * Two generator types on a cubic lattice with two qubits per site.
 * The Z type acts on the site pair and the three negative unit shifts
 * (flavor 0) plus the three negative double shifts (flavor 1); the X type
 * is the inversion with X letters.
 */
inline Stencil cubic_code_stencil() {
  Stencil s;
  s.name = "cubic_code";
  s.qubits_per_site = 2;
  s.dims_required = {0, 0, 0};
  s.type_names = {"GZ", "GX"};
  auto Z = Pauli::Z;
  auto X = Pauli::X;
  s.generator_types.push_back({
      {{0, 0, 0}, 0, Z},
      {{0, 0, 0}, 1, Z},
      {{-1, 0, 0}, 0, Z},
      {{0, -1, 0}, 0, Z},
      {{0, 0, -1}, 0, Z},
      {{0, -1, -1}, 1, Z},
      {{-1, 0, -1}, 1, Z},
      {{-1, -1, 0}, 1, Z},
  });
  s.generator_types.push_back({
      {{0, 0, 0}, 0, X},
      {{0, 0, 0}, 1, X},
      {{1, 0, 0}, 1, X},
      {{0, 1, 0}, 1, X},
      {{0, 0, 1}, 1, X},
      {{0, 1, 1}, 0, X},
      {{1, 0, 1}, 0, X},
      {{1, 1, 0}, 0, X},
  });
  return s;
}

/*
 * Toric code with the two edge qubits folded into the site: flavor 0 is the
 * edge leaving the site along +x, flavor 1 along +y. Type 0 is the vertex
 * star (X on the four incident edges), type 1 the plaquette (Z around the
 * square whose lower-left corner is the site).
 */
inline Stencil toric_code_stencil() {
  Stencil s;
  s.name = "toric_code_2d";
  s.qubits_per_site = 2;
  s.dims_required = {0, 0, 1};
  s.type_names = {"star", "plaquette"};
  auto Z = Pauli::Z;
  auto X = Pauli::X;
  s.generator_types.push_back({
      {{0, 0, 0}, 0, X},
      {{0, 0, 0}, 1, X},
      {{-1, 0, 0}, 0, X},
      {{0, -1, 0}, 1, X},
  });
  s.generator_types.push_back({
      {{0, 0, 0}, 0, Z},
      {{0, 0, 0}, 1, Z},
      {{1, 0, 0}, 1, Z},
      {{0, 1, 0}, 0, Z},
  });
  return s;
}

/*
 * Wen plaquette model: one qubit per site and a single generator type
 * X Z X Z around each unit square. On even-by-even tori the violated
 * plaquettes split into two checkerboard sublattices; a defect can hop to
 * a diagonal neighbor by a single-site Pauli but not to a nearest one.
 */
inline Stencil wen_plaquette_stencil() {
  Stencil s;
  s.name = "wen_plaquette";
  s.qubits_per_site = 1;
  s.dims_required = {0, 0, 1};
  s.type_names = {"F"};
  s.defect_sublattices = 2;
  s.generator_types.push_back({
      {{0, 0, 0}, 0, Pauli::X},
      {{1, 0, 0}, 0, Pauli::Z},
      {{1, 1, 0}, 0, Pauli::X},
      {{0, 1, 0}, 0, Pauli::Z},
  });
  return s;
}

/* Single-qubit Z field on a chain; the trivial gapped comparator. */
inline Stencil ising_chain_stencil() {
  Stencil s;
  s.name = "ising_chain";
  s.qubits_per_site = 1;
  s.dims_required = {0, 1, 1};
  s.type_names = {"Z"};
  s.generator_types.push_back({{{0, 0, 0}, 0, Pauli::Z}});
  return s;
}

/*
 * A stencil instantiated on a finite torus, with Hamiltonian
 *   H0 = -J * sum over sites and types of the generators.
 * Construction verifies that all generator pairs commute; by translation
 * invariance it is enough to check type pairs at origin against all
 * translates within twice the stencil radius.
 */
class StabilizerModel {
 public:
  StabilizerModel(Stencil stencil, Coord dims, double coupling = 1.0)
      : stencil_(std::move(stencil)),
        lattice_(dims, stencil_.qubits_per_site),
        coupling_(coupling) {
    stencil_.validate();
    if (coupling_ <= 0) throw std::invalid_argument("StabilizerModel: coupling must be positive");
    for (int a = 0; a < 3; ++a) {
      if (stencil_.dims_required[a] == 1 && dims[a] != 1)
        throw std::invalid_argument("StabilizerModel: model requires dim " + std::to_string(a) +
                                    " == 1");
      if (stencil_.dims_required[a] == 0 && dims[a] < 2)
        throw std::invalid_argument("StabilizerModel: model requires dim " + std::to_string(a) +
                                    " >= 2");
      if (stencil_.dims_required[a] > 1 && dims[a] != stencil_.dims_required[a])
        throw std::invalid_argument("StabilizerModel: dim " + std::to_string(a) + " must be " +
                                    std::to_string(stencil_.dims_required[a]));
    }
    check_commutation();
  }

  const Lattice& lattice() const { return lattice_; }
  const Stencil& stencil() const { return stencil_; }
  double coupling() const { return coupling_; }
  const std::string& name() const { return stencil_.name; }

  int num_generator_types() const { return stencil_.num_types(); }
  int num_generators() const { return stencil_.num_types() * lattice_.volume(); }

  /* Row index of generator (site, type) in syndrome/defect vectors. */
  int generator_index(int site, int type) const {
    return site * stencil_.num_types() + type;
  }
  int generator_site(int index) const { return index / stencil_.num_types(); }
  int generator_type(int index) const { return index % stencil_.num_types(); }

  PauliOperator generator_at(int site, int type) const {
    if (type < 0 || type >= stencil_.num_types())
      throw std::out_of_range("generator_at: type index out of range");
    if (site < 0 || site >= lattice_.volume())
      throw std::out_of_range("generator_at: site out of range");
    Coord base = lattice_.coords(site);
    PauliOperator p(lattice_);
    for (const auto& e : stencil_.generator_types[type]) {
      int q = lattice_.qubit({base[0] + e.offset[0], base[1] + e.offset[1], base[2] + e.offset[2]},
                             e.qubit);
      p.apply_letter(q, e.letter);
    }
    return p;
  }

  std::vector<PauliOperator> all_generators() const {
    std::vector<PauliOperator> gens;
    gens.reserve(num_generators());
    for (int s = 0; s < lattice_.volume(); ++s)
      for (int t = 0; t < stencil_.num_types(); ++t) gens.push_back(generator_at(s, t));
    return gens;
  }

 private:
  void check_commutation() const {
    const int r = 2 * stencil_.radius() + 1;
    std::vector<PauliOperator> origin;
    for (int t = 0; t < stencil_.num_types(); ++t) origin.push_back(generator_at(0, t));
    for (int t = 0; t < stencil_.num_types(); ++t) {
      for (int dz = -r; dz <= r; ++dz)
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx) {
            int s = lattice_.site({dx, dy, dz});
            for (int u = 0; u < stencil_.num_types(); ++u) {
              if (!commutes(origin[t], generator_at(s, u)))
                throw std::logic_error("StabilizerModel: generators (" + std::to_string(t) +
                                       " at origin) and (" + std::to_string(u) + " at site " +
                                       std::to_string(s) + ") fail to commute");
            }
          }
    }
  }

  Stencil stencil_;
  Lattice lattice_;
  double coupling_;
};

inline StabilizerModel build_model(ModelName name, Coord dims, double coupling = 1.0) {
  switch (name) {
    case ModelName::cubic_code: return StabilizerModel(cubic_code_stencil(), dims, coupling);
    case ModelName::toric_code_2d: return StabilizerModel(toric_code_stencil(), dims, coupling);
    case ModelName::wen_plaquette: return StabilizerModel(wen_plaquette_stencil(), dims, coupling);
    case ModelName::ising_chain: return StabilizerModel(ising_chain_stencil(), dims, coupling);
  }
  throw std::invalid_argument("build_model: unknown model");
}

/* Cubic helper: an L x L x L torus (or L x L for 2D models, L for chains). */
inline StabilizerModel build_model_cubic(ModelName name, int L, double coupling = 1.0) {
  switch (name) {
    case ModelName::cubic_code: return build_model(name, {L, L, L}, coupling);
    case ModelName::toric_code_2d:
    case ModelName::wen_plaquette: return build_model(name, {L, L, 1}, coupling);
    case ModelName::ising_chain: return build_model(name, {L, 1, 1}, coupling);
  }
  throw std::invalid_argument("build_model_cubic: unknown model");
}

}  // namespace locgap
