#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "locgap/syndrome.hpp"

namespace locgap {

/* A subset of lattice qubits. */
struct Region {
  std::vector<int> qubits;

  static Region box(const Lattice& lat, Coord corner, Coord sides) {
    Region r;
    for (int dz = 0; dz < std::min(sides[2], lat.dims[2]); ++dz)
      for (int dy = 0; dy < std::min(sides[1], lat.dims[1]); ++dy)
        for (int dx = 0; dx < std::min(sides[0], lat.dims[0]); ++dx) {
          int s = lat.site({corner[0] + dx, corner[1] + dy, corner[2] + dz});
          for (int f = 0; f < lat.qubits_per_site; ++f) r.qubits.push_back(lat.qubit(s, f));
        }
    std::sort(r.qubits.begin(), r.qubits.end());
    r.qubits.erase(std::unique(r.qubits.begin(), r.qubits.end()), r.qubits.end());
    return r;
  }

  Region complement(const Lattice& lat) const {
    std::vector<bool> in(lat.num_qubits(), false);
    for (int q : qubits) in[q] = true;
    Region r;
    for (int q = 0; q < lat.num_qubits(); ++q)
      if (!in[q]) r.qubits.push_back(q);
    return r;
  }
};

/*
 * A pure stabilizer eigenstate presented as a generating set: the model's
 * generators (possibly redundant) completed by a maximal commuting set of
 * logical operators, with signs fixed by a sector label and an excitation
 * Pauli. Signs never enter entropies, but they pin down the dense state
 * the numerics side cross-validates against.
 */
class StabilizerEigenstate {
 public:
  StabilizerEigenstate(const SyndromeMap& map, const PauliOperator& excitation,
                       const std::vector<bool>& sector)
      : model_(map.model()), excitation_(excitation) {
    if (excitation.lattice() != model_.lattice())
      throw std::invalid_argument("StabilizerEigenstate: excitation lattice mismatch");
    LogicalBasis logicals = map.logical_basis();
    if (static_cast<int>(sector.size()) != logicals.k())
      throw std::invalid_argument("StabilizerEigenstate: sector label must have one bit per encoded qubit (k = " +
                                  std::to_string(logicals.k()) + ")");
    const Lattice& lat = model_.lattice();
    const int n = lat.num_qubits();

    generators_ = model_.all_generators();
    signs_.assign(generators_.size(), false);
    for (std::size_t i = 0; i < generators_.size(); ++i)
      signs_[i] = !commutes(generators_[i], excitation);  // -1 eigenvalue = defect

    for (int i = 0; i < logicals.k(); ++i) {
      generators_.push_back(logicals.z_ops[i]);
      signs_.push_back(sector[i] ^ !commutes(logicals.z_ops[i], excitation));
    }

    rows_ = BitMatrix(generators_.size(), 2 * n);
    for (std::size_t i = 0; i < generators_.size(); ++i)
      rows_.set_row(i, generators_[i].symplectic());
  }

  const StabilizerModel& model() const { return model_; }
  const std::vector<PauliOperator>& generators() const { return generators_; }
  const std::vector<bool>& signs() const { return signs_; }

  /*
   * Entanglement entropy of the region in bits:
   *   S(M) = rank(G restricted to M's columns) - |M|,
   * where G is the full generating set. Integer for stabilizer states and
   * equal to S(complement) by purity.
   */
  int entropy_bits(const Region& region) const {
    if (region.qubits.empty()) return 0;
    const int n = model_.lattice().num_qubits();
    std::vector<std::size_t> cols;
    cols.reserve(2 * region.qubits.size());
    for (int q : region.qubits) {
      cols.push_back(static_cast<std::size_t>(q));
      cols.push_back(static_cast<std::size_t>(n + q));
    }
    const std::size_t r = rows_.select_columns(cols).rank();
    return static_cast<int>(r) - static_cast<int>(region.qubits.size());
  }

  /* Group-rank diagnostics for reporting: restricted rank and |M|. */
  std::pair<std::size_t, std::size_t> rank_diagnostics(const Region& region) const {
    const int n = model_.lattice().num_qubits();
    std::vector<std::size_t> cols;
    for (int q : region.qubits) {
      cols.push_back(static_cast<std::size_t>(q));
      cols.push_back(static_cast<std::size_t>(n + q));
    }
    return {rows_.select_columns(cols).rank(), region.qubits.size()};
  }

 private:
  StabilizerModel model_;
  PauliOperator excitation_;
  std::vector<PauliOperator> generators_;
  std::vector<bool> signs_;
  BitMatrix rows_;
};

/* Entropy of excitation |psi> = P |ground, sector> for a region, in bits. */
inline int stabilizer_entropy(const SyndromeMap& map, const PauliOperator& excitation,
                              const std::vector<bool>& sector, const Region& region) {
  return StabilizerEigenstate(map, excitation, sector).entropy_bits(region);
}

}  // namespace locgap
