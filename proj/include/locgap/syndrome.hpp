#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "locgap/bitmatrix.hpp"
#include "locgap/model.hpp"

namespace locgap {

/*
 * A defect configuration: one bit per (site, generator type), set when the
 * generator eigenvalue is -1. Each violated term costs 2J above the ground
 * state.
 */
class DefectConfiguration {
 public:
  DefectConfiguration() = default;

  DefectConfiguration(const Lattice& lat, int num_types)
      : lattice_(lat), num_types_(num_types), bits_(lat.volume() * num_types) {}

  static DefectConfiguration empty(const StabilizerModel& m) {
    return DefectConfiguration(m.lattice(), m.num_generator_types());
  }

  static DefectConfiguration from_bits(const Lattice& lat, int num_types, BitVec bits) {
    DefectConfiguration c(lat, num_types);
    if (bits.size() != c.bits_.size())
      throw std::invalid_argument("DefectConfiguration: bit count mismatch");
    c.bits_ = std::move(bits);
    return c;
  }

  const Lattice& lattice() const { return lattice_; }
  int num_types() const { return num_types_; }
  const BitVec& bits() const { return bits_; }

  bool get(int site, int type) const { return bits_.get(site * num_types_ + type); }
  void set(int site, int type, bool v) { bits_.set(site * num_types_ + type, v); }
  void flip(int site, int type) { bits_.flip(site * num_types_ + type); }

  std::size_t total() const { return bits_.popcount(); }

  /* Number of violated generators of one type. */
  std::size_t count(int type) const {
    std::size_t c = 0;
    for (int s = 0; s < lattice_.volume(); ++s)
      if (get(s, type)) ++c;
    return c;
  }

  double energy_above_ground(double coupling) const { return 2.0 * coupling * total(); }

  /* (site, type) pairs of all defects, in row order. */
  std::vector<std::pair<int, int>> defects() const {
    std::vector<std::pair<int, int>> out;
    for (auto i : bits_.set_indices())
      out.emplace_back(static_cast<int>(i) / num_types_, static_cast<int>(i) % num_types_);
    return out;
  }

  DefectConfiguration& operator^=(const DefectConfiguration& o) {
    bits_ ^= o.bits_;
    return *this;
  }

  bool operator==(const DefectConfiguration& o) const {
    return lattice_ == o.lattice_ && num_types_ == o.num_types_ && bits_ == o.bits_;
  }
  bool operator!=(const DefectConfiguration& o) const { return !(*this == o); }

 private:
  Lattice lattice_;
  int num_types_ = 0;
  BitVec bits_;
};

struct ValidityResult {
  bool valid = false;
  std::optional<PauliOperator> witness;  // present iff valid
  std::size_t rank = 0;                  // rank of the syndrome matrix
  std::size_t rank_augmented = 0;        // rank + 1 iff invalid
};

/* A hyperbolic basis of the logical operators: k anticommuting pairs. */
struct LogicalBasis {
  std::vector<PauliOperator> x_ops;
  std::vector<PauliOperator> z_ops;
  int k() const { return static_cast<int>(z_ops.size()); }
};

/*
 * The syndrome map of a model, materialized as a bit matrix of shape
 * (#generators x 2N) whose column for the x (resp. z) part of qubit q is
 * the syndrome of a single sigma-x (resp. sigma-z). Multiplying by the
 * symplectic vector of P gives the defect configuration of P|ground>.
 * Immutable after construction; all queries are const.
 */
class SyndromeMap {
 public:
  explicit SyndromeMap(const StabilizerModel& model) : model_(model) {
    const int n = model.lattice().num_qubits();
    const int rows = model.num_generators();
    matrix_ = BitMatrix(rows, 2 * n);
    for (int s = 0; s < model.lattice().volume(); ++s) {
      for (int t = 0; t < model.num_generator_types(); ++t) {
        PauliOperator g = model.generator_at(s, t);
        const int r = model.generator_index(s, t);
        // sigma-x at q anticommutes with g iff g has a z bit there, and
        // vice versa, so the row of g is (g.z | g.x).
        for (int q = 0; q < n; ++q) {
          if (g.z_bit(q)) matrix_.set(r, q, true);
          if (g.x_bit(q)) matrix_.set(r, n + q, true);
        }
      }
    }
  }

  const StabilizerModel& model() const { return model_; }
  const BitMatrix& matrix() const { return matrix_; }

  DefectConfiguration syndrome(const PauliOperator& p) const {
    if (p.lattice() != model_.lattice())
      throw std::invalid_argument("syndrome: operator lattice mismatch");
    return DefectConfiguration::from_bits(model_.lattice(), model_.num_generator_types(),
                                          matrix_.multiply(p.symplectic()));
  }

  /*
   * Decide whether a defect configuration can be created by a Pauli
   * operator, by solving the syndrome linear system. A witness is returned
   * when one exists, otherwise the rank pair certifying infeasibility.
   */
  ValidityResult is_valid(const DefectConfiguration& config) const {
    if (config.lattice() != model_.lattice() ||
        config.num_types() != model_.num_generator_types())
      throw std::invalid_argument("is_valid: configuration does not match model");
    auto sol = matrix_.solve(config.bits());
    ValidityResult res;
    res.rank = sol.rank;
    res.rank_augmented = sol.rank_augmented;
    res.valid = sol.feasible;
    if (sol.feasible)
      res.witness = PauliOperator::from_symplectic(model_.lattice(), sol.witness);
    return res;
  }

  std::size_t stabilizer_rank() const {
    if (!rank_) rank_ = matrix_.rank();
    return *rank_;
  }

  /* Number of encoded qubits: k = N - rank; the degeneracy is 2^k. */
  int encoded_qubits() const {
    return model_.lattice().num_qubits() - static_cast<int>(stabilizer_rank());
  }

  /*
   * Basis of the centralizer modulo the stabilizer group, arranged into k
   * hyperbolic pairs by symplectic Gram-Schmidt. The z_ops are a maximal
   * pairwise commuting set completing the stabilizer to a pure-state group.
   */
  LogicalBasis logical_basis() const {
    const Lattice& lat = model_.lattice();
    const int n = lat.num_qubits();

    // Generator rows as symplectic (x|z) vectors, in RREF for reduction.
    BitMatrix gen_rows(model_.num_generators(), 2 * n);
    for (int s = 0; s < lat.volume(); ++s)
      for (int t = 0; t < model_.num_generator_types(); ++t)
        gen_rows.set_row(model_.generator_index(s, t), model_.generator_at(s, t).symplectic());
    auto pivots = gen_rows.rref();

    // Kernel of the syndrome map = operators commuting with every generator.
    std::vector<BitVec> kernel = matrix_.nullspace();

    // Reduce each kernel vector modulo the stabilizer row space and keep an
    // independent set; these represent the 2k logical cosets.
    std::vector<BitVec> reduced_rows;  // incremental RREF of accepted logicals
    std::vector<std::size_t> reduced_pivots;
    std::vector<PauliOperator> logicals;
    for (auto& v : kernel) {
      BitVec w = v;
      for (std::size_t i = 0; i < pivots.size(); ++i)
        if (w.get(pivots[i])) w ^= gen_rows.row(i);
      for (std::size_t i = 0; i < reduced_rows.size(); ++i)
        if (w.get(reduced_pivots[i])) w ^= reduced_rows[i];
      if (!w.any()) continue;
      std::size_t pc = w.set_indices().front();
      reduced_rows.push_back(w);
      reduced_pivots.push_back(pc);
      logicals.push_back(PauliOperator::from_symplectic(lat, w));
    }

    LogicalBasis basis;
    // Symplectic Gram-Schmidt: pull out anticommuting pairs and clean the
    // remaining vectors against each pair.
    std::vector<PauliOperator> rest = std::move(logicals);
    while (!rest.empty()) {
      PauliOperator a = rest.front();
      rest.erase(rest.begin());
      std::size_t bi = rest.size();
      for (std::size_t i = 0; i < rest.size(); ++i)
        if (!commutes(a, rest[i])) {
          bi = i;
          break;
        }
      if (bi == rest.size())
        throw std::logic_error("logical_basis: degenerate symplectic form on logical space");
      PauliOperator b = rest[bi];
      rest.erase(rest.begin() + bi);
      for (auto& c : rest) {
        if (!commutes(c, b)) c *= a;
        if (!commutes(c, a)) c *= b;
      }
      basis.x_ops.push_back(a);
      basis.z_ops.push_back(b);
    }
    if (2 * basis.k() != 2 * encoded_qubits())
      throw std::logic_error("logical_basis: dimension does not match encoded qubit count");
    return basis;
  }

 private:
  StabilizerModel model_;
  BitMatrix matrix_;
  mutable std::optional<std::size_t> rank_;
};

}  // namespace locgap
