#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "locgap/bitvec.hpp"

namespace locgap {

/*
 * Dense bit matrix over GF(2), packed 64 columns per word, row major.
 * The elimination kernels below are exact: a solve either returns a
 * witness x with M.x = b, or the pair (rank M, rank [M|b]) with
 * rank [M|b] = rank M + 1, which certifies infeasibility.
 */
class BitMatrix {
 public:
  BitMatrix() = default;

  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), data_(rows * wpr_, 0) {}

  static BitMatrix identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  static BitMatrix random(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    BitMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t w = 0; w < m.wpr_; ++w) m.data_[r * m.wpr_ + w] = rng();
    m.mask_tail();
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const {
    return (data_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1ull;
  }

  void set(std::size_t r, std::size_t c, bool v) {
    const std::uint64_t mask = 1ull << (c & 63);
    if (v)
      data_[r * wpr_ + (c >> 6)] |= mask;
    else
      data_[r * wpr_ + (c >> 6)] &= ~mask;
  }

  void set_row(std::size_t r, const BitVec& v) {
    if (v.size() != cols_) throw std::invalid_argument("BitMatrix::set_row: width mismatch");
    for (std::size_t w = 0; w < wpr_; ++w) data_[r * wpr_ + w] = v.words()[w];
  }

  BitVec row(std::size_t r) const {
    BitVec v(cols_);
    for (std::size_t w = 0; w < wpr_; ++w) v.words()[w] = data_[r * wpr_ + w];
    return v;
  }

  void xor_row_into(std::size_t src, std::size_t dst) {
    std::uint64_t* d = &data_[dst * wpr_];
    const std::uint64_t* s = &data_[src * wpr_];
    for (std::size_t w = 0; w < wpr_; ++w) d[w] ^= s[w];
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t w = 0; w < wpr_; ++w) std::swap(data_[a * wpr_ + w], data_[b * wpr_ + w]);
  }

  BitVec multiply(const BitVec& x) const {
    if (x.size() != cols_) throw std::invalid_argument("BitMatrix::multiply: width mismatch");
    BitVec y(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      std::uint64_t acc = 0;
      const std::uint64_t* rw = &data_[r * wpr_];
      for (std::size_t w = 0; w < wpr_; ++w) acc ^= rw[w] & x.words()[w];
      if (__builtin_popcountll(acc) & 1) y.set(r, true);
    }
    return y;
  }

  /* Keep only the named columns, in the given order. */
  BitMatrix select_columns(const std::vector<std::size_t>& cols) const {
    BitMatrix out(rows_, cols.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t j = 0; j < cols.size(); ++j)
        if (get(r, cols[j])) out.set(r, j, true);
    return out;
  }

  BitMatrix select_rows(const std::vector<std::size_t>& rows) const {
    BitMatrix out(rows.size(), cols_);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t w = 0; w < wpr_; ++w)
        out.data_[i * wpr_ + w] = data_[rows[i] * wpr_ + w];
    return out;
  }

  /*
   * In-place reduction to reduced row echelon form.
   * Returns the pivot column of each pivot row, in row order; the rank is
   * the number of pivots. Deterministic: pivots are chosen in column order,
   * first available row.
   */
  std::vector<std::size_t> rref() {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
      std::size_t p = r;
      while (p < rows_ && !get(p, c)) ++p;
      if (p == rows_) continue;
      swap_rows(p, r);
      for (std::size_t i = 0; i < rows_; ++i)
        if (i != r && get(i, c)) xor_row_into(r, i);
      pivots.push_back(c);
      ++r;
    }
    return pivots;
  }

  std::size_t rank() const {
    BitMatrix tmp = *this;
    return tmp.rref().size();
  }

  struct SolveResult {
    bool feasible = false;
    BitVec witness;              // valid iff feasible
    std::size_t rank = 0;        // rank of M
    std::size_t rank_augmented = 0;  // rank of [M|b]; rank+1 iff infeasible
  };

  /*
   * Solve M.x = b. The right hand side is carried through the same row
   * operations as the matrix, so the result is exact by construction;
   * free variables are set to zero.
   */
  SolveResult solve(const BitVec& b) const {
    if (b.size() != rows_) throw std::invalid_argument("BitMatrix::solve: rhs length mismatch");
    BitMatrix m = *this;
    BitVec rhs = b;
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
      std::size_t p = r;
      while (p < rows_ && !m.get(p, c)) ++p;
      if (p == rows_) continue;
      m.swap_rows(p, r);
      { bool t = rhs.get(p); rhs.set(p, rhs.get(r)); rhs.set(r, t); }
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i != r && m.get(i, c)) {
          m.xor_row_into(r, i);
          if (rhs.get(r)) rhs.flip(i);
        }
      }
      pivots.push_back(c);
      ++r;
    }
    SolveResult res;
    res.rank = pivots.size();
    // Any zero row with a set rhs bit certifies infeasibility.
    for (std::size_t i = pivots.size(); i < rows_; ++i) {
      if (rhs.get(i)) {
        res.feasible = false;
        res.rank_augmented = res.rank + 1;
        return res;
      }
    }
    res.feasible = true;
    res.rank_augmented = res.rank;
    res.witness = BitVec(cols_);
    for (std::size_t i = 0; i < pivots.size(); ++i)
      if (rhs.get(i)) res.witness.set(pivots[i], true);
    return res;
  }

  /* Basis of the kernel {x : M.x = 0}, from the RREF free columns. */
  std::vector<BitVec> nullspace() const {
    BitMatrix m = *this;
    std::vector<std::size_t> pivots = m.rref();
    std::vector<bool> is_pivot(cols_, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<BitVec> basis;
    for (std::size_t c = 0; c < cols_; ++c) {
      if (is_pivot[c]) continue;
      BitVec v(cols_);
      v.set(c, true);
      for (std::size_t i = 0; i < pivots.size(); ++i)
        if (m.get(i, c)) v.set(pivots[i], true);
      basis.push_back(std::move(v));
    }
    return basis;
  }

  bool operator==(const BitMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  void mask_tail() {
    const std::size_t tail = cols_ & 63;
    if (!tail) return;
    const std::uint64_t mask = (1ull << tail) - 1;
    for (std::size_t r = 0; r < rows_; ++r) data_[r * wpr_ + wpr_ - 1] &= mask;
  }

  std::size_t rows_ = 0, cols_ = 0, wpr_ = 0;
  std::vector<std::uint64_t> data_;
};

}  // namespace locgap
