#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "locgap/lattice.hpp"

namespace locgap {

/*
 * Counting of sparse defect configurations on an L x L x L torus: m defect
 * sites, all pairwise Chebyshev distances >= d. Positions range over the
 * sites of a single generator type. The excluded volume v is the number of
 * sites strictly within distance d of a given site (the site included),
 * which is min(2d-1, L)^3 with torus clipping.
 */
struct SparsityQuery {
  int L = 2;
  int m = 0;
  int d = 1;

  void validate() const {
    if (L < 2) throw std::invalid_argument("SparsityQuery: L must be >= 2");
    if (m < 0) throw std::invalid_argument("SparsityQuery: m must be >= 0");
    if (d < 1) throw std::invalid_argument("SparsityQuery: d must be >= 1");
  }

  std::int64_t volume() const { return static_cast<std::int64_t>(L) * L * L; }

  /* |{x : dist(x, 0) < d}| on the torus. */
  std::int64_t excluded_volume() const {
    const std::int64_t per_axis = std::min<std::int64_t>(2 * d - 1, L);
    return per_axis * per_axis * per_axis;
  }
};

struct SparseCount {
  std::int64_t sparse_count = 0;
  std::int64_t total_count = 0;
  double fraction = 0;
};

inline std::int64_t binomial(std::int64_t n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - i + 1) / i;
  return r;
}

/*
 * Exact enumeration of sparse m-subsets. Intended for m <= 3 and V <= 216;
 * larger queries are refused so callers fall back to the bound.
 */
inline SparseCount count_sparse_exact(const SparsityQuery& q) {
  q.validate();
  if (q.m > 3) throw std::invalid_argument("count_sparse_exact: m > 3 exceeds the enumeration budget; use typicality_bounds");
  if (q.volume() > 1728) throw std::invalid_argument("count_sparse_exact: V > 1728 exceeds the enumeration budget; use typicality_bounds");

  const Lattice lat({q.L, q.L, q.L}, 1);
  const int V = static_cast<int>(q.volume());
  SparseCount out;
  out.total_count = binomial(V, q.m);

  if (q.m <= 1) {
    out.sparse_count = out.total_count;
  } else if (q.m == 2) {
    for (int a = 0; a < V; ++a)
      for (int b = a + 1; b < V; ++b)
        if (lat.distance(a, b) >= q.d) ++out.sparse_count;
  } else {
    for (int a = 0; a < V; ++a)
      for (int b = a + 1; b < V; ++b) {
        if (lat.distance(a, b) < q.d) continue;
        for (int c = b + 1; c < V; ++c)
          if (lat.distance(a, c) >= q.d && lat.distance(b, c) >= q.d) ++out.sparse_count;
      }
  }
  out.fraction = out.total_count ? static_cast<double>(out.sparse_count) /
                                       static_cast<double>(out.total_count)
                                 : 1.0;
  return out;
}

/*
 * The two lower bounds on the sparse fraction: the simple closed form
 * (1 - m v / V)^m and the sharper sequential-placement product
 * V (V-v) ... (V-(m-1)v) / (V (V-1) ... (V-m+1)). Negative factors clamp
 * to zero. `*_num`/`*_den` expose the product form as an exact rational
 * for equality-safe comparisons.
 */
struct TypicalityBounds {
  double simple = 0;
  double product = 0;
  std::int64_t product_num = 0;
  std::int64_t product_den = 1;
};

inline TypicalityBounds typicality_bounds(const SparsityQuery& q) {
  q.validate();
  const std::int64_t V = q.volume();
  const std::int64_t v = q.excluded_volume();
  TypicalityBounds b;

  if (q.m == 0) {
    b.simple = 1.0;
    b.product = 1.0;
    b.product_num = 1;
    return b;
  }

  if (static_cast<std::int64_t>(q.m) * v >= V) {
    b.simple = 0.0;
  } else {
    double base = 1.0 - static_cast<double>(q.m) * static_cast<double>(v) / static_cast<double>(V);
    b.simple = 1.0;
    for (int i = 0; i < q.m; ++i) b.simple *= base;
  }

  b.product_num = 1;
  b.product_den = 1;
  for (int j = 0; j < q.m; ++j) {
    const std::int64_t num = V - static_cast<std::int64_t>(j) * v;
    const std::int64_t den = V - j;
    if (num <= 0) {
      b.product_num = 0;
      break;
    }
    b.product_num *= num;
    b.product_den *= den;
  }
  b.product = static_cast<double>(b.product_num) / static_cast<double>(b.product_den);
  return b;
}

struct SparsityRow {
  int L, m, d;
  std::int64_t v;
  std::int64_t sparse_count, total_count;
  double fraction, bound_simple, bound_product;
};

inline SparsityRow sparsity_row(const SparsityQuery& q) {
  auto count = count_sparse_exact(q);
  auto bounds = typicality_bounds(q);
  return {q.L,           q.m,      q.d,          q.excluded_volume(), count.sparse_count,
          count.total_count, count.fraction, bounds.simple, bounds.product};
}

}  // namespace locgap
