#pragma once

#include <cstdint>
#include <vector>

// Unpacked GF(2) elimination, kept deliberately independent of the packed
// kernels it cross-checks.
namespace naive {

using Matrix = std::vector<std::vector<std::uint8_t>>;

inline int rank(Matrix m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size(), cols = m[0].size();
  int r = 0;
  for (std::size_t c = 0; c < cols && static_cast<std::size_t>(r) < rows; ++c) {
    std::size_t p = r;
    while (p < rows && !m[p][c]) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    for (std::size_t i = 0; i < rows; ++i)
      if (i != static_cast<std::size_t>(r) && m[i][c])
        for (std::size_t j = 0; j < cols; ++j) m[i][j] ^= m[r][j];
    ++r;
  }
  return r;
}

}  // namespace naive
