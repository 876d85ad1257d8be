#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace locgap {

using Coord = std::array<int, 3>;

/*
 * Periodic lattice of sites with a fixed number of qubits per site.
 * 2D and 1D models use trailing dimensions of 1. Distances are Chebyshev
 * (L-infinity) with wraparound, so box supports and ball volumes are
 * exact integers.
 */
struct Lattice {
  Coord dims{1, 1, 1};
  int qubits_per_site = 1;

  Lattice() = default;
  Lattice(Coord d, int qps) : dims(d), qubits_per_site(qps) {
    for (int a = 0; a < 3; ++a)
      if (dims[a] < 1) throw std::invalid_argument("Lattice: dims must be >= 1");
    if (qps < 1) throw std::invalid_argument("Lattice: qubits_per_site must be >= 1");
  }

  int volume() const { return dims[0] * dims[1] * dims[2]; }
  int num_qubits() const { return volume() * qubits_per_site; }

  static int mod(int v, int m) {
    int r = v % m;
    return r < 0 ? r + m : r;
  }

  Coord wrap(Coord c) const {
    return {mod(c[0], dims[0]), mod(c[1], dims[1]), mod(c[2], dims[2])};
  }

  /* Site index with x fastest: ((z*Ly + y)*Lx + x). Coordinates wrap. */
  int site(Coord c) const {
    c = wrap(c);
    return (c[2] * dims[1] + c[1]) * dims[0] + c[0];
  }

  Coord coords(int s) const {
    Coord c;
    c[0] = s % dims[0];
    s /= dims[0];
    c[1] = s % dims[1];
    c[2] = s / dims[1];
    return c;
  }

  int qubit(int site_index, int flavor) const { return site_index * qubits_per_site + flavor; }

  int qubit(Coord c, int flavor) const { return qubit(site(c), flavor); }

  int site_of_qubit(int q) const { return q / qubits_per_site; }
  int flavor_of_qubit(int q) const { return q % qubits_per_site; }

  int axis_distance(int a, int b, int axis) const {
    int d = std::abs(a - b) % dims[axis];
    return std::min(d, dims[axis] - d);
  }

  /* Torus Chebyshev distance between two sites. */
  int distance(int sa, int sb) const {
    Coord a = coords(sa), b = coords(sb);
    int d = 0;
    for (int ax = 0; ax < 3; ++ax) d = std::max(d, axis_distance(a[ax], b[ax], ax));
    return d;
  }

  /* Largest torus Chebyshev distance realized between any two sites. */
  int max_distance() const {
    int d = 0;
    for (int ax = 0; ax < 3; ++ax) d = std::max(d, dims[ax] / 2);
    return d;
  }

  /* Smallest extent over axes that are actually used (dim > 1). */
  int min_used_dim() const {
    int m = 0;
    for (int ax = 0; ax < 3; ++ax)
      if (dims[ax] > 1) m = (m == 0) ? dims[ax] : std::min(m, dims[ax]);
    return m == 0 ? 1 : m;
  }

  bool operator==(const Lattice& o) const {
    return dims == o.dims && qubits_per_site == o.qubits_per_site;
  }
  bool operator!=(const Lattice& o) const { return !(*this == o); }
};

}  // namespace locgap
