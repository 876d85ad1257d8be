#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "locgap/parallel.hpp"
#include "locgap/syndrome.hpp"

namespace locgap {

/*
 * Axis-aligned cube of `side` consecutive sites per used axis ("ball of
 * diameter d" in the Chebyshev metric). A box is a proper query region only
 * when side < the smallest used lattice extent, otherwise any global
 * operator would count as local.
 */
struct Box {
  Coord corner{0, 0, 0};
  int side = 1;

  bool is_proper(const Lattice& lat) const { return side >= 1 && side < lat.min_used_dim(); }

  bool contains_site(const Lattice& lat, int site) const {
    Coord c = lat.coords(site);
    for (int ax = 0; ax < 3; ++ax) {
      const int extent = std::min(side, lat.dims[ax]);
      const int rel = Lattice::mod(c[ax] - corner[ax], lat.dims[ax]);
      if (rel >= extent) return false;
    }
    return true;
  }

  std::vector<int> sites(const Lattice& lat) const {
    std::vector<int> out;
    const int ex = std::min(side, lat.dims[0]);
    const int ey = std::min(side, lat.dims[1]);
    const int ez = std::min(side, lat.dims[2]);
    for (int dz = 0; dz < ez; ++dz)
      for (int dy = 0; dy < ey; ++dy)
        for (int dx = 0; dx < ex; ++dx)
          out.push_back(lat.site({corner[0] + dx, corner[1] + dy, corner[2] + dz}));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<int> qubits(const Lattice& lat) const {
    std::vector<int> out;
    for (int s : sites(lat))
      for (int f = 0; f < lat.qubits_per_site; ++f) out.push_back(lat.qubit(s, f));
    return out;
  }

  /* All placements of a side-d box containing both sites. */
  static std::vector<Box> placements_covering(const Lattice& lat, int site_a, int site_b,
                                              int side) {
    std::vector<Box> out;
    for (int s = 0; s < lat.volume(); ++s) {
      Box b{lat.coords(s), side};
      if (b.contains_site(lat, site_a) && b.contains_site(lat, site_b)) out.push_back(b);
    }
    return out;
  }
};

struct TransporterQuery {
  int site_from = 0;
  int site_to = 0;
  int type = 0;
  Box box;

  std::string to_string(const Lattice& lat) const {
    auto c = [&](int s) {
      Coord q = lat.coords(s);
      return "(" + std::to_string(q[0]) + "," + std::to_string(q[1]) + "," + std::to_string(q[2]) +
             ")";
    };
    return "transport type " + std::to_string(type) + " from " + c(site_from) + " to " +
           c(site_to) + " within side-" + std::to_string(box.side) + " box at " +
           c(lat.site(box.corner));
  }
};

/*
 * Verdict for one transporter query. `exists` ships a witness Pauli whose
 * support lies inside the box and whose syndrome is exactly the two queried
 * defects; `none` ships the rank pair of the box-restricted syndrome system,
 * with rank_augmented = rank_restricted + 1.
 */
struct TransporterCertificate {
  TransporterQuery query;
  bool exists = false;
  std::optional<PauliOperator> witness;
  std::size_t rank_restricted = 0;
  std::size_t rank_augmented = 0;
  bool verified = false;
};

/*
 * Decide whether any Pauli supported inside `box` maps a defect of `type`
 * at site_from to site_to (equivalently, creates the pair) with no other
 * defect anywhere on the torus. Completeness over all operators, not just
 * Pauli products, holds because Pauli products span the operator algebra
 * and the target state is a stabilizer eigenstate, so it is enough to
 * decide the Pauli case.
 */
inline TransporterCertificate transporter_exists(const SyndromeMap& map, int site_from,
                                                 int site_to, int type, const Box& box) {
  const StabilizerModel& model = map.model();
  const Lattice& lat = model.lattice();
  TransporterCertificate cert;
  cert.query = {site_from, site_to, type, box};
  if (type < 0 || type >= model.num_generator_types())
    throw std::invalid_argument("transporter_exists: generator type out of range in query " +
                                cert.query.to_string(lat));
  if (site_from == site_to)
    throw std::invalid_argument("transporter_exists: identical sites in query " +
                                cert.query.to_string(lat));
  if (!box.is_proper(lat))
    throw std::invalid_argument("transporter_exists: box is not a proper subset in query " +
                                cert.query.to_string(lat));

  const int n = lat.num_qubits();
  std::vector<int> box_qubits = box.qubits(lat);

  // Restricted column set: x and z parts of the box qubits.
  std::vector<std::size_t> cols;
  cols.reserve(2 * box_qubits.size());
  for (int q : box_qubits) cols.push_back(static_cast<std::size_t>(q));
  for (int q : box_qubits) cols.push_back(static_cast<std::size_t>(n + q));

  // Rows that could be nonzero on those columns: generators within stencil
  // reach of the box, plus the two target rows. Omitted rows are zero rows
  // with zero target, so ranks are unchanged.
  const int reach = model.stencil().radius();
  std::set<int> row_set;
  for (int s : box.sites(lat)) {
    Coord c = lat.coords(s);
    for (int dz = -reach; dz <= reach; ++dz)
      for (int dy = -reach; dy <= reach; ++dy)
        for (int dx = -reach; dx <= reach; ++dx) {
          int gs = lat.site({c[0] + dx, c[1] + dy, c[2] + dz});
          for (int t = 0; t < model.num_generator_types(); ++t)
            row_set.insert(model.generator_index(gs, t));
        }
  }
  row_set.insert(model.generator_index(site_from, type));
  row_set.insert(model.generator_index(site_to, type));
  std::vector<std::size_t> rows(row_set.begin(), row_set.end());

  BitMatrix sub = map.matrix().select_rows(rows).select_columns(cols);
  BitVec target(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] == static_cast<std::size_t>(model.generator_index(site_from, type)) ||
        rows[i] == static_cast<std::size_t>(model.generator_index(site_to, type)))
      target.set(i, true);
  }

  auto sol = sub.solve(target);
  cert.rank_restricted = sol.rank;
  cert.rank_augmented = sol.rank_augmented;
  if (!sol.feasible) {
    cert.exists = false;
    cert.verified = (sol.rank_augmented == sol.rank + 1);
    return cert;
  }

  PauliOperator witness(lat);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (!sol.witness.get(j)) continue;
    if (cols[j] < static_cast<std::size_t>(n))
      witness.set_x(static_cast<int>(cols[j]), true);
    else
      witness.set_z(static_cast<int>(cols[j]) - n, true);
  }
  cert.exists = true;
  cert.witness = witness;

  // Re-verify: support containment is by construction; the full-lattice
  // syndrome must be exactly the two queried defects.
  DefectConfiguration want = DefectConfiguration::empty(model);
  want.set(site_from, type, true);
  want.set(site_to, type, true);
  cert.verified = (map.syndrome(witness) == want);
  return cert;
}

/* One row of a no-strings sweep: a translation class of defect pairs at a
 * given box side, with the OR over box placements. */
struct NoStringsRow {
  int type = 0;
  Coord offset{0, 0, 0};  // canonical representative of {v, -v}
  int separation = 0;
  int side = 0;
  int placements = 0;
  bool exists = false;
  bool all_certified = true;  // every placement's certificate re-verified
  std::optional<PauliOperator> witness;
};

/*
 * Sweep every translation-inequivalent defect pair with Chebyshev
 * separation <= d_max and every box of side <= d_max covering both sites.
 * Pairs are reduced to offsets v from the origin, identified under
 * v ~ -v. For each (type, offset, side) the verdict is the OR over
 * placements; `none` means every placement carries a rank certificate.
 */
inline std::vector<NoStringsRow> certify_no_strings(const SyndromeMap& map, int d_max,
                                                    unsigned threads = 1) {
  const StabilizerModel& model = map.model();
  const Lattice& lat = model.lattice();
  if (d_max >= lat.min_used_dim())
    throw std::invalid_argument("certify_no_strings: d_max must be < min lattice dim (vacuous)");

  // Canonical offsets: lexicographically minimal of {v, -v}, nonzero,
  // with separation <= d_max.
  std::set<Coord> offsets;
  for (int s = 1; s < lat.volume(); ++s) {
    Coord v = lat.coords(s);
    if (lat.distance(0, s) > d_max) continue;
    Coord w = lat.wrap({-v[0], -v[1], -v[2]});
    offsets.insert(std::min(v, w));
  }

  struct Task {
    int type;
    Coord offset;
  };
  std::vector<Task> tasks;
  for (int t = 0; t < model.num_generator_types(); ++t)
    for (const auto& v : offsets) tasks.push_back({t, v});

  std::vector<std::vector<NoStringsRow>> results(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t ti) {
    const auto& task = tasks[ti];
    const int site_to = lat.site(task.offset);
    const int sep = lat.distance(0, site_to);
    std::vector<NoStringsRow> rows;
    for (int side = sep + 1; side <= d_max; ++side) {
      NoStringsRow row;
      row.type = task.type;
      row.offset = task.offset;
      row.separation = sep;
      row.side = side;
      auto placements = Box::placements_covering(lat, 0, site_to, side);
      row.placements = static_cast<int>(placements.size());
      for (const auto& box : placements) {
        auto cert = transporter_exists(map, 0, site_to, task.type, box);
        row.all_certified = row.all_certified && cert.verified;
        if (cert.exists) {
          row.exists = true;
          if (!row.witness) row.witness = cert.witness;
        }
      }
      rows.push_back(std::move(row));
    }
    if (rows.empty()) {
      // Separation too large for any box of side <= d_max: record the
      // vacuously transportless class.
      NoStringsRow row;
      row.type = task.type;
      row.offset = task.offset;
      row.separation = sep;
      row.side = d_max;
      row.placements = 0;
      rows.push_back(std::move(row));
    }
    results[ti] = std::move(rows);
  });

  std::vector<NoStringsRow> table;
  for (auto& rs : results)
    for (auto& r : rs) table.push_back(std::move(r));
  return table;
}

/*
 * A certificate that a valid defect configuration is locally gapped: no
 * operator supported on a box of the certified diameter connects it to
 * another same-energy state, and everything else is 2J away in energy.
 * The diameter is the minimum pairwise defect separation, capped by the
 * largest side for which a no-strings sweep of this model returned all
 * `none`.
 */
struct LocalGapCertificate {
  DefectConfiguration config;
  int diameter = 0;
  double energy_gap = 0;
  int min_separation = 0;
  int certified_side = 0;  // largest all-none swept side (0 = nothing swept)
};

inline LocalGapCertificate local_gap_certificate(const SyndromeMap& map,
                                                 const DefectConfiguration& config,
                                                 int sweep_cap = 0, unsigned threads = 1) {
  const StabilizerModel& model = map.model();
  const Lattice& lat = model.lattice();
  auto validity = map.is_valid(config);
  if (!validity.valid)
    throw std::invalid_argument("local_gap_certificate: configuration is invalid (rank " +
                                std::to_string(validity.rank) + " vs augmented " +
                                std::to_string(validity.rank_augmented) + ")");
  LocalGapCertificate cert;
  cert.config = config;
  cert.energy_gap = 2.0 * model.coupling();

  auto defs = config.defects();
  int d_sep = lat.min_used_dim() - 1;  // ground state: diameter L-1
  for (std::size_t i = 0; i < defs.size(); ++i)
    for (std::size_t j = i + 1; j < defs.size(); ++j)
      d_sep = std::min(d_sep, lat.distance(defs[i].first, defs[j].first));
  cert.min_separation = d_sep;

  if (defs.empty()) {
    // Nothing to transport; topological order alone gives diameter L-1.
    cert.diameter = d_sep;
    cert.certified_side = d_sep;
    return cert;
  }

  int want = std::min(d_sep, lat.min_used_dim() - 1);
  if (sweep_cap > 0) want = std::min(want, sweep_cap);
  int certified = 1;  // side-1 boxes cannot cover two distinct sites
  if (want >= 2) {
    auto table = certify_no_strings(map, want, threads);
    certified = want;
    for (const auto& row : table)
      if (row.exists) certified = std::min(certified, row.side - 1);
  }
  cert.certified_side = certified;
  cert.diameter = std::min(d_sep, certified);
  return cert;
}

struct RealizerResult {
  std::optional<PauliOperator> realizer;
  bool complete = false;  // search exhausted below the cutoff
  std::uint64_t nodes = 0;
};

/*
 * Minimal-weight Pauli with the given syndrome, by iterative-deepening DFS
 * over supports. Branching is anchored on the first uncovered defect: any
 * realizer must touch the generator of that defect with an anticommuting
 * letter, so enumerating (support qubit, letter) candidates there is
 * exhaustive. Qubits are never assigned twice (re-assignment composes
 * letters, which an earlier branch already covers).
 */
inline RealizerResult min_weight_realizer(const SyndromeMap& map,
                                          const DefectConfiguration& config, int weight_cutoff,
                                          std::uint64_t node_budget = 50'000'000) {
  const StabilizerModel& model = map.model();
  const Lattice& lat = model.lattice();
  const int n = lat.num_qubits();
  RealizerResult result;

  if (!config.bits().any()) {
    result.realizer = PauliOperator::identity(lat);
    result.complete = true;
    return result;
  }
  // A realizer exists at any weight iff the configuration is valid.
  if (!map.is_valid(config).valid) {
    result.complete = true;
    return result;
  }

  // Lazily extracted syndrome columns of single-qubit sigma-x / sigma-z.
  std::map<int, BitVec> col_cache;
  auto column = [&](int c) -> const BitVec& {
    auto it = col_cache.find(c);
    if (it != col_cache.end()) return it->second;
    BitVec v(map.matrix().rows());
    for (std::size_t r = 0; r < map.matrix().rows(); ++r)
      if (map.matrix().get(r, static_cast<std::size_t>(c))) v.set(r, true);
    return col_cache.emplace(c, std::move(v)).first->second;
  };
  auto letter_syndrome = [&](int q, Pauli l) {
    BitVec v(map.matrix().rows());
    if (pauli_has_x(l)) v ^= column(q);
    if (pauli_has_z(l)) v ^= column(n + q);
    return v;
  };

  std::vector<std::pair<int, Pauli>> chosen;
  std::vector<bool> used(n, false);
  bool exceeded = false;

  std::function<bool(const BitVec&, int)> dfs = [&](const BitVec& residual, int budget) -> bool {
    if (!residual.any()) return true;
    if (budget == 0) return false;
    if (++result.nodes > node_budget) {
      exceeded = true;
      return false;
    }
    const auto first = residual.set_indices().front();
    const int site = model.generator_site(static_cast<int>(first));
    const int type = model.generator_type(static_cast<int>(first));
    PauliOperator gen = model.generator_at(site, type);
    for (int q : gen.support()) {
      if (used[q]) continue;
      for (Pauli l : {Pauli::X, Pauli::Z, Pauli::Y}) {
        // Candidate letters must anticommute with the generator at q.
        bool anti = (pauli_has_x(l) && gen.z_bit(q)) ^ (pauli_has_z(l) && gen.x_bit(q));
        if (!anti) continue;
        used[q] = true;
        chosen.emplace_back(q, l);
        BitVec next = residual;
        next ^= letter_syndrome(q, l);
        if (dfs(next, budget - 1)) return true;
        chosen.pop_back();
        used[q] = false;
        if (exceeded) return false;
      }
    }
    return false;
  };

  for (int w = 1; w <= weight_cutoff; ++w) {
    chosen.clear();
    std::fill(used.begin(), used.end(), false);
    if (dfs(config.bits(), w)) {
      PauliOperator p(lat);
      for (auto [q, l] : chosen) p.apply_letter(q, l);
      result.realizer = p;
      result.complete = true;
      return result;
    }
    if (exceeded) {
      result.complete = false;
      return result;
    }
  }
  result.complete = true;
  return result;
}

/* JSON forms for archival and independent re-verification. */

inline nlohmann::json to_json(const Lattice& lat, const PauliOperator& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (int q : p.support()) {
    Coord c = lat.coords(lat.site_of_qubit(q));
    char l = p.x_bit(q) ? (p.z_bit(q) ? 'Y' : 'X') : 'Z';
    arr.push_back({{"site", {c[0], c[1], c[2]}},
                   {"flavor", lat.flavor_of_qubit(q)},
                   {"letter", std::string(1, l)}});
  }
  return arr;
}

inline nlohmann::json to_json(const Lattice& lat, const TransporterCertificate& cert) {
  Coord from = lat.coords(cert.query.site_from);
  Coord to = lat.coords(cert.query.site_to);
  nlohmann::json j{
      {"query",
       {{"from", {from[0], from[1], from[2]}},
        {"to", {to[0], to[1], to[2]}},
        {"type", cert.query.type},
        {"box", {{"corner", {cert.query.box.corner[0], cert.query.box.corner[1],
                             cert.query.box.corner[2]}},
                 {"side", cert.query.box.side}}}}},
      {"verdict", cert.exists ? "exists" : "none"},
      {"verified", cert.verified}};
  if (cert.exists)
    j["witness"] = to_json(lat, *cert.witness);
  else
    j["ranks"] = {{"restricted", cert.rank_restricted}, {"augmented", cert.rank_augmented}};
  return j;
}

inline nlohmann::json to_json(const Lattice& lat, const NoStringsRow& row) {
  nlohmann::json j{{"type", row.type},
                   {"offset", {row.offset[0], row.offset[1], row.offset[2]}},
                   {"separation", row.separation},
                   {"side", row.side},
                   {"placements", row.placements},
                   {"verdict", row.exists ? "exists" : "none"},
                   {"all_certified", row.all_certified}};
  if (row.witness) j["witness"] = to_json(lat, *row.witness);
  return j;
}

}  // namespace locgap
