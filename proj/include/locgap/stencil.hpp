#pragma once

#include <array>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "locgap/pauli.hpp"

namespace locgap {

/* One Pauli letter of a generator, relative to the generator's site. */
struct StencilEntry {
  Coord offset{0, 0, 0};
  int qubit = 0;  // flavor index within the site
  Pauli letter = Pauli::X;
};

/*
 * Translation-invariant generator stencils. Instantiating generator type t
 * at site i translates every entry offset by i modulo the lattice dims.
 */
struct Stencil {
  std::string name;
  int qubits_per_site = 1;
  Coord dims_required{0, 0, 0};  // 0 = any extent on that axis, 1 = must be flat
  std::vector<std::string> type_names;
  std::vector<std::vector<StencilEntry>> generator_types;
  int defect_sublattices = 1;  // 2 for checkerboard models (Wen plaquette)

  int num_types() const { return static_cast<int>(generator_types.size()); }

  /* Largest |offset| component over all entries. */
  int radius() const {
    int r = 0;
    for (const auto& g : generator_types)
      for (const auto& e : g)
        for (int a = 0; a < 3; ++a) r = std::max(r, std::abs(e.offset[a]));
    return r;
  }

  void validate() const {
    if (generator_types.empty()) throw std::invalid_argument("Stencil: no generator types");
    for (const auto& g : generator_types)
      if (g.empty()) throw std::invalid_argument("Stencil: empty generator type");
    if (qubits_per_site < 1) throw std::invalid_argument("Stencil: qubits_per_site < 1");
    for (const auto& g : generator_types)
      for (const auto& e : g)
        if (e.qubit < 0 || e.qubit >= qubits_per_site)
          throw std::invalid_argument("Stencil: entry qubit index out of range");
    if (!type_names.empty() && type_names.size() != generator_types.size())
      throw std::invalid_argument("Stencil: type_names size mismatch");
  }

  nlohmann::json to_json() const {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : generator_types) {
      nlohmann::json entries = nlohmann::json::array();
      for (const auto& e : g)
        entries.push_back({{"dx", e.offset[0]},
                           {"dy", e.offset[1]},
                           {"dz", e.offset[2]},
                           {"qubit", e.qubit},
                           {"letter", std::string(1, pauli_letter(e.letter))}});
      gens.push_back(entries);
    }
    nlohmann::json j{{"name", name},
                     {"dims_required", {dims_required[0], dims_required[1], dims_required[2]}},
                     {"qubits_per_site", qubits_per_site},
                     {"generators", gens}};
    if (!type_names.empty()) j["type_names"] = type_names;
    if (defect_sublattices != 1) j["defect_sublattices"] = defect_sublattices;
    return j;
  }

  static Stencil from_json(const nlohmann::json& j) {
    Stencil s;
    s.name = j.at("name").get<std::string>();
    s.qubits_per_site = j.at("qubits_per_site").get<int>();
    if (j.contains("dims_required")) {
      auto d = j.at("dims_required");
      for (int a = 0; a < 3; ++a) s.dims_required[a] = d.at(a).get<int>();
    }
    if (j.contains("type_names")) s.type_names = j.at("type_names").get<std::vector<std::string>>();
    s.defect_sublattices = j.value("defect_sublattices", 1);
    for (const auto& g : j.at("generators")) {
      std::vector<StencilEntry> entries;
      for (const auto& e : g) {
        StencilEntry ent;
        ent.offset = {e.at("dx").get<int>(), e.at("dy").get<int>(), e.at("dz").get<int>()};
        ent.qubit = e.at("qubit").get<int>();
        const auto letter = e.at("letter").get<std::string>();
        if (letter.size() != 1) throw std::invalid_argument("Stencil: letter must be one char");
        ent.letter = pauli_from_letter(letter[0]);
        entries.push_back(ent);
      }
      s.generator_types.push_back(std::move(entries));
    }
    s.validate();
    return s;
  }

  static Stencil load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("Stencil: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
  }
};

}  // namespace locgap
