// Command-line driver: build stabilizer models, certify mobility and local
// gaps, count sparse configurations, compute entanglement, and run the
// dense spectral-flow and dynamics experiments. Every run writes its fully
// resolved configuration next to its outputs so it can be reproduced with
// --config. Exit codes: 0 success, 1 usage error, 2 invariant violation.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "locgap/counting.hpp"
#include "locgap/csv.hpp"
#include "locgap/dynamics.hpp"
#include "locgap/entanglement.hpp"
#include "locgap/mobility.hpp"

using namespace locgap;
using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;

std::string g_outdir = ".";
unsigned g_threads = 2;

std::string out_path(const std::string& name) {
  std::filesystem::create_directories(g_outdir);
  return (std::filesystem::path(g_outdir) / name).string();
}

void write_json_file(const std::string& name, const json& j) {
  std::ofstream out(out_path(name));
  out << j.dump(2) << "\n";
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  json j;
  in >> j;
  return j;
}

Coord parse_dims(const std::string& s) {
  Coord d{1, 1, 1};
  std::stringstream ss(s);
  std::string part;
  int i = 0;
  while (std::getline(ss, part, 'x') && i < 3) d[i++] = std::stoi(part);
  if (i == 0) throw CLI::ValidationError("--dims", "expected AxB or AxBxC");
  return d;
}

std::string dims_string(Coord d) {
  return std::to_string(d[0]) + "x" + std::to_string(d[1]) + "x" + std::to_string(d[2]);
}

/* Model selection shared by most subcommands. */
struct ModelArgs {
  std::string model = "cubic_code";
  int L = 0;
  std::string dims;
  std::string stencil_path;
  double coupling = 1.0;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--model", model, "builtin model name (cubic_code, toric_code_2d, wen_plaquette, ising_chain)");
    cmd->add_option("--L", L, "cubic linear size (LxLxL, or LxL / L for 2D / 1D models)");
    cmd->add_option("--dims", dims, "explicit dimensions AxBxC (overrides --L)");
    cmd->add_option("--stencil", stencil_path, "JSON stencil file replacing the builtin model");
    cmd->add_option("--J", coupling, "coupling J > 0 (default 1)");
  }

  void apply_config(const json& j) {
    if (j.contains("model")) model = j["model"].get<std::string>();
    if (j.contains("L")) L = j["L"].get<int>();
    if (j.contains("dims")) dims = j["dims"].get<std::string>();
    if (j.contains("stencil")) stencil_path = j["stencil"].get<std::string>();
    if (j.contains("J")) coupling = j["J"].get<double>();
  }

  StabilizerModel build() const {
    if (!stencil_path.empty()) {
      Stencil s = Stencil::load(stencil_path);
      if (!dims.empty()) return StabilizerModel(s, parse_dims(dims), coupling);
      if (L > 0) return StabilizerModel(s, {L, L, L}, coupling);
      throw CLI::ValidationError("--stencil", "needs --dims or --L");
    }
    ModelName name = model_name_from_string(model);
    if (!dims.empty()) return StabilizerModel(
        name == ModelName::cubic_code ? cubic_code_stencil()
        : name == ModelName::toric_code_2d ? toric_code_stencil()
        : name == ModelName::wen_plaquette ? wen_plaquette_stencil()
                                            : ising_chain_stencil(),
        parse_dims(dims), coupling);
    if (L <= 0) throw CLI::ValidationError("--L", "a size is required (--L or --dims)");
    return build_model_cubic(name, L, coupling);
  }

  json resolved(const StabilizerModel& m) const {
    return json{{"model", m.name()},
                {"dims", dims_string(m.lattice().dims)},
                {"J", coupling},
                {"stencil", stencil_path}};
  }
};

/* "x,y,z:t;x,y,z:t" into a defect configuration. */
DefectConfiguration parse_defects(const StabilizerModel& m, const std::string& s) {
  auto c = DefectConfiguration::empty(m);
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("--defects", "expected x,y,z:type entries");
    Coord xyz{0, 0, 0};
    std::stringstream cs(item.substr(0, colon));
    std::string num;
    int i = 0;
    while (std::getline(cs, num, ',') && i < 3) xyz[i++] = std::stoi(num);
    const int type = std::stoi(item.substr(colon + 1));
    if (type < 0 || type >= m.num_generator_types())
      throw CLI::ValidationError("--defects", "type index out of range in " + item);
    c.flip(m.lattice().site(xyz), type);
  }
  return c;
}

/* "Z:x,y,z,f;X:x,y,z,f" into a Pauli operator. */
PauliOperator parse_operator(const StabilizerModel& m, const std::string& s) {
  PauliOperator p(m.lattice());
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon != 1)
      throw CLI::ValidationError("--op", "expected LETTER:x,y,z,flavor entries");
    Pauli letter = pauli_from_letter(item[0]);
    std::stringstream cs(item.substr(colon + 1));
    std::string num;
    std::vector<int> vals;
    while (std::getline(cs, num, ',')) vals.push_back(std::stoi(num));
    if (vals.size() != 4) throw CLI::ValidationError("--op", "need x,y,z,flavor in " + item);
    p.apply_letter(m.lattice().qubit({vals[0], vals[1], vals[2]}, vals[3]), letter);
  }
  return p;
}

std::string coord_string(const Lattice& lat, int site) {
  Coord c = lat.coords(site);
  return std::to_string(c[0]) + "," + std::to_string(c[1]) + "," + std::to_string(c[2]);
}

void print_schema(const std::vector<std::pair<std::string, std::string>>& cols) {
  for (const auto& [name, desc] : cols) std::cout << name << ": " << desc << "\n";
}

/* ------------------------------------------------------------------ */

int cmd_model_info(const ModelArgs& margs, bool with_degeneracy) {
  StabilizerModel m = margs.build();
  json info{{"format_version", kFormatVersion},
            {"name", m.name()},
            {"dims", dims_string(m.lattice().dims)},
            {"qubits", m.lattice().num_qubits()},
            {"generators", m.num_generators()},
            {"generator_types", m.num_generator_types()},
            {"stencil", m.stencil().to_json()}};
  std::vector<int> weights;
  for (int t = 0; t < m.num_generator_types(); ++t)
    weights.push_back(static_cast<int>(m.generator_at(0, t).weight()));
  info["generator_weights"] = weights;
  if (with_degeneracy) {
    SyndromeMap map(m);
    info["encoded_qubits"] = map.encoded_qubits();
  }
  write_json_file("model_info.json", info);
  write_json_file("model_info_config.json", json{{"command", "model-info"}, {"config", margs.resolved(m)}});
  std::cout << "model " << m.name() << " " << dims_string(m.lattice().dims) << ": "
            << m.lattice().num_qubits() << " qubits, " << m.num_generators()
            << " generators, all commuting\n";
  return kExitOk;
}

int cmd_syndrome(const ModelArgs& margs, const std::string& op_string) {
  StabilizerModel m = margs.build();
  SyndromeMap map(m);
  PauliOperator p = parse_operator(m, op_string);
  auto c = map.syndrome(p);
  CsvWriter csv(out_path("syndrome.csv"), {"x", "y", "z", "type"});
  for (auto [site, type] : c.defects()) {
    Coord xyz = m.lattice().coords(site);
    csv.row({static_cast<long long>(xyz[0]), static_cast<long long>(xyz[1]),
             static_cast<long long>(xyz[2]), static_cast<long long>(type)});
  }
  write_json_file("syndrome_config.json", json{{"command", "syndrome"},
                                               {"config", margs.resolved(m)},
                                               {"op", op_string}});
  std::cout << "syndrome of " << p.to_string() << ": " << c.total() << " defects, energy "
            << c.energy_above_ground(m.coupling()) << "\n";
  return kExitOk;
}

int cmd_validity(const ModelArgs& margs, const std::string& defects, int random_count,
                 const std::string& parity, std::uint64_t seed, const std::string& expect) {
  StabilizerModel m = margs.build();
  SyndromeMap map(m);
  json results = json::array();
  int valid_count = 0, invalid_count = 0;
  bool violation = false;

  auto check_one = [&](const DefectConfiguration& c, const std::string& label) {
    auto res = map.is_valid(c);
    json r{{"label", label}, {"valid", res.valid}};
    if (res.valid) {
      if (map.syndrome(*res.witness) != c)
        throw std::logic_error("validity: witness failed re-verification for " + label);
      r["witness_weight"] = res.witness->weight();
    } else {
      r["rank"] = res.rank;
      r["rank_augmented"] = res.rank_augmented;
    }
    results.push_back(r);
    (res.valid ? valid_count : invalid_count)++;
    if (expect == "valid" && !res.valid) violation = true;
    if (expect == "invalid" && res.valid) violation = true;
  };

  if (random_count > 0) {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < random_count; ++i) {
      auto c = DefectConfiguration::empty(m);
      for (int g = 0; g < m.num_generators(); ++g)
        if (rng() & 1) c.flip(m.generator_site(g), m.generator_type(g));
      for (int t = 0; t < m.num_generator_types(); ++t) {
        const bool want_odd = (parity == "odd");
        if ((c.count(t) % 2 != 0) != want_odd) c.flip(0, t);
      }
      check_one(c, "random_" + std::to_string(i));
    }
  } else {
    check_one(parse_defects(m, defects), "explicit");
  }

  write_json_file("validity.json", json{{"format_version", kFormatVersion}, {"results", results}});
  write_json_file("validity_config.json",
                  json{{"command", "validity"},
                       {"config", margs.resolved(m)},
                       {"defects", defects},
                       {"random", random_count},
                       {"parity", parity},
                       {"seed", seed},
                       {"expect", expect}});
  std::cout << "validity: " << valid_count << " valid, " << invalid_count << " invalid\n";
  if (!expect.empty() && violation) {
    std::cerr << "expectation '" << expect << "' violated\n";
    return kExitViolation;
  }
  return kExitOk;
}

int cmd_degeneracy(const ModelArgs& margs) {
  StabilizerModel m = margs.build();
  SyndromeMap map(m);
  const int k = map.encoded_qubits();
  write_json_file("degeneracy.json", json{{"format_version", kFormatVersion},
                                          {"encoded_qubits", k},
                                          {"degeneracy", 1ll << k},
                                          {"stabilizer_rank", map.stabilizer_rank()}});
  write_json_file("degeneracy_config.json",
                  json{{"command", "degeneracy"}, {"config", margs.resolved(m)}});
  std::cout << "k=" << k << ", degeneracy " << (1ll << k) << "\n";
  return kExitOk;
}

int cmd_certify_no_strings(const ModelArgs& margs, int d_max, const std::string& expect,
                           bool dump_certs) {
  StabilizerModel m = margs.build();
  SyndromeMap map(m);
  auto table = certify_no_strings(map, d_max, g_threads);
  CsvWriter csv(out_path("nostrings.csv"),
                {"type", "dx", "dy", "dz", "separation", "side", "placements", "verdict",
                 "certified"});
  int exists_count = 0, none_count = 0;
  bool all_certified = true;
  json certs = json::array();
  for (const auto& row : table) {
    csv.row({static_cast<long long>(row.type), static_cast<long long>(row.offset[0]),
             static_cast<long long>(row.offset[1]), static_cast<long long>(row.offset[2]),
             static_cast<long long>(row.separation), static_cast<long long>(row.side),
             static_cast<long long>(row.placements),
             std::string(row.exists ? "exists" : "none"),
             static_cast<long long>(row.all_certified ? 1 : 0)});
    (row.exists ? exists_count : none_count)++;
    all_certified = all_certified && row.all_certified;
    if (dump_certs) certs.push_back(to_json(m.lattice(), row));
  }
  if (dump_certs)
    write_json_file("nostrings_certificates.json",
                    json{{"format_version", kFormatVersion}, {"rows", certs}});
  write_json_file("nostrings_config.json", json{{"command", "certify-no-strings"},
                                                {"config", margs.resolved(m)},
                                                {"dmax", d_max},
                                                {"expect", expect}});
  std::cout << "no-strings sweep d<=" << d_max << ": " << none_count << " none, " << exists_count
            << " exists, certified=" << (all_certified ? "yes" : "NO") << "\n";
  if (!all_certified) return kExitViolation;
  if (expect == "none" && exists_count > 0) {
    std::cerr << "expectation violated: a transporter exists\n";
    return kExitViolation;
  }
  if (expect == "exists" && none_count > 0) {
    std::cerr << "expectation violated: some pair is immobile\n";
    return kExitViolation;
  }
  return kExitOk;
}

int cmd_local_gap(const ModelArgs& margs, const std::string& defects, int sweep_cap) {
  StabilizerModel m = margs.build();
  SyndromeMap map(m);
  auto config = parse_defects(m, defects);
  auto cert = local_gap_certificate(map, config, sweep_cap, g_threads);
  json defect_list = json::array();
  for (auto [site, type] : config.defects())
    defect_list.push_back({{"site", coord_string(m.lattice(), site)}, {"type", type}});
  write_json_file("localgap.json", json{{"format_version", kFormatVersion},
                                        {"defects", defect_list},
                                        {"diameter", cert.diameter},
                                        {"energy_gap", cert.energy_gap},
                                        {"min_separation", cert.min_separation},
                                        {"certified_side", cert.certified_side}});
  write_json_file("localgap_config.json", json{{"command", "local-gap"},
                                               {"config", margs.resolved(m)},
                                               {"defects", defects},
                                               {"sweep_cap", sweep_cap}});
  std::cout << "locally gapped: diameter " << cert.diameter << ", energy gap " << cert.energy_gap
            << " (min separation " << cert.min_separation << ", certified side "
            << cert.certified_side << ")\n";
  return kExitOk;
}

int cmd_count_sparse(int L, int m, int d, int L_max, int m_max, int d_max) {
  CsvWriter csv(out_path("countsparse.csv"),
                {"L", "m", "d", "v", "sparse_count", "total", "fraction", "bound_simple",
                 "bound_product"});
  const int l_lo = (L_max > 0) ? 2 : L, l_hi = (L_max > 0) ? L_max : L;
  const int m_lo = (m_max > 0) ? 0 : m, m_hi = (m_max > 0) ? m_max : m;
  const int d_lo = (d_max > 0) ? 1 : d, d_hi = (d_max > 0) ? d_max : d;
  SparsityRow last{};
  bool violation = false;
  for (int li = l_lo; li <= l_hi; ++li)
    for (int mi = m_lo; mi <= m_hi; ++mi)
      for (int di = d_lo; di <= d_hi; ++di) {
        auto row = sparsity_row({li, mi, di});
        csv.row({static_cast<long long>(row.L), static_cast<long long>(row.m),
                 static_cast<long long>(row.d), static_cast<long long>(row.v),
                 static_cast<long long>(row.sparse_count), static_cast<long long>(row.total_count),
                 row.fraction, row.bound_simple, row.bound_product});
        if (row.fraction + 1e-12 < row.bound_simple || row.fraction + 1e-12 < row.bound_product)
          violation = true;
        last = row;
      }
  write_json_file("countsparse_config.json", json{{"command", "count-sparse"},
                                                  {"L", L},
                                                  {"m", m},
                                                  {"d", d},
                                                  {"Lmax", L_max},
                                                  {"mmax", m_max},
                                                  {"dmax", d_max}});
  std::cout << "count-sparse: last row L=" << last.L << " m=" << last.m << " d=" << last.d << ": "
            << last.sparse_count << "/" << last.total_count << " fraction " << last.fraction
            << " >= bounds (" << last.bound_simple << ", " << last.bound_product << ")\n";
  return violation ? kExitViolation : kExitOk;
}

int cmd_entropy(const ModelArgs& margs, const std::string& excite, const std::string& sector_bits,
                const std::string& box_spec, int random_regions, std::uint64_t seed) {
  StabilizerModel m = margs.build();
  SyndromeMap map(m);
  PauliOperator excitation =
      excite.empty() ? PauliOperator::identity(m.lattice()) : parse_operator(m, excite);
  std::vector<bool> sector(map.encoded_qubits(), false);
  for (std::size_t i = 0; i < sector_bits.size() && i < sector.size(); ++i)
    sector[i] = sector_bits[i] == '1';
  StabilizerEigenstate state(map, excitation, sector);

  CsvWriter csv(out_path("entropy.csv"), {"region", "qubits", "S_bits", "restricted_rank"});
  auto emit = [&](const Region& r, const std::string& label) {
    auto [rank, size] = state.rank_diagnostics(r);
    csv.row({label, static_cast<long long>(size),
             static_cast<long long>(state.entropy_bits(r)), static_cast<long long>(rank)});
  };
  if (!box_spec.empty()) {
    // corner x,y,z : sides a,b,c
    const auto colon = box_spec.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("--box", "expected x,y,z:a,b,c");
    Coord corner{0, 0, 0}, sides{1, 1, 1};
    std::stringstream cs(box_spec.substr(0, colon)), ss(box_spec.substr(colon + 1));
    std::string num;
    int i = 0;
    while (std::getline(cs, num, ',') && i < 3) corner[i++] = std::stoi(num);
    i = 0;
    while (std::getline(ss, num, ',') && i < 3) sides[i++] = std::stoi(num);
    emit(Region::box(m.lattice(), corner, sides), box_spec);
  }
  if (random_regions > 0) {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < random_regions; ++i) {
      Region r;
      for (int q = 0; q < m.lattice().num_qubits(); ++q)
        if (rng() & 1) r.qubits.push_back(q);
      emit(r, "random_" + std::to_string(i));
    }
  }
  write_json_file("entropy_config.json", json{{"command", "entropy"},
                                              {"config", margs.resolved(m)},
                                              {"excite", excite},
                                              {"sector", sector_bits},
                                              {"box", box_spec},
                                              {"random_regions", random_regions},
                                              {"seed", seed}});
  std::cout << "entropy: wrote " << (random_regions + (box_spec.empty() ? 0 : 1))
            << " regions to entropy.csv\n";
  return kExitOk;
}

double bessel_j0(double x) {
  const double q = x * x / 4.0;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

int cmd_evolve_bessel(double lambda, double t_max, int steps, double tol) {
  const int length = 256;
  auto apply = make_hopping_chain_apply(length, lambda);
  VectorXcd psi0 = VectorXcd::Zero(length);
  psi0[length / 2] = 1.0;
  VectorXcd state = psi0;
  KrylovOptions opts;
  opts.tol = tol;
  CsvWriter csv(out_path("evolve.csv"), {"t", "survival", "bessel_abs", "abs_err"});
  csv.row({0.0, 1.0, std::abs(bessel_j0(0.0)), 0.0});
  double worst = 0;
  const double dt = t_max / steps;
  for (int i = 1; i <= steps; ++i) {
    state = krylov_expm(apply, state, dt, opts);
    const double survival = std::abs(psi0.dot(state));
    const double ref = std::abs(bessel_j0(lambda * i * dt));
    worst = std::max(worst, std::abs(survival - ref));
    csv.row({i * dt, survival, ref, std::abs(survival - ref)});
  }
  write_json_file("evolve_config.json", json{{"command", "evolve"},
                                             {"benchmark", "bessel"},
                                             {"lambda", lambda},
                                             {"tmax", t_max},
                                             {"steps", steps},
                                             {"krylov_tol", tol}});
  write_json_file("evolve_summary.json",
                  json{{"format_version", kFormatVersion}, {"max_abs_err", worst}});
  std::cout << "bessel benchmark: max |survival - |J0|| = " << worst << " over lambda*t in [0,"
            << lambda * t_max << "]\n";
  return kExitOk;
}

int cmd_evolve_model(const ModelArgs& margs, double s, const std::string& defects, double t_max,
                     int steps, double tol, std::uint64_t seed) {
  StabilizerModel m = margs.build();
  const int n = m.lattice().num_qubits();
  if (n > 22) throw CLI::ValidationError("--model", "state-vector evolution capped at 22 qubits");
  SyndromeMap map(m);
  auto config = parse_defects(m, defects);
  auto validity = map.is_valid(config);
  if (!validity.valid)
    throw std::invalid_argument("evolve: defect configuration is invalid (rank " +
                                std::to_string(validity.rank) + " vs " +
                                std::to_string(validity.rank_augmented) + ")");
  // Ground sector 0 state, excited by the witness.
  auto logicals = map.logical_basis();
  std::vector<PauliTerm> gens;
  std::vector<bool> signs;
  for (int site = 0; site < m.lattice().volume(); ++site)
    for (int t = 0; t < m.num_generator_types(); ++t) {
      gens.push_back(PauliTerm::from_pauli(m.generator_at(site, t), 1.0));
      signs.push_back(false);
    }
  for (const auto& z : logicals.z_ops) {
    gens.push_back(PauliTerm::from_pauli(z, 1.0));
    signs.push_back(false);
  }
  VectorXd ground = stabilizer_state_dense(gens, signs, n, seed);
  PauliTerm w = PauliTerm::from_pauli(*validity.witness, 1.0);
  w.amp = 1.0;
  VectorXd excited(ground.size());
  apply_terms_real({w}, ground, excited);
  VectorXcd psi0 = excited.cast<Complex>();

  auto h_terms = hamiltonian_terms(m);
  for (auto t : uniform_field_terms(m.lattice(), 1.0, 1.0)) {
    t.amp *= s;
    h_terms.push_back(t);
  }
  auto apply = make_apply(h_terms);
  KrylovOptions opts;
  opts.tol = tol;
  VectorXcd hpsi;
  apply(psi0, hpsi);
  const double e0 = std::real(psi0.dot(hpsi));

  CsvWriter csv(out_path("evolve.csv"), {"t", "survival", "energy", "norm"});
  csv.row({0.0, 1.0, e0, 1.0});
  VectorXcd state = psi0;
  const double dt = t_max / steps;
  for (int i = 1; i <= steps; ++i) {
    state = krylov_expm(apply, state, dt, opts);
    apply(state, hpsi);
    csv.row({i * dt, std::abs(psi0.dot(state)), std::real(state.dot(hpsi)), state.norm()});
  }
  write_json_file("evolve_config.json", json{{"command", "evolve"},
                                             {"config", margs.resolved(m)},
                                             {"s", s},
                                             {"defects", defects},
                                             {"tmax", t_max},
                                             {"steps", steps},
                                             {"krylov_tol", tol},
                                             {"seed", seed}});
  std::cout << "evolved " << n << " qubits to t=" << t_max << " at s=" << s << "; final survival "
            << std::abs(psi0.dot(state)) << "\n";
  return kExitOk;
}

int cmd_spectral_flow(const ModelArgs& margs, double s, double gamma, double threshold, int steps,
                      double flow_tol, int refinements, double fd_delta, int profile_site) {
  StabilizerModel m = margs.build();
  auto inst = DenseInstance::make(m, uniform_field_terms(m.lattice(), 1.0, 1.0));
  FlowOptions opts;
  opts.n_steps = steps;
  opts.gamma = gamma;
  opts.cluster_threshold = threshold;
  opts.flow_tol = flow_tol;
  opts.max_refinements = refinements;
  opts.track_eigensystems = true;

  FlowResult res;
  try {
    res = flow_unitary(inst, s, opts);
  } catch (const std::runtime_error& e) {
    std::cerr << "spectral-flow failed: " << e.what() << "\n";
    return kExitViolation;
  }

  json summary{{"format_version", kFormatVersion},
               {"s", s},
               {"n_steps", res.n_steps},
               {"projector_defect", res.projector_defect},
               {"unitarity_defect", res.unitarity_defect},
               {"bands", res.clusters_s.size()},
               {"min_intercluster_gap", res.clusters_s.min_intercluster_gap}};
  {
    json bands = json::array();
    for (int b = 0; b < res.clusters_s.size(); ++b) {
      const auto [lo, hi] = res.clusters_s.ranges[b];
      bands.push_back({{"band", b},
                       {"e_min", res.eig_s.evals[lo]},
                       {"e_max", res.eig_s.evals[hi - 1]},
                       {"width", res.eig_s.evals[hi - 1] - res.eig_s.evals[lo]},
                       {"states", hi - lo}});
    }
    summary["band_table"] = bands;
  }

  if (fd_delta > 0) {
    auto fd = fd_check_band_flow(inst, s / 2, 0, fd_delta, opts);
    summary["fd_err"] = fd.err;
    summary["fd_err_half"] = fd.err_half;
    summary["fd_quadratic"] = fd.err_half <= 0.5 * fd.err + 1e-8;
  }

  if (profile_site >= 0) {
    auto o = PauliTerm::from_pauli(
        PauliOperator::single(m.lattice(), m.lattice().qubit(m.lattice().coords(profile_site), 0),
                              Pauli::Z),
        1.0);
    auto shells = locality_profile(res.u, {o}, profile_site, m.lattice());
    CsvWriter csv(out_path("flow_profile.csv"), {"r", "shell_norm"});
    for (std::size_t r = 0; r < shells.size(); ++r)
      csv.row({static_cast<long long>(r), shells[r]});
    summary["profile"] = shells;
  }

  write_json_file("spectralflow.json", summary);
  write_json_file("spectralflow_config.json", json{{"command", "spectral-flow"},
                                                   {"config", margs.resolved(m)},
                                                   {"s", s},
                                                   {"gamma", gamma},
                                                   {"cluster_threshold", threshold},
                                                   {"steps", steps},
                                                   {"flow_tol", flow_tol},
                                                   {"refinements", refinements},
                                                   {"fd_delta", fd_delta},
                                                   {"profile_site", profile_site}});
  std::cout << "spectral flow to s=" << s << ": projector defect " << res.projector_defect
            << ", unitarity defect " << res.unitarity_defect << " (" << res.n_steps
            << " RK4 steps)\n";
  return kExitOk;
}

int cmd_offdiag(const ModelArgs& margs, double s, int m_defects, double gamma, double threshold,
                int steps, const std::vector<std::string>& refs, double t_max, int t_steps) {
  StabilizerModel model = margs.build();
  SyndromeMap map(model);
  auto inst = DenseInstance::make(model, uniform_field_terms(model.lattice(), 1.0, 1.0));
  auto band = build_band_basis(map, m_defects);

  FlowOptions opts;
  opts.n_steps = steps;
  opts.gamma = gamma;
  opts.cluster_threshold = threshold;
  opts.track_eigensystems = true;
  auto flow = flow_unitary(inst, s, opts);
  MatrixXd flowed = gemm(flow.u, band.columns);

  std::vector<double> t_grid;
  for (int i = 1; i <= t_steps; ++i) t_grid.push_back(t_max * i / t_steps);

  CsvWriter csv(out_path("offdiag.csv"),
                {"ref", "d", "g_sum", "q_norm", "band_leak", "survival_bound_ok"});
  json per_ref = json::array();
  bool all_ok = true;
  for (std::size_t ri = 0; ri < refs.size(); ++ri) {
    auto config = parse_defects(model, refs[ri]);
    // Locate the column of this configuration in sector 0.
    int col = -1;
    for (std::size_t c = 0; c < band.configs.size(); ++c)
      if (band.configs[c] == config) {
        for (std::size_t l = 0; l < band.labels.size(); ++l)
          if (band.labels[l].first == static_cast<int>(c) && band.labels[l].second == 0)
            col = static_cast<int>(l);
        break;
      }
    if (col < 0)
      throw std::invalid_argument("offdiag: reference '" + refs[ri] +
                                  "' is not a valid configuration in the m=" +
                                  std::to_string(m_defects) + " band");
    auto defs = config.defects();
    int d = model.lattice().max_distance();
    for (std::size_t i = 0; i < defs.size(); ++i)
      for (std::size_t j = i + 1; j < defs.size(); ++j)
        d = std::min(d, model.lattice().distance(defs[i].first, defs[j].first));

    auto off = offdiagonal_sum(inst, s, flowed, col);
    auto surv = survival_series(flow.eig_s, flowed.col(col), t_grid);
    bool ok = true;
    for (std::size_t i = 0; i < t_grid.size(); ++i)
      ok = ok && surv[i] >= 1.0 - t_grid[i] * off.q_norm - 1e-6;
    all_ok = all_ok && ok;
    csv.row({static_cast<long long>(ri), static_cast<long long>(d), off.g_sum, off.q_norm,
             off.band_leak, static_cast<long long>(ok ? 1 : 0)});
    per_ref.push_back(json{{"ref", refs[ri]},
                           {"d", d},
                           {"g_sum", off.g_sum},
                           {"q_norm", off.q_norm},
                           {"band_leak", off.band_leak},
                           {"survival_bound_ok", ok}});
  }
  write_json_file("offdiag.json", json{{"format_version", kFormatVersion},
                                       {"s", s},
                                       {"band_m", m_defects},
                                       {"band_dim", band.columns.cols()},
                                       {"refs", per_ref}});
  write_json_file("offdiag_config.json", json{{"command", "offdiag"},
                                              {"config", margs.resolved(model)},
                                              {"s", s},
                                              {"m", m_defects},
                                              {"gamma", gamma},
                                              {"cluster_threshold", threshold},
                                              {"steps", steps},
                                              {"refs", refs},
                                              {"tmax", t_max},
                                              {"tsteps", t_steps}});
  std::cout << "offdiag: " << refs.size() << " reference states, survival bounds "
            << (all_ok ? "hold" : "VIOLATED") << "\n";
  return all_ok ? kExitOk : kExitViolation;
}

int cmd_iom(const ModelArgs& margs, double s, int m_defects, int term_index, double gamma,
            double threshold, int steps, double t_max, int t_steps, std::uint64_t seed) {
  StabilizerModel model = margs.build();
  SyndromeMap map(model);
  auto inst = DenseInstance::make(model, uniform_field_terms(model.lattice(), 1.0, 1.0));
  auto band = build_band_basis(map, m_defects);

  FlowOptions opts;
  opts.n_steps = steps;
  opts.gamma = gamma;
  opts.cluster_threshold = threshold;
  opts.track_eigensystems = true;
  auto flow = flow_unitary(inst, s, opts);
  MatrixXd band_exact = match_band(flow.eig_s, flow.clusters_s, gemm(flow.u, band.columns));

  std::vector<double> t_grid;
  for (int i = 1; i <= t_steps; ++i) t_grid.push_back(t_max * i / t_steps);
  auto res = iom_drift(inst, s, flow.u, flow.eig_s, band_exact, band.columns, term_index, t_grid,
                       seed);

  CsvWriter csv(out_path("iom.csv"), {"t", "expectation", "drift", "bound"});
  bool ok = true;
  for (std::size_t i = 0; i < res.t_grid.size(); ++i) {
    const double drift = std::abs(res.expectation[i] - res.expectation[0]);
    ok = ok && drift <= res.bound[i] + 1e-6;
    csv.row({res.t_grid[i], res.expectation[i], drift, res.bound[i]});
  }
  write_json_file("iom.json", json{{"format_version", kFormatVersion},
                                   {"s", s},
                                   {"term", term_index},
                                   {"comm_norm_localized", res.comm_norm_loc},
                                   {"comm_norm_band", res.comm_norm_band},
                                   {"drift_bounded", ok}});
  write_json_file("iom_config.json", json{{"command", "iom"},
                                          {"config", margs.resolved(model)},
                                          {"s", s},
                                          {"m", m_defects},
                                          {"term", term_index},
                                          {"gamma", gamma},
                                          {"cluster_threshold", threshold},
                                          {"steps", steps},
                                          {"tmax", t_max},
                                          {"tsteps", t_steps},
                                          {"seed", seed}});
  std::cout << "iom: commutator norm " << res.comm_norm_band << " (band), drift "
            << (ok ? "bounded" : "UNBOUNDED") << " to t=" << t_max << "\n";
  return ok ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"locgap: exact localization certificates and small-scale dynamics for stabilizer lattice models"};
  app.require_subcommand(1);

  const char* env_out = std::getenv("LOCGAP_OUTDIR");
  if (env_out) g_outdir = env_out;
  app.add_option("--out-dir", g_outdir, "output directory (env LOCGAP_OUTDIR)");
  app.add_option("--threads", g_threads, "worker threads for sweeps");
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with subcommand parameters (flags override)");

  // model-info ------------------------------------------------------
  ModelArgs mi_margs;
  bool mi_deg = false;
  auto* mi = app.add_subcommand("model-info", "model summary and stencil dump");
  mi_margs.add_flags(mi);
  mi->add_flag("--degeneracy", mi_deg, "also compute encoded qubits");

  // syndrome --------------------------------------------------------
  ModelArgs sy_margs;
  std::string sy_op;
  bool sy_schema = false;
  auto* sy = app.add_subcommand("syndrome", "defect configuration of a Pauli operator");
  sy_margs.add_flags(sy);
  sy->add_option("--op", sy_op, "operator, e.g. 'Z:0,0,0,0;X:1,2,0,1'");
  sy->add_flag("--schema", sy_schema, "print CSV columns and exit");

  // validity --------------------------------------------------------
  ModelArgs va_margs;
  std::string va_defects, va_parity = "even", va_expect;
  int va_random = 0;
  std::uint64_t va_seed = 1;
  auto* va = app.add_subcommand("validity", "decide whether defect configurations are valid");
  va_margs.add_flags(va);
  va->add_option("--defects", va_defects, "explicit configuration 'x,y,z:type;...'");
  va->add_option("--random", va_random, "number of random configurations");
  va->add_option("--parity", va_parity, "per-type parity of random configurations: even|odd");
  va->add_option("--seed", va_seed, "RNG seed");
  va->add_option("--expect", va_expect, "fail (exit 2) unless all results are valid|invalid");

  // degeneracy ------------------------------------------------------
  ModelArgs de_margs;
  auto* de = app.add_subcommand("degeneracy", "encoded qubit count k (degeneracy 2^k)");
  de_margs.add_flags(de);

  // certify-no-strings ----------------------------------------------
  ModelArgs ns_margs;
  int ns_dmax = 4;
  std::string ns_expect;
  bool ns_certs = false, ns_schema = false;
  auto* ns = app.add_subcommand("certify-no-strings",
                                "sweep defect pairs and box placements for transporters");
  ns_margs.add_flags(ns);
  ns->add_option("--dmax", ns_dmax, "largest box side / pair separation");
  ns->add_option("--expect", ns_expect, "none|exists: fail (exit 2) on the contrary verdict");
  ns->add_flag("--certs", ns_certs, "dump full certificates JSON");
  ns->add_flag("--schema", ns_schema, "print CSV columns and exit");

  // local-gap -------------------------------------------------------
  ModelArgs lg_margs;
  std::string lg_defects;
  int lg_cap = 0;
  auto* lg = app.add_subcommand("local-gap", "locally-gapped certificate for a configuration");
  lg_margs.add_flags(lg);
  lg->add_option("--defects", lg_defects, "configuration 'x,y,z:type;...' (empty = ground state)");
  lg->add_option("--sweep-cap", lg_cap, "cap the certification sweep side (0 = no cap)");

  // count-sparse ----------------------------------------------------
  int cs_L = 4, cs_m = 2, cs_d = 2, cs_Lmax = 0, cs_mmax = 0, cs_dmax = 0;
  bool cs_schema = false;
  auto* cs = app.add_subcommand("count-sparse", "exact sparse-configuration counts and bounds");
  cs->add_option("--L", cs_L, "linear size (V = L^3)");
  cs->add_option("--m", cs_m, "number of defects");
  cs->add_option("--d", cs_d, "separation");
  cs->add_option("--Lmax", cs_Lmax, "sweep L = 2..Lmax");
  cs->add_option("--mmax", cs_mmax, "sweep m = 0..mmax");
  cs->add_option("--dmax", cs_dmax, "sweep d = 1..dmax");
  cs->add_flag("--schema", cs_schema, "print CSV columns and exit");

  // entropy ---------------------------------------------------------
  ModelArgs en_margs;
  std::string en_excite, en_sector, en_box;
  int en_random = 0;
  std::uint64_t en_seed = 1;
  bool en_schema = false;
  auto* en = app.add_subcommand("entropy", "stabilizer entanglement entropy of regions");
  en_margs.add_flags(en);
  en->add_option("--excite", en_excite, "excitation operator (see syndrome --op)");
  en->add_option("--sector", en_sector, "topological sector bits, e.g. '01'");
  en->add_option("--box", en_box, "box region 'x,y,z:a,b,c'");
  en->add_option("--random-regions", en_random, "number of random regions");
  en->add_option("--seed", en_seed, "RNG seed");
  en->add_flag("--schema", en_schema, "print CSV columns and exit");

  // evolve ----------------------------------------------------------
  ModelArgs ev_margs;
  std::string ev_benchmark, ev_defects;
  double ev_lambda = 1.0, ev_tmax = 20.0, ev_tol = 1e-10, ev_s = 0.05;
  int ev_steps = 200;
  std::uint64_t ev_seed = 7;
  bool ev_schema = false;
  auto* ev = app.add_subcommand("evolve", "Krylov time evolution (benchmark or model)");
  ev_margs.add_flags(ev);
  ev->add_option("--benchmark", ev_benchmark, "'bessel' for the hopping-chain benchmark");
  ev->add_option("--lambda", ev_lambda, "hopping strength");
  ev->add_option("--tmax", ev_tmax, "final time");
  ev->add_option("--steps", ev_steps, "time steps");
  ev->add_option("--krylov-tol", ev_tol, "Krylov local error per substep");
  ev->add_option("--s", ev_s, "perturbation strength (model mode)");
  ev->add_option("--defects", ev_defects, "initial defect configuration (model mode)");
  ev->add_option("--seed", ev_seed, "RNG seed for the state builder");
  ev->add_flag("--schema", ev_schema, "print CSV columns and exit");

  // spectral-flow ---------------------------------------------------
  ModelArgs sf_margs;
  double sf_s = 0.05, sf_gamma = 1.0, sf_threshold = 0.4, sf_tol = 1e-6, sf_fd = 1e-3;
  int sf_steps = 8, sf_ref = 2, sf_profile = 0;
  auto* sf = app.add_subcommand("spectral-flow", "quasi-adiabatic flow of the band projectors");
  sf_margs.add_flags(sf);
  sf->add_option("--s", sf_s, "target perturbation strength");
  sf->add_option("--gamma", sf_gamma, "filter width (must stay below the band gaps)");
  sf->add_option("--cluster-threshold", sf_threshold, "band clustering gap threshold");
  sf->add_option("--steps", sf_steps, "initial RK4 steps");
  sf->add_option("--flow-tol", sf_tol, "projector transport defect target");
  sf->add_option("--refinements", sf_ref, "step-doubling refinements allowed");
  sf->add_option("--fd-delta", sf_fd, "finite-difference step (0 skips the check)");
  sf->add_option("--profile-site", sf_profile, "site for the locality profile (-1 skips)");

  // offdiag ---------------------------------------------------------
  ModelArgs od_margs;
  double od_s = 0.05, od_gamma = 1.0, od_threshold = 0.4, od_tmax = 10.0;
  int od_m = 2, od_steps = 8, od_tsteps = 20;
  std::vector<std::string> od_refs;
  auto* od = app.add_subcommand("offdiag", "off-diagonal sums and survival bounds in a band");
  od_margs.add_flags(od);
  od->add_option("--s", od_s, "perturbation strength");
  od->add_option("--m", od_m, "defect number of the band");
  od->add_option("--gamma", od_gamma, "filter width");
  od->add_option("--cluster-threshold", od_threshold, "band clustering gap threshold");
  od->add_option("--steps", od_steps, "RK4 steps");
  od->add_option("--ref", od_refs, "reference configuration 'x,y,z:t;...' (repeatable)");
  od->add_option("--tmax", od_tmax, "survival check horizon");
  od->add_option("--tsteps", od_tsteps, "survival sample count");

  // iom -------------------------------------------------------------
  ModelArgs io_margs;
  double io_s = 0.05, io_gamma = 1.0, io_threshold = 0.4, io_tmax = 10.0;
  int io_m = 2, io_term = 0, io_steps = 8, io_tsteps = 20;
  std::uint64_t io_seed = 99;
  auto* io = app.add_subcommand("iom", "approximate integrals of motion and drift bounds");
  io_margs.add_flags(io);
  io->add_option("--s", io_s, "perturbation strength");
  io->add_option("--m", io_m, "defect number of the localized band");
  io->add_option("--term", io_term, "H0 term index j for I_j = U h_j U^T");
  io->add_option("--gamma", io_gamma, "filter width");
  io->add_option("--cluster-threshold", io_threshold, "band clustering gap threshold");
  io->add_option("--steps", io_steps, "RK4 steps");
  io->add_option("--tmax", io_tmax, "drift horizon");
  io->add_option("--tsteps", io_tsteps, "drift sample count");
  io->add_option("--seed", io_seed, "seed for the in-band state");

  // Global flags (--out-dir, --threads, --config) may appear after the
  // subcommand name.
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    json cfg;
    if (!config_path.empty()) cfg = load_json_file(config_path).value("config", json::object());
    json full_cfg = config_path.empty() ? json::object() : load_json_file(config_path);

    auto merged = [&](ModelArgs& margs, CLI::App* sub) {
      // Values from --config fill anything not given on the command line.
      if (config_path.empty()) return;
      if (!sub->count("--model") && !sub->count("--dims") && !sub->count("--L") &&
          !sub->count("--stencil"))
        margs.apply_config(cfg);
    };

    if (mi->parsed()) {
      merged(mi_margs, mi);
      return cmd_model_info(mi_margs, mi_deg);
    }
    if (sy->parsed()) {
      merged(sy_margs, sy);
      if (sy_schema) {
        print_schema({{"x,y,z", "defect site coordinates"}, {"type", "generator type index"}});
        return kExitOk;
      }
      if (!sy->count("--op") && full_cfg.contains("op")) sy_op = full_cfg["op"].get<std::string>();
      return cmd_syndrome(sy_margs, sy_op);
    }
    if (va->parsed()) {
      merged(va_margs, va);
      if (!va->count("--random") && full_cfg.contains("random"))
        va_random = full_cfg["random"].get<int>();
      if (!va->count("--parity") && full_cfg.contains("parity"))
        va_parity = full_cfg["parity"].get<std::string>();
      if (!va->count("--seed") && full_cfg.contains("seed"))
        va_seed = full_cfg["seed"].get<std::uint64_t>();
      if (!va->count("--defects") && full_cfg.contains("defects"))
        va_defects = full_cfg["defects"].get<std::string>();
      if (!va->count("--expect") && full_cfg.contains("expect"))
        va_expect = full_cfg["expect"].get<std::string>();
      return cmd_validity(va_margs, va_defects, va_random, va_parity, va_seed, va_expect);
    }
    if (de->parsed()) {
      merged(de_margs, de);
      return cmd_degeneracy(de_margs);
    }
    if (ns->parsed()) {
      merged(ns_margs, ns);
      if (ns_schema) {
        print_schema({{"type", "generator type index"},
                      {"dx,dy,dz", "canonical pair offset"},
                      {"separation", "Chebyshev separation of the pair"},
                      {"side", "box side (diameter)"},
                      {"placements", "number of box placements covering the pair"},
                      {"verdict", "exists|none (OR over placements)"},
                      {"certified", "1 when every placement certificate re-verified"}});
        return kExitOk;
      }
      if (!ns->count("--dmax") && full_cfg.contains("dmax")) ns_dmax = full_cfg["dmax"].get<int>();
      if (!ns->count("--expect") && full_cfg.contains("expect"))
        ns_expect = full_cfg["expect"].get<std::string>();
      return cmd_certify_no_strings(ns_margs, ns_dmax, ns_expect, ns_certs);
    }
    if (lg->parsed()) {
      merged(lg_margs, lg);
      if (!lg->count("--defects") && full_cfg.contains("defects"))
        lg_defects = full_cfg["defects"].get<std::string>();
      if (!lg->count("--sweep-cap") && full_cfg.contains("sweep_cap"))
        lg_cap = full_cfg["sweep_cap"].get<int>();
      return cmd_local_gap(lg_margs, lg_defects, lg_cap);
    }
    if (cs->parsed()) {
      if (cs_schema) {
        print_schema({{"L", "linear size"},
                      {"m", "defect count"},
                      {"d", "separation"},
                      {"v", "excluded volume min(2d-1,L)^3"},
                      {"sparse_count", "m-subsets with pairwise distance >= d"},
                      {"total", "C(V,m)"},
                      {"fraction", "sparse_count / total"},
                      {"bound_simple", "(1 - m v / V)^m"},
                      {"bound_product", "V(V-v)...(V-(m-1)v) / V(V-1)...(V-m+1)"}});
        return kExitOk;
      }
      if (!config_path.empty()) {
        if (!cs->count("--L") && full_cfg.contains("L")) cs_L = full_cfg["L"].get<int>();
        if (!cs->count("--m") && full_cfg.contains("m")) cs_m = full_cfg["m"].get<int>();
        if (!cs->count("--d") && full_cfg.contains("d")) cs_d = full_cfg["d"].get<int>();
        if (!cs->count("--Lmax") && full_cfg.contains("Lmax")) cs_Lmax = full_cfg["Lmax"].get<int>();
        if (!cs->count("--mmax") && full_cfg.contains("mmax")) cs_mmax = full_cfg["mmax"].get<int>();
        if (!cs->count("--dmax") && full_cfg.contains("dmax")) cs_dmax = full_cfg["dmax"].get<int>();
      }
      return cmd_count_sparse(cs_L, cs_m, cs_d, cs_Lmax, cs_mmax, cs_dmax);
    }
    if (en->parsed()) {
      merged(en_margs, en);
      if (en_schema) {
        print_schema({{"region", "box descriptor or random label"},
                      {"qubits", "region size |M|"},
                      {"S_bits", "entanglement entropy in bits"},
                      {"restricted_rank", "rank of the group restricted to M"}});
        return kExitOk;
      }
      return cmd_entropy(en_margs, en_excite, en_sector, en_box, en_random, en_seed);
    }
    if (ev->parsed()) {
      if (ev_schema) {
        print_schema({{"t", "time"},
                      {"survival", "|<psi0|psi(t)>|"},
                      {"bessel_abs/energy", "reference column (mode dependent)"},
                      {"abs_err/norm", "deviation column (mode dependent)"}});
        return kExitOk;
      }
      if (!ev->count("--benchmark") && full_cfg.contains("benchmark"))
        ev_benchmark = full_cfg["benchmark"].get<std::string>();
      if (ev_benchmark == "bessel")
        return cmd_evolve_bessel(ev_lambda, ev_tmax, ev_steps, ev_tol);
      merged(ev_margs, ev);
      return cmd_evolve_model(ev_margs, ev_s, ev_defects, ev_tmax, ev_steps, ev_tol, ev_seed);
    }
    if (sf->parsed()) {
      merged(sf_margs, sf);
      return cmd_spectral_flow(sf_margs, sf_s, sf_gamma, sf_threshold, sf_steps, sf_tol, sf_ref,
                               sf_fd, sf_profile);
    }
    if (od->parsed()) {
      merged(od_margs, od);
      return cmd_offdiag(od_margs, od_s, od_m, od_gamma, od_threshold, od_steps, od_refs, od_tmax,
                         od_tsteps);
    }
    if (io->parsed()) {
      merged(io_margs, io);
      return cmd_iom(io_margs, io_s, io_m, io_term, io_gamma, io_threshold, io_steps, io_tmax,
                     io_tsteps, io_seed);
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
