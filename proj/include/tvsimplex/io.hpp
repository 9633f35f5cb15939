#pragma once

#include "tvsimplex/instance.hpp"
#include "tvsimplex/simplex.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tvsimplex {

/// File could not be read/written or its content is malformed.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

inline Json to_json(const Instance &inst) {
  Json j;
  j["n_vertices"] = inst.num_vertices();
  Json edges = Json::array();
  for (const auto &[t, h] : inst.graph.edges())
    edges.push_back({t, h});
  j["edges"] = std::move(edges);
  j["c"] = inst.c;
  j["h"] = inst.h;
  j["d_fwd"] = inst.d_fwd;
  j["d_bwd"] = inst.d_bwd;
  j["delta"] = inst.delta;
  if (inst.generator) {
    const auto &gi = *inst.generator;
    j["meta"]["generator"] = {{"algorithm", "mt19937_64 + Box-Muller v1"},
                              {"grid", gi.grid},
                              {"alpha", gi.alpha},
                              {"seed", gi.seed},
                              {"eps", gi.eps},
                              {"delta_frac", gi.delta_frac}};
  }
  return j;
}

/// Parses and validates. Structural problems raise IoError; invariant
/// violations raise InstanceError / GraphError.
inline Instance instance_from_json(const Json &j) {
  try {
    const auto n = j.at("n_vertices").get<std::size_t>();
    std::vector<EdgeEnds> edges;
    for (const auto &e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2)
        throw IoError("edge entries must be [tail, head] pairs");
      edges.push_back({e[0].get<VertexId>(), e[1].get<VertexId>()});
    }
    Instance inst{Graph(n, std::move(edges)),
                  j.at("c").get<std::vector<double>>(),
                  j.at("h").get<std::vector<double>>(),
                  j.at("d_fwd").get<std::vector<double>>(),
                  j.at("d_bwd").get<std::vector<double>>(),
                  j.at("delta").get<double>(),
                  std::nullopt};
    if (j.contains("meta") && j["meta"].contains("generator")) {
      const auto &gj = j["meta"]["generator"];
      inst.generator =
          GeneratorInfo{gj.value("grid", std::size_t{0}), gj.value("alpha", 0.0),
                        gj.value("seed", std::uint64_t{0}), gj.value("eps", 0.0),
                        gj.value("delta_frac", 0.0)};
    }
    validate(inst);
    return inst;
  } catch (const nlohmann::json::exception &e) {
    throw IoError(std::string("malformed instance: ") + e.what());
  }
}

inline std::string read_text(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path);
  out << text;
  if (!out)
    throw IoError("write failed for " + path);
}

inline Json parse_json(const std::string &text, const std::string &what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw IoError(what + ": " + e.what());
  }
}

inline Instance read_instance(const std::string &path) {
  return instance_from_json(parse_json(read_text(path), path));
}

inline void write_instance(const std::string &path, const Instance &inst) {
  write_text(path, to_json(inst).dump(1) + "\n");
}

namespace detail {

inline char mark_code(RootMark m) {
  switch (m) {
  case RootMark::None: return '-';
  case RootMark::Lower: return 'L';
  case RootMark::Upper: return 'U';
  case RootMark::BasicComponent: return 'B';
  }
  return '?';
}

inline RootMark mark_from(char c) {
  switch (c) {
  case '-': return RootMark::None;
  case 'L': return RootMark::Lower;
  case 'U': return RootMark::Upper;
  case 'B': return RootMark::BasicComponent;
  }
  throw IoError(std::string("unknown root mark '") + c + "'");
}

inline char state_code(EdgeState s) {
  switch (s) {
  case EdgeState::Tree: return 'T';
  case EdgeState::BasicFwd: return 'F';
  case EdgeState::BasicBwd: return 'R';
  }
  return '?';
}

inline EdgeState state_from(char c) {
  switch (c) {
  case 'T': return EdgeState::Tree;
  case 'F': return EdgeState::BasicFwd;
  case 'R': return EdgeState::BasicBwd;
  }
  throw IoError(std::string("unknown edge state '") + c + "'");
}

inline CertificateEntry::Kind entry_kind_from(const std::string &s) {
  using K = CertificateEntry::Kind;
  for (K k : {K::RootLower, K::RootUpper, K::EdgeDown, K::EdgeUp,
              K::BasicEdgeDown, K::BasicEdgeUp, K::Slack})
    if (s == to_string(k))
      return k;
  throw IoError("unknown certificate entry kind '" + s + "'");
}

} // namespace detail

inline Json to_json(const Certificate &cert) {
  Json j;
  j["slack_basic"] = cert.slack_basic;
  j["basic_root"] = cert.basic_root;
  j["rho"] = cert.rho;
  std::string marks, states;
  for (RootMark m : cert.basis.marks)
    marks += detail::mark_code(m);
  for (EdgeState s : cert.basis.states)
    states += detail::state_code(s);
  j["basis"] = {{"parent_edge", cert.basis.parent_edge},
                {"marks", marks},
                {"states", states}};
  Json entries = Json::array();
  for (const auto &e : cert.entries)
    entries.push_back({{"kind", to_string(e.kind)}, {"at", e.at}, {"value", e.value}});
  j["entries"] = std::move(entries);
  return j;
}

inline Certificate certificate_from_json(const Json &j) {
  Certificate cert;
  cert.slack_basic = j.at("slack_basic").get<bool>();
  cert.basic_root = j.at("basic_root").get<VertexId>();
  cert.rho = j.at("rho").get<double>();
  const auto &b = j.at("basis");
  cert.basis.parent_edge = b.at("parent_edge").get<std::vector<EdgeId>>();
  for (char c : b.at("marks").get<std::string>())
    cert.basis.marks.push_back(detail::mark_from(c));
  for (char c : b.at("states").get<std::string>())
    cert.basis.states.push_back(detail::state_from(c));
  for (const auto &e : j.at("entries"))
    cert.entries.push_back({detail::entry_kind_from(e.at("kind").get<std::string>()),
                            e.at("at").get<std::int64_t>(),
                            e.at("value").get<double>()});
  return cert;
}

inline Json to_json(const SolveStats &st) {
  Json j;
  j["pivots"] = st.pivots;
  j["degenerate_pivots"] = st.degenerate_pivots;
  j["basis_exchanges"] = st.basis_exchanges;
  j["bland_pivots"] = st.bland_pivots;
  Json cases;
  for (std::size_t k = 0; k < st.pivots_by_case.size(); ++k)
    cases[std::string(1, static_cast<char>('a' + k))] = st.pivots_by_case[k];
  j["pivots_by_case"] = std::move(cases);
  j["max_path_len"] = st.max_path_len;
  j["max_degree"] = st.max_degree;
  j["max_subtree"] = st.max_subtree;
  j["max_boundary"] = st.max_boundary;
  j["wall_time_s"] = st.wall_time_s;
  return j;
}

/// Solution file contents; stats are carried through as opaque JSON.
struct SolutionFile {
  DenseSolution solution;
  std::string status = "optimal";
  Json stats;
  std::optional<Certificate> certificate;
};

inline Json to_json(const SolutionFile &f) {
  Json j;
  j["x"] = f.solution.x;
  j["s"] = f.solution.s;
  j["objective"] = f.solution.objective;
  j["status"] = f.status;
  j["stats"] = f.stats.is_null() ? Json::object() : f.stats;
  if (f.certificate)
    j["certificate"] = to_json(*f.certificate);
  return j;
}

inline SolutionFile solution_from_json(const Json &j) {
  try {
    SolutionFile f;
    f.solution.x = j.at("x").get<std::vector<double>>();
    f.solution.s = j.at("s").get<double>();
    f.solution.objective = j.at("objective").get<double>();
    f.status = j.value("status", std::string("optimal"));
    if (j.contains("stats"))
      f.stats = j["stats"];
    if (j.contains("certificate") && !j["certificate"].is_null())
      f.certificate = certificate_from_json(j["certificate"]);
    return f;
  } catch (const nlohmann::json::exception &e) {
    throw IoError(std::string("malformed solution: ") + e.what());
  }
}

inline SolutionFile read_solution(const std::string &path) {
  return solution_from_json(parse_json(read_text(path), path));
}

inline void write_solution(const std::string &path, const SolutionFile &f) {
  write_text(path, to_json(f).dump(1) + "\n");
}

} // namespace tvsimplex
