#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace tvsimplex {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

inline constexpr VertexId kNoVertex = -1;
inline constexpr EdgeId kNoEdge = -1;

/// Direction of an edge as seen from one of its endpoints.
enum class Incidence : std::uint8_t { Outgoing, Incoming };

struct Incident {
  EdgeId edge;
  VertexId other;
  Incidence dir;
};

struct EdgeEnds {
  VertexId tail;
  VertexId head;
  friend bool operator==(const EdgeEnds &, const EdgeEnds &) = default;
};

class GraphError : public std::runtime_error {
public:
  enum class Kind { SelfLoop, Duplicate, VertexOutOfRange, InvalidArgument };

  GraphError(Kind kind, std::int64_t index, const std::string &what)
      : std::runtime_error(what), kind_(kind), index_(index) {}

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::int64_t index() const { return index_; }

private:
  Kind kind_;
  std::int64_t index_;
};

/// Directed simple graph with dense vertex and edge ids.
///
/// Immutable after construction. Every edge appears exactly once as
/// outgoing at its tail and once as incoming at its head.
class Graph {
public:
  Graph() = default;

  /// Builds the graph without checking simplicity; call validate() for that.
  /// Endpoints out of range throw since incidence lists cannot be built.
  Graph(std::size_t n_vertices, std::vector<EdgeEnds> edges)
      : n_(n_vertices), edges_(std::move(edges)), incidence_(n_vertices) {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto [t, h] = edges_[e];
      if (t < 0 || h < 0 || static_cast<std::size_t>(t) >= n_ ||
          static_cast<std::size_t>(h) >= n_)
        throw GraphError(GraphError::Kind::VertexOutOfRange,
                         static_cast<std::int64_t>(e),
                         "edge " + std::to_string(e) +
                             " has an endpoint out of range");
      const auto id = static_cast<EdgeId>(e);
      incidence_[t].push_back({id, h, Incidence::Outgoing});
      incidence_[h].push_back({id, t, Incidence::Incoming});
    }
  }

  [[nodiscard]] std::size_t num_vertices() const { return n_; }
  [[nodiscard]] std::size_t num_edges() const { return edges_.size(); }
  [[nodiscard]] const EdgeEnds &edge(EdgeId e) const { return edges_[e]; }
  [[nodiscard]] const std::vector<EdgeEnds> &edges() const { return edges_; }
  [[nodiscard]] const std::vector<Incident> &incident(VertexId v) const {
    return incidence_[v];
  }
  [[nodiscard]] std::size_t degree(VertexId v) const {
    return incidence_[v].size();
  }
  [[nodiscard]] std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto &inc : incidence_)
      d = std::max(d, inc.size());
    return d;
  }

  [[nodiscard]] VertexId other_end(EdgeId e, VertexId v) const {
    return edges_[e].tail == v ? edges_[e].head : edges_[e].tail;
  }

private:
  std::size_t n_ = 0;
  std::vector<EdgeEnds> edges_;
  std::vector<std::vector<Incident>> incidence_;
};

/// Throws GraphError on the first self-loop or repeated unordered pair.
inline void validate(const Graph &g) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(g.num_edges() * 2);
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto [t, h] = g.edge(static_cast<EdgeId>(e));
    if (t == h)
      throw GraphError(GraphError::Kind::SelfLoop, static_cast<std::int64_t>(e),
                       "edge " + std::to_string(e) + " is a self-loop");
    const auto lo = static_cast<std::uint64_t>(std::min(t, h));
    const auto hi = static_cast<std::uint64_t>(std::max(t, h));
    if (!seen.insert((lo << 32) | hi).second)
      throw GraphError(GraphError::Kind::Duplicate,
                       static_cast<std::int64_t>(e),
                       "edge " + std::to_string(e) +
                           " duplicates an earlier vertex pair");
  }
}

/// n x n grid, row-major vertex ids. Edges point from the lower to the higher
/// id: all horizontal edges row-major first, then all vertical edges.
inline Graph build_grid(std::size_t n) {
  if (n == 0)
    throw GraphError(GraphError::Kind::InvalidArgument, 0,
                     "grid side must be at least 1");
  std::vector<EdgeEnds> edges;
  edges.reserve(2 * n * (n - 1));
  const auto id = [n](std::size_t i, std::size_t j) {
    return static_cast<VertexId>(i * n + j);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j + 1 < n; ++j)
      edges.push_back({id(i, j), id(i, j + 1)});
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      edges.push_back({id(i, j), id(i + 1, j)});
  return Graph(n * n, std::move(edges));
}

struct Boundary {
  std::vector<EdgeId> delta_plus;  ///< tail in S, head outside
  std::vector<EdgeId> delta_minus; ///< head in S, tail outside
};

/// Edges crossing the vertex set S, split by direction. Edge ids ascending.
inline Boundary boundary(const Graph &g, const std::vector<VertexId> &set) {
  std::vector<char> in(g.num_vertices(), 0);
  for (VertexId v : set)
    in[v] = 1;
  Boundary b;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto [t, h] = g.edge(static_cast<EdgeId>(e));
    if (in[t] && !in[h])
      b.delta_plus.push_back(static_cast<EdgeId>(e));
    else if (in[h] && !in[t])
      b.delta_minus.push_back(static_cast<EdgeId>(e));
  }
  return b;
}

} // namespace tvsimplex
