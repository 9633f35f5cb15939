#pragma once

#include "tvsimplex/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tvsimplex {

/// Tree: both a-variables of the edge nonbasic. BasicFwd: a_fwd (tail minus
/// head) is basic. BasicBwd: a_bwd (head minus tail) is basic.
enum class EdgeState : std::uint8_t { Tree, BasicFwd, BasicBwd };

/// Marker carried by tree roots. Lower/Upper roots are nonbasic x at 0/1; the
/// basic component has no nonbasic vertex and its root is a designated one.
enum class RootMark : std::uint8_t { None, Lower, Upper, BasicComponent };

class BasisError : public std::logic_error {
public:
  enum class Kind { NotTreeEdge, NotBasicEdge, NonzeroGap, SameTree, Infeasible, NotNonbasic };

  BasisError(Kind kind, std::int64_t index, const std::string &what)
      : std::logic_error(what), kind_(kind), index_(index) {}

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::int64_t index() const { return index_; }

private:
  Kind kind_;
  std::int64_t index_;
};

struct BasisViolation {
  enum class Kind {
    ParentMismatch,
    NotSpanning,
    TreeEdgeMismatch,
    NonConstantX,
    OutOfBounds,
    OrientationMisaligned,
    RootMarkMissing,
    RootMarkMisplaced,
    RootNotAtBound,
    BasicComponentCount,
    NegativeSlack,
    BudgetMismatch,
    AggregateMismatch,
  };
  Kind kind;
  std::int64_t location = -1;
  std::string detail;
};

inline const char *to_string(BasisViolation::Kind k) {
  using K = BasisViolation::Kind;
  switch (k) {
  case K::ParentMismatch: return "ParentMismatch";
  case K::NotSpanning: return "NotSpanning";
  case K::TreeEdgeMismatch: return "TreeEdgeMismatch";
  case K::NonConstantX: return "NonConstantX";
  case K::OutOfBounds: return "OutOfBounds";
  case K::OrientationMisaligned: return "OrientationMisaligned";
  case K::RootMarkMissing: return "RootMarkMissing";
  case K::RootMarkMisplaced: return "RootMarkMisplaced";
  case K::RootNotAtBound: return "RootNotAtBound";
  case K::BasicComponentCount: return "BasicComponentCount";
  case K::NegativeSlack: return "NegativeSlack";
  case K::BudgetMismatch: return "BudgetMismatch";
  case K::AggregateMismatch: return "AggregateMismatch";
  }
  return "?";
}

struct BoundaryEdge {
  EdgeId edge;
  VertexId inside;
  VertexId outside;
  Incidence dir; ///< Outgoing when the stored tail is inside
};

/// Vertices of the subtree below `head` (preorder) and the edges leaving it.
struct SubtreeView {
  VertexId head = kNoVertex;
  std::vector<VertexId> vertices;
  std::vector<BoundaryEdge> boundary;
};

/// Work observed during path updates; read by the solver for statistics.
struct SurgeryWork {
  std::size_t max_path = 0;
  std::size_t max_degree = 0;
};

/// A simplex basis for the budget-constrained TV program, stored as a rooted
/// spanning forest with orientation.
///
/// Per vertex: parent link, children, the value x, the self term g and the
/// subtree aggregates y = F(N_v), z = h(N_v). g_v is c_v plus the signed cost
/// of the basic a-variable on every non-tree edge at v (+d when the basic
/// direction leaves v, -d when it enters), so F(S) telescopes into the sum of
/// g over S. Tree edges contribute nothing.
///
/// The referenced Instance must outlive the basis.
class ForestBasis {
public:
  /// Rebuilds a basis from explicit structure. No validation; use
  /// check_invariants(). Aggregates are computed from scratch.
  ForestBasis(const Instance &inst, std::span<const EdgeId> parent_edge,
              std::span<const RootMark> marks, std::span<const EdgeState> states,
              std::span<const double> x, double slack)
      : inst_(&inst), n_(inst.num_vertices()), parent_(n_, kNoVertex),
        parent_edge_(parent_edge.begin(), parent_edge.end()), child_slot_(n_, 0),
        children_(n_), x_(x.begin(), x.end()), g_(n_, 0.0), y_(n_, 0.0),
        z_(n_, 0.0), mark_(marks.begin(), marks.end()),
        state_(states.begin(), states.end()), slack_(slack) {
    for (VertexId v = 0; v < static_cast<VertexId>(n_); ++v) {
      if (parent_edge_[v] == kNoEdge)
        continue;
      const VertexId p = inst.graph.other_end(parent_edge_[v], v);
      parent_[v] = p;
      child_slot_[v] = children_[p].size();
      children_[p].push_back(v);
    }
    for (VertexId v = 0; v < static_cast<VertexId>(n_); ++v)
      if (mark_[v] == RootMark::BasicComponent)
        basic_root_ = v;
    for (VertexId v = 0; v < static_cast<VertexId>(n_); ++v)
      g_[v] = self_term(v);
    refresh_aggregates();
  }

  [[nodiscard]] const Instance &instance() const { return *inst_; }
  [[nodiscard]] std::size_t num_vertices() const { return n_; }

  [[nodiscard]] VertexId parent(VertexId v) const { return parent_[v]; }
  [[nodiscard]] EdgeId parent_edge(VertexId v) const { return parent_edge_[v]; }
  [[nodiscard]] const std::vector<VertexId> &children(VertexId v) const {
    return children_[v];
  }
  [[nodiscard]] bool is_root(VertexId v) const { return parent_[v] == kNoVertex; }
  [[nodiscard]] double x(VertexId v) const { return x_[v]; }
  [[nodiscard]] const std::vector<double> &x() const { return x_; }
  [[nodiscard]] double g(VertexId v) const { return g_[v]; }
  [[nodiscard]] double y(VertexId v) const { return y_[v]; }
  [[nodiscard]] double z(VertexId v) const { return z_[v]; }
  [[nodiscard]] RootMark mark(VertexId v) const { return mark_[v]; }
  [[nodiscard]] EdgeState state(EdgeId e) const { return state_[e]; }
  [[nodiscard]] const std::vector<EdgeState> &states() const { return state_; }
  [[nodiscard]] const std::vector<RootMark> &marks() const { return mark_; }
  [[nodiscard]] const std::vector<EdgeId> &parent_edges() const {
    return parent_edge_;
  }

  [[nodiscard]] bool slack_basic() const { return basic_root_ == kNoVertex; }
  /// Slack value; zero whenever the slack is nonbasic.
  [[nodiscard]] double slack() const { return slack_basic() ? slack_ : 0.0; }
  [[nodiscard]] VertexId basic_root() const { return basic_root_; }

  [[nodiscard]] VertexId root_of(VertexId v) const {
    while (parent_[v] != kNoVertex)
      v = parent_[v];
    return v;
  }

  [[nodiscard]] std::size_t num_trees() const {
    std::size_t k = 0;
    for (VertexId v = 0; v < static_cast<VertexId>(n_); ++v)
      k += is_root(v) ? 1 : 0;
    return k;
  }

  /// The child-side endpoint of a tree edge.
  [[nodiscard]] VertexId tree_child(EdgeId e) const {
    const auto [t, h] = inst_->graph.edge(e);
    return parent_edge_[h] == e ? h : t;
  }

  void set_x(VertexId v, double value) { x_[v] = value; }
  void set_slack(double s) { slack_ = s; }

  /// Marks a root. Setting BasicComponent makes the slack nonbasic; clearing
  /// the basic root's mark makes it basic again (value via set_slack).
  void set_mark(VertexId v, RootMark m) {
    if (mark_[v] == RootMark::BasicComponent && basic_root_ == v)
      basic_root_ = kNoVertex;
    mark_[v] = m;
    if (m == RootMark::BasicComponent) {
      basic_root_ = v;
      slack_ = 0.0;
    }
  }

  /// Overwrites aggregates at one vertex. Repair and fault-injection hook.
  void set_aggregates(VertexId v, double y, double z) {
    y_[v] = y;
    z_[v] = z;
  }

  /// Cuts tree edge e; the child side becomes a tree rooted at its endpoint
  /// with no mark (the caller assigns one). e becomes basic in `orient`.
  void split(EdgeId e, EdgeState orient) {
    if (state_[e] != EdgeState::Tree)
      throw BasisError(BasisError::Kind::NotTreeEdge, e,
                       "split: edge " + std::to_string(e) + " is not a tree edge");
    if (orient == EdgeState::Tree)
      throw BasisError(BasisError::Kind::NotBasicEdge, e,
                       "split: orientation must be basic");
    const VertexId c = tree_child(e);
    const VertexId p = parent_[c];
    detach(c);
    set_state(e, orient);
    update_node(c);
    update_aggregates_path(p);
  }

  /// Joins two trees along basic edge e whose endpoints have equal x. The
  /// tree on the `absorbing` side keeps its root; the other is everted at its
  /// endpoint, loses its mark and hangs below `absorbing`.
  void merge(EdgeId e, VertexId absorbing) {
    if (state_[e] == EdgeState::Tree)
      throw BasisError(BasisError::Kind::NotBasicEdge, e,
                       "merge: edge " + std::to_string(e) + " is a tree edge");
    const VertexId other = inst_->graph.other_end(e, absorbing);
    if (std::fabs(x_[absorbing] - x_[other]) > kMergeGapTol)
      throw BasisError(BasisError::Kind::NonzeroGap, e,
                       "merge: edge " + std::to_string(e) + " has a nonzero gap");
    if (root_of(absorbing) == root_of(other))
      throw BasisError(BasisError::Kind::SameTree, e,
                       "merge: endpoints of edge " + std::to_string(e) +
                           " are in the same tree");
    evert(other);
    set_mark(other, RootMark::None);
    set_state(e, EdgeState::Tree);
    attach(other, absorbing, e);
    update_node(other);
    update_aggregates_path(absorbing);
  }

  /// Merge keeping the tree of the stored tail.
  void merge(EdgeId e) { merge(e, inst_->graph.edge(e).tail); }

  /// Makes v the root of its tree; the old root's mark moves to v.
  void evert(VertexId v) {
    if (parent_[v] == kNoVertex)
      return;
    path_.clear();
    for (VertexId w = v; w != kNoVertex; w = parent_[w])
      path_.push_back(w);
    const VertexId old_root = path_.back();
    const RootMark m = mark_[old_root];
    for (std::size_t i = path_.size() - 1; i > 0; --i) {
      const VertexId upper = path_[i];
      const VertexId lower = path_[i - 1];
      const EdgeId e = parent_edge_[lower];
      detach(lower);
      attach(upper, lower, e);
    }
    for (auto it = path_.rbegin(); it != path_.rend(); ++it)
      update_node_counted(*it);
    note_path(path_.size());
    set_mark(old_root, RootMark::None);
    set_mark(v, m);
  }

  /// Recomputes y, z from direct children at v and every ancestor of v.
  void update_aggregates_path(VertexId v) {
    std::size_t len = 0;
    for (VertexId w = v; w != kNoVertex; w = parent_[w]) {
      update_node_counted(w);
      ++len;
    }
    note_path(len);
  }

  /// Recomputes every y, z by post-order traversal.
  void refresh_aggregates() {
    std::vector<VertexId> order;
    order.reserve(n_);
    for (VertexId r = 0; r < static_cast<VertexId>(n_); ++r) {
      if (parent_[r] != kNoVertex)
        continue;
      const std::size_t start = order.size();
      order.push_back(r);
      for (std::size_t i = start; i < order.size(); ++i)
        for (VertexId ch : children_[order[i]])
          order.push_back(ch);
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it)
      update_node(*it);
  }

  /// Recomputes g from edge states (used after external tampering/tests).
  void refresh_self_terms() {
    for (VertexId v = 0; v < static_cast<VertexId>(n_); ++v)
      g_[v] = self_term(v);
  }

  [[nodiscard]] SubtreeView subtree(VertexId v) const {
    SubtreeView view;
    view.head = v;
    view.vertices.push_back(v);
    for (std::size_t i = 0; i < view.vertices.size(); ++i)
      for (VertexId ch : children_[view.vertices[i]])
        view.vertices.push_back(ch);
    std::vector<char> in(n_, 0);
    for (VertexId w : view.vertices)
      in[w] = 1;
    for (VertexId w : view.vertices)
      for (const auto &inc : inst_->graph.incident(w))
        if (!in[inc.other])
          view.boundary.push_back({inc.edge, w, inc.other, inc.dir});
    return view;
  }

  /// Appends the subtree below v (preorder) to `out`.
  void collect_subtree(VertexId v, std::vector<VertexId> &out) const {
    const std::size_t start = out.size();
    out.push_back(v);
    for (std::size_t i = start; i < out.size(); ++i)
      for (VertexId ch : children_[out[i]])
        out.push_back(ch);
  }

  /// Signed cost contribution of edge e at endpoint v under its current state.
  [[nodiscard]] double edge_term(EdgeId e, VertexId v) const {
    const auto [t, h] = inst_->graph.edge(e);
    switch (state_[e]) {
    case EdgeState::Tree:
      return 0.0;
    case EdgeState::BasicFwd:
      return v == t ? inst_->d_fwd[e] : -inst_->d_fwd[e];
    case EdgeState::BasicBwd:
      return v == h ? inst_->d_bwd[e] : -inst_->d_bwd[e];
    }
    return 0.0;
  }

  [[nodiscard]] const SurgeryWork &work() const { return work_; }

  /// First violated structural, feasibility or aggregate invariant.
  [[nodiscard]] std::optional<BasisViolation>
  check_invariants(double tol = 1e-9) const;

  static constexpr double kMergeGapTol = 1e-9;

private:
  [[nodiscard]] double self_term(VertexId v) const {
    double s = inst_->c[v];
    for (const auto &inc : inst_->graph.incident(v))
      s += edge_term(inc.edge, v);
    return s;
  }

  void set_state(EdgeId e, EdgeState s) {
    const auto [t, h] = inst_->graph.edge(e);
    g_[t] -= edge_term(e, t);
    g_[h] -= edge_term(e, h);
    state_[e] = s;
    g_[t] += edge_term(e, t);
    g_[h] += edge_term(e, h);
  }

  void detach(VertexId c) {
    const VertexId p = parent_[c];
    auto &sib = children_[p];
    const std::size_t slot = child_slot_[c];
    sib[slot] = sib.back();
    child_slot_[sib[slot]] = slot;
    sib.pop_back();
    parent_[c] = kNoVertex;
    parent_edge_[c] = kNoEdge;
  }

  void attach(VertexId c, VertexId p, EdgeId e) {
    parent_[c] = p;
    parent_edge_[c] = e;
    child_slot_[c] = children_[p].size();
    children_[p].push_back(c);
  }

  void update_node(VertexId w) {
    double y = g_[w];
    double z = inst_->h[w];
    for (VertexId ch : children_[w]) {
      y += y_[ch];
      z += z_[ch];
    }
    y_[w] = y;
    z_[w] = z;
  }

  void update_node_counted(VertexId w) {
    update_node(w);
    work_.max_degree = std::max(work_.max_degree, children_[w].size() + 1);
  }

  void note_path(std::size_t len) {
    work_.max_path = std::max(work_.max_path, len);
  }

  const Instance *inst_;
  std::size_t n_;
  std::vector<VertexId> parent_;
  std::vector<EdgeId> parent_edge_;
  std::vector<std::size_t> child_slot_;
  std::vector<std::vector<VertexId>> children_;
  std::vector<double> x_;
  std::vector<double> g_;
  std::vector<double> y_;
  std::vector<double> z_;
  std::vector<RootMark> mark_;
  std::vector<EdgeState> state_;
  VertexId basic_root_ = kNoVertex;
  double slack_ = 0.0;
  SurgeryWork work_;
  std::vector<VertexId> path_;
};

/// All singletons at x = 0 marked Lower, every edge BasicFwd at value 0,
/// slack basic at delta.
inline ForestBasis initial_basis(const Instance &inst) {
  if (!(inst.delta >= 0.0))
    throw BasisError(BasisError::Kind::Infeasible, -1,
                     "initial basis: negative budget is infeasible");
  const auto n = inst.num_vertices();
  const auto m = inst.num_edges();
  std::vector<EdgeId> parent(n, kNoEdge);
  std::vector<RootMark> marks(n, RootMark::Lower);
  std::vector<EdgeState> states(m, EdgeState::BasicFwd);
  std::vector<double> x(n, 0.0);
  return ForestBasis(inst, parent, marks, states, x, inst.delta);
}

inline std::optional<BasisViolation>
ForestBasis::check_invariants(double tol) const {
  using K = BasisViolation::Kind;
  const auto &g = inst_->graph;
  const auto fail = [](K k, std::int64_t at, std::string d = {}) {
    return std::optional<BasisViolation>(BasisViolation{k, at, std::move(d)});
  };

  for (VertexId v = 0; v < static_cast<VertexId>(n_); ++v) {
    const VertexId p = parent_[v];
    if (p == kNoVertex) {
      if (parent_edge_[v] != kNoEdge)
        return fail(K::ParentMismatch, v, "root with a parent edge");
      continue;
    }
    const EdgeId e = parent_edge_[v];
    if (e == kNoEdge || g.other_end(e, v) != p ||
        (g.edge(e).tail != v && g.edge(e).head != v))
      return fail(K::ParentMismatch, v, "parent edge does not join parent");
    if (child_slot_[v] >= children_[p].size() || children_[p][child_slot_[v]] != v)
      return fail(K::ParentMismatch, v, "missing from parent's children");
  }

  // Spanning: every vertex reachable from some root through child links.
  std::vector<char> seen(n_, 0);
  std::vector<VertexId> order;
  order.reserve(n_);
  for (VertexId r = 0; r < static_cast<VertexId>(n_); ++r) {
    if (parent_[r] != kNoVertex)
      continue;
    const std::size_t start = order.size();
    order.push_back(r);
    seen[r] = 1;
    for (std::size_t i = start; i < order.size(); ++i)
      for (VertexId ch : children_[order[i]]) {
        if (seen[ch])
          return fail(K::ParentMismatch, ch, "vertex reached twice");
        seen[ch] = 1;
        order.push_back(ch);
      }
  }
  for (VertexId v = 0; v < static_cast<VertexId>(n_); ++v)
    if (!seen[v])
      return fail(K::NotSpanning, v, "vertex on a parent cycle");

  for (std::size_t ei = 0; ei < g.num_edges(); ++ei) {
    const auto e = static_cast<EdgeId>(ei);
    const auto [t, h] = g.edge(e);
    const bool in_forest = parent_edge_[t] == e || parent_edge_[h] == e;
    if (in_forest != (state_[e] == EdgeState::Tree))
      return fail(K::TreeEdgeMismatch, e);
  }

  for (VertexId v = 0; v < static_cast<VertexId>(n_); ++v) {
    if (!(x_[v] >= -tol && x_[v] <= 1.0 + tol))
      return fail(K::OutOfBounds, v);
    if (parent_[v] != kNoVertex && std::fabs(x_[v] - x_[parent_[v]]) > tol)
      return fail(K::NonConstantX, v);
  }

  for (std::size_t ei = 0; ei < g.num_edges(); ++ei) {
    const auto e = static_cast<EdgeId>(ei);
    const auto [t, h] = g.edge(e);
    if (state_[e] == EdgeState::BasicFwd && x_[h] - x_[t] > tol)
      return fail(K::OrientationMisaligned, e);
    if (state_[e] == EdgeState::BasicBwd && x_[t] - x_[h] > tol)
      return fail(K::OrientationMisaligned, e);
  }

  std::size_t basic_components = 0;
  for (VertexId v = 0; v < static_cast<VertexId>(n_); ++v) {
    const RootMark m = mark_[v];
    if (parent_[v] != kNoVertex) {
      if (m != RootMark::None)
        return fail(K::RootMarkMisplaced, v);
      continue;
    }
    switch (m) {
    case RootMark::None:
      return fail(K::RootMarkMissing, v);
    case RootMark::Lower:
      if (std::fabs(x_[v]) > tol)
        return fail(K::RootNotAtBound, v);
      break;
    case RootMark::Upper:
      if (std::fabs(x_[v] - 1.0) > tol)
        return fail(K::RootNotAtBound, v);
      break;
    case RootMark::BasicComponent:
      ++basic_components;
      if (basic_root_ != v)
        return fail(K::BasicComponentCount, v, "stale basic root");
      break;
    }
  }
  if (basic_components > 1 || (basic_components == 0) != (basic_root_ == kNoVertex))
    return fail(K::BasicComponentCount, static_cast<std::int64_t>(basic_components));

  double used = 0.0;
  for (VertexId v = 0; v < static_cast<VertexId>(n_); ++v)
    used += inst_->h[v] * x_[v];
  const double s = slack();
  if (s < -tol)
    return fail(K::NegativeSlack, -1);
  const double scale = 1.0 + std::fabs(inst_->delta);
  if (std::fabs(used + s - inst_->delta) > tol * scale)
    return fail(K::BudgetMismatch, -1,
                "h.x + s - delta = " + std::to_string(used + s - inst_->delta));

  // Aggregates against a from-scratch recomputation of g and the post-order.
  std::vector<double> y(n_), z(n_);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const VertexId w = *it;
    double yw = self_term(w);
    double zw = inst_->h[w];
    for (VertexId ch : children_[w]) {
      yw += y[ch];
      zw += z[ch];
    }
    y[w] = yw;
    z[w] = zw;
  }
  for (VertexId v = 0; v < static_cast<VertexId>(n_); ++v) {
    const double ty = tol * std::max(1.0, std::fabs(y[v]));
    const double tz = tol * std::max(1.0, std::fabs(z[v]));
    if (std::fabs(y[v] - y_[v]) > ty || std::fabs(z[v] - z_[v]) > tz)
      return fail(K::AggregateMismatch, v);
  }
  return std::nullopt;
}

/// Structure of a basis without values: enough to rebuild it from a point.
struct BasisSnapshot {
  std::vector<EdgeId> parent_edge;
  std::vector<RootMark> marks;
  std::vector<EdgeState> states;
};

inline BasisSnapshot snapshot(const ForestBasis &f) {
  return {f.parent_edges(), f.marks(), f.states()};
}

/// Throws BasisError(Infeasible) when the snapshot does not fit the instance.
inline ForestBasis restore(const Instance &inst, const BasisSnapshot &snap,
                           std::span<const double> x, double slack) {
  const auto n = inst.num_vertices();
  const auto m = inst.num_edges();
  if (snap.parent_edge.size() != n || snap.marks.size() != n ||
      snap.states.size() != m || x.size() != n)
    throw BasisError(BasisError::Kind::Infeasible, -1,
                     "restore: snapshot does not match the instance");
  for (std::size_t v = 0; v < n; ++v) {
    const EdgeId e = snap.parent_edge[v];
    if (e == kNoEdge)
      continue;
    const auto vi = static_cast<VertexId>(v);
    if (e < 0 || static_cast<std::size_t>(e) >= m ||
        (inst.graph.edge(e).tail != vi && inst.graph.edge(e).head != vi))
      throw BasisError(BasisError::Kind::Infeasible, static_cast<std::int64_t>(v),
                       "restore: parent edge not incident to its vertex");
  }
  return ForestBasis(inst, snap.parent_edge, snap.marks, snap.states, x, slack);
}

} // namespace tvsimplex
