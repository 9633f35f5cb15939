#pragma once

#include "tvsimplex/forest.hpp"
#include "tvsimplex/instance.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace tvsimplex {

enum class CandidateKind : std::uint8_t {
  RootVertex,         ///< nonbasic x_r of a rooted tree
  TreeEdge,           ///< a-variable of a tree edge in a rooted tree
  BasicComponentEdge, ///< a-variable of a tree edge inside the basic component
  SlackEnter,         ///< nonbasic slack
};

/// Direction of the primary moving set.
enum class Move : std::int8_t { Down = -1, Up = 1 };

inline double sign(Move m) { return m == Move::Up ? 1.0 : -1.0; }

/// An entering variable with its reduced cost.
///
/// `vertex` is the root (RootVertex), the child endpoint of the edge (edge
/// kinds) or the basic root (SlackEnter). `reduced_cost` is the derivative of
/// the objective in the entering variable; it improves when negative for
/// variables at their lower bound and positive for roots at Upper.
struct PivotCandidate {
  CandidateKind kind = CandidateKind::RootVertex;
  VertexId vertex = kNoVertex;
  EdgeId edge = kNoEdge;
  Move move = Move::Up;
  double reduced_cost = 0.0;

  /// Objective change per unit step in the feasible direction.
  [[nodiscard]] double objective_rate() const {
    return kind == CandidateKind::RootVertex && move == Move::Down
               ? -reduced_cost
               : reduced_cost;
  }
};

struct MovingSet {
  VertexId head = kNoVertex;
  std::vector<VertexId> vertices;
  double rate = 0.0;
  double weight = 0.0;
};

/// Up to two vertex sets shifted at constant rates per unit step. Set 0 is the
/// set that loses its nonbasic vertex when the candidate enters; set 1, when
/// present, is the (remaining) basic component moving against it.
struct ShiftPattern {
  std::array<MovingSet, 2> sets;
  int count = 0;
  double slack_rate = 0.0;
};

enum class EventTag : std::uint8_t {
  BlockingEdge,
  BudgetExhausted,
  BoundHit,
  CounterBoundHit,
};

inline const char *to_string(EventTag t) {
  switch (t) {
  case EventTag::BlockingEdge: return "blocking_edge";
  case EventTag::BudgetExhausted: return "budget_exhausted";
  case EventTag::BoundHit: return "bound_hit";
  case EventTag::CounterBoundHit: return "counter_bound_hit";
  }
  return "?";
}

struct PivotEvent {
  EventTag tag = EventTag::BoundHit;
  double step = 0.0;
  EdgeId edge = kNoEdge;
  double bound = 0.0;
  VertexId leaving = kNoVertex;
};

/// Pivot taxonomy: merge, shift-budget, shift, double-shift-merge,
/// double-shift, shift-slack, split, split-double-shift.
enum class PivotCase : std::uint8_t { A, B, C, D, E, F, G, H };

inline char case_letter(PivotCase c) {
  return static_cast<char>('a' + static_cast<int>(c));
}

enum class PricingRule : std::uint8_t { Dantzig, Bland };

struct SolveStats {
  std::size_t pivots = 0;
  std::size_t degenerate_pivots = 0;
  std::size_t basis_exchanges = 0;
  std::size_t bland_pivots = 0;
  std::array<std::size_t, 8> pivots_by_case{};
  std::size_t max_path_len = 0;
  std::size_t max_degree = 0;
  std::size_t max_subtree = 0;
  std::size_t max_boundary = 0;
  double wall_time_s = 0.0;
};

/// Scratch buffers shared by pricing and ratio tests.
struct Workspace {
  std::vector<std::uint32_t> stamp;
  std::vector<std::int8_t> which;
  std::uint32_t current = 0;
  std::vector<VertexId> buffer;
  std::size_t last_boundary = 0;

  void prepare(std::size_t n) {
    if (stamp.size() != n) {
      stamp.assign(n, 0);
      which.assign(n, -1);
      current = 0;
    }
    if (++current == 0) {
      std::fill(stamp.begin(), stamp.end(), 0);
      current = 1;
    }
  }
  void tag(VertexId v, int set) {
    stamp[v] = current;
    which[v] = static_cast<std::int8_t>(set);
  }
  [[nodiscard]] int set_of(VertexId v) const {
    return stamp[v] == current ? which[v] : -1;
  }
};

namespace detail {

/// Orientation that makes the candidate's entering a-variable basic.
inline EdgeState entering_orientation(const ForestBasis &f,
                                      const PivotCandidate &cand) {
  const auto &edge = f.instance().graph.edge(cand.edge);
  const bool child_is_tail = edge.tail == cand.vertex;
  // Down: the parent-minus-child variable enters.
  const bool fwd = cand.move == Move::Down ? !child_is_tail : child_is_tail;
  return fwd ? EdgeState::BasicFwd : EdgeState::BasicBwd;
}

inline double edge_cost(const Instance &inst, EdgeId e, EdgeState orient) {
  return orient == EdgeState::BasicFwd ? inst.d_fwd[e] : inst.d_bwd[e];
}

inline std::size_t variable_index(const Instance &inst, EdgeId e,
                                   EdgeState orient) {
  return inst.num_vertices() + 2 * static_cast<std::size_t>(e) +
         (orient == EdgeState::BasicBwd ? 1 : 0);
}

inline std::size_t slack_index(const Instance &inst) {
  return inst.num_vertices() + 2 * inst.num_edges();
}

inline RootMark bound_mark(double value) {
  return value > 0.5 ? RootMark::Upper : RootMark::Lower;
}

} // namespace detail

/// Column index of the entering variable: x_v, then (a_fwd, a_bwd) per edge,
/// then s. Used by Bland's rule.
inline std::size_t entering_index(const ForestBasis &f,
                                  const PivotCandidate &cand) {
  const auto &inst = f.instance();
  switch (cand.kind) {
  case CandidateKind::RootVertex:
    return static_cast<std::size_t>(cand.vertex);
  case CandidateKind::TreeEdge:
  case CandidateKind::BasicComponentEdge:
    return detail::variable_index(inst, cand.edge,
                                  detail::entering_orientation(f, cand));
  case CandidateKind::SlackEnter:
    return detail::slack_index(inst);
  }
  return 0;
}

inline std::string entering_name(const ForestBasis &f,
                                 const PivotCandidate &cand) {
  switch (cand.kind) {
  case CandidateKind::RootVertex:
    return "x" + std::to_string(cand.vertex);
  case CandidateKind::TreeEdge:
  case CandidateKind::BasicComponentEdge:
    return (detail::entering_orientation(f, cand) == EdgeState::BasicFwd
                ? "ap"
                : "am") +
           std::to_string(cand.edge);
  case CandidateKind::SlackEnter:
    return "s";
  }
  return "?";
}

/// Reduced cost of a nonbasic candidate from the subtree aggregates. O(1).
///
/// With the slack basic: roots y_r, tree edges d -/+ y_c. With the slack
/// nonbasic and basic root r' (H = z_r'): every shift of a rooted set S is
/// compensated on the basic component at rate h(S)/H, adding -(z/H) y_r';
/// splitting the basic component trades N_c against the remainder at rates
/// (H - z_c)/H and z_c/H; the slack moves the basic component alone.
inline double reduced_cost(const ForestBasis &f, const PivotCandidate &cand) {
  const auto &inst = f.instance();
  const VertexId br = f.basic_root();
  switch (cand.kind) {
  case CandidateKind::RootVertex: {
    const VertexId r = cand.vertex;
    if (!f.is_root(r) || f.mark(r) == RootMark::BasicComponent ||
        f.mark(r) == RootMark::None)
      throw BasisError(BasisError::Kind::NotNonbasic, r,
                       "reduced_cost: x" + std::to_string(r) +
                           " is not a nonbasic root");
    if (f.slack_basic())
      return f.y(r);
    return f.y(r) - (f.z(r) / f.z(br)) * f.y(br);
  }
  case CandidateKind::TreeEdge:
  case CandidateKind::BasicComponentEdge: {
    const EdgeId e = cand.edge;
    if (f.state(e) != EdgeState::Tree || f.tree_child(e) != cand.vertex)
      throw BasisError(BasisError::Kind::NotNonbasic, e,
                       "reduced_cost: edge " + std::to_string(e) +
                           " is not a tree edge with that child");
    const double d =
        detail::edge_cost(inst, e, detail::entering_orientation(f, cand));
    const double sigma = sign(cand.move);
    const VertexId c = cand.vertex;
    if (f.slack_basic())
      return d + sigma * f.y(c);
    const double hb = f.z(br);
    if (cand.kind == CandidateKind::TreeEdge)
      return d + sigma * (f.y(c) - (f.z(c) / hb) * f.y(br));
    return d + sigma * (((hb - f.z(c)) / hb) * f.y(c) -
                        (f.z(c) / hb) * (f.y(br) - f.y(c)));
  }
  case CandidateKind::SlackEnter:
    if (f.slack_basic())
      throw BasisError(BasisError::Kind::NotNonbasic, -1,
                       "reduced_cost: slack is basic");
    return -f.y(br) / f.z(br);
  }
  return 0.0;
}

/// Calls fn(candidate) for every nonbasic variable that may enter, with its
/// reduced cost filled in. Basic-edge partners are skipped: their reduced
/// cost d_fwd + d_bwd is never negative.
template <class Fn>
void for_each_candidate(const ForestBasis &f, Workspace &ws, Fn &&fn) {
  const auto n = static_cast<VertexId>(f.num_vertices());
  const VertexId br = f.basic_root();
  ws.prepare(f.num_vertices());
  if (br != kNoVertex) {
    ws.buffer.clear();
    f.collect_subtree(br, ws.buffer);
    for (VertexId v : ws.buffer)
      ws.tag(v, 1);
  }
  for (VertexId v = 0; v < n; ++v) {
    PivotCandidate cand;
    cand.vertex = v;
    if (f.is_root(v)) {
      if (f.mark(v) == RootMark::BasicComponent) {
        cand.kind = CandidateKind::SlackEnter;
        cand.move = Move::Down;
      } else {
        cand.kind = CandidateKind::RootVertex;
        cand.move = f.mark(v) == RootMark::Upper ? Move::Down : Move::Up;
      }
      cand.reduced_cost = reduced_cost(f, cand);
      fn(cand);
      continue;
    }
    cand.kind = ws.set_of(v) == 1 ? CandidateKind::BasicComponentEdge
                                  : CandidateKind::TreeEdge;
    cand.edge = f.parent_edge(v);
    for (Move m : {Move::Down, Move::Up}) {
      cand.move = m;
      cand.reduced_cost = reduced_cost(f, cand);
      fn(cand);
    }
  }
}

/// Chooses an entering candidate, or nullopt when no candidate improves the
/// objective by more than tol per unit step. Dantzig: steepest objective
/// rate; Bland: smallest column index. Ties go to the smaller column index.
///
/// Single pass over vertices without materializing candidates. Inside the
/// basic component the edge reduced cost (H - z_c)/H y_c - z_c/H (y_r' - y_c)
/// equals y_c - z_c/H y_r', the rooted-tree form, so membership is only
/// resolved for the winner.
inline std::optional<PivotCandidate> price(const ForestBasis &f,
                                           PricingRule rule, double tol,
                                           [[maybe_unused]] Workspace &ws) {
  const auto &inst = f.instance();
  const auto &g = inst.graph;
  const auto n = static_cast<VertexId>(f.num_vertices());
  const VertexId br = f.basic_root();
  const bool nb = br != kNoVertex;
  const double yb_over_h = nb ? f.y(br) / f.z(br) : 0.0;

  bool found = false;
  double best_rate = 0.0;
  std::size_t best_index = 0;
  PivotCandidate best;
  const auto offer = [&](double rate, std::size_t idx, CandidateKind kind,
                         VertexId v, EdgeId e, Move m, double rc) {
    if (!(rate < -tol))
      return;
    const bool better =
        !found || (rule == PricingRule::Bland
                       ? idx < best_index
                       : (rate < best_rate ||
                          (rate == best_rate && idx < best_index)));
    if (!better)
      return;
    found = true;
    best_rate = rate;
    best_index = idx;
    best = PivotCandidate{kind, v, e, m, rc};
  };

  for (VertexId v = 0; v < n; ++v) {
    if (f.is_root(v)) {
      const RootMark mk = f.mark(v);
      if (mk == RootMark::BasicComponent) {
        const double rc = -yb_over_h;
        offer(rc, detail::slack_index(inst), CandidateKind::SlackEnter, v,
              kNoEdge, Move::Down, rc);
        continue;
      }
      const double rc = nb ? f.y(v) - f.z(v) * yb_over_h : f.y(v);
      const bool upper = mk == RootMark::Upper;
      offer(upper ? -rc : rc, static_cast<std::size_t>(v),
            CandidateKind::RootVertex, v, kNoEdge,
            upper ? Move::Down : Move::Up, rc);
      continue;
    }
    const EdgeId e = f.parent_edge(v);
    const bool child_is_tail = g.edge(e).tail == v;
    const double yterm = nb ? f.y(v) - f.z(v) * yb_over_h : f.y(v);
    // Down opens parent-minus-child: the forward variable when the child is
    // the head.
    const double d_down = child_is_tail ? inst.d_bwd[e] : inst.d_fwd[e];
    const double d_up = child_is_tail ? inst.d_fwd[e] : inst.d_bwd[e];
    const std::size_t base =
        inst.num_vertices() + 2 * static_cast<std::size_t>(e);
    const double rc_down = d_down - yterm;
    const double rc_up = d_up + yterm;
    offer(rc_down, base + (child_is_tail ? 1 : 0), CandidateKind::TreeEdge, v,
          e, Move::Down, rc_down);
    offer(rc_up, base + (child_is_tail ? 0 : 1), CandidateKind::TreeEdge, v, e,
          Move::Up, rc_up);
  }
  if (!found)
    return std::nullopt;
  if (best.kind == CandidateKind::TreeEdge && nb && f.root_of(best.vertex) == br) {
    best.kind = CandidateKind::BasicComponentEdge;
    best.reduced_cost = reduced_cost(f, best);
  }
  return best;
}

inline std::optional<PivotCandidate> price(const ForestBasis &f,
                                           PricingRule rule, double tol) {
  Workspace ws;
  return price(f, rule, tol, ws);
}

/// Moving sets and rates for a candidate (see ShiftPattern). Reuses the
/// pattern's buffers.
inline void build_pattern(const ForestBasis &f, const PivotCandidate &cand,
                          ShiftPattern &pat) {
  const auto &inst = f.instance();
  const VertexId br = f.basic_root();
  const double sigma = sign(cand.move);
  auto &primary = pat.sets[0];
  auto &counter = pat.sets[1];
  pat.slack_rate = 0.0;

  const auto weigh = [&inst](MovingSet &s) {
    double w = 0.0;
    for (VertexId v : s.vertices)
      w += inst.h[v];
    s.weight = w;
  };
  const auto fill = [&f, &weigh](MovingSet &s, VertexId head) {
    s.head = head;
    s.vertices.clear();
    f.collect_subtree(head, s.vertices);
    weigh(s);
  };

  switch (cand.kind) {
  case CandidateKind::RootVertex:
  case CandidateKind::TreeEdge: {
    fill(primary, cand.vertex);
    primary.rate = sigma;
    pat.count = 1;
    if (f.slack_basic()) {
      pat.slack_rate = -sigma * primary.weight;
    } else {
      fill(counter, br);
      counter.rate = -sigma * primary.weight / counter.weight;
      pat.count = 2;
    }
    break;
  }
  case CandidateKind::BasicComponentEdge: {
    fill(primary, cand.vertex);
    // Remainder of the basic component: its tree without the split subtree.
    counter.head = br;
    counter.vertices.clear();
    counter.vertices.push_back(br);
    for (std::size_t i = 0; i < counter.vertices.size(); ++i)
      for (VertexId ch : f.children(counter.vertices[i]))
        if (ch != cand.vertex)
          counter.vertices.push_back(ch);
    weigh(counter);
    const double hb = primary.weight + counter.weight;
    primary.rate = sigma * counter.weight / hb;
    counter.rate = -sigma * primary.weight / hb;
    pat.count = 2;
    break;
  }
  case CandidateKind::SlackEnter:
    fill(primary, br);
    primary.rate = -1.0 / primary.weight;
    pat.count = 1;
    pat.slack_rate = 1.0;
    break;
  }
}

inline ShiftPattern build_pattern(const ForestBasis &f,
                                  const PivotCandidate &cand) {
  ShiftPattern pat;
  build_pattern(f, cand, pat);
  return pat;
}

namespace detail {

struct EventChoice {
  PivotEvent event;
  int priority = 0;
  std::size_t leaving_index = 0;
  std::int64_t id = 0;
};

} // namespace detail

inline constexpr double kZeroStep = 1e-14;
inline constexpr double kTieTol = 1e-12;

/// Smallest step at which a basic variable hits a bound under the pattern.
///
/// Limits: basic edges whose gap closes (blocking edges), each set's distance
/// to 0/1, and the slack when it is basic and the move consumes budget. Ties
/// within kTieTol resolve BlockingEdge > BudgetExhausted > bound hits, then by
/// lowest edge/vertex id; under Bland's rule the lowest leaving column wins.
inline PivotEvent ratio_test(const ForestBasis &f,
                             [[maybe_unused]] const PivotCandidate &cand,
                             const ShiftPattern &pat, PricingRule rule,
                             Workspace &ws) {
  const auto &inst = f.instance();
  const auto &g = inst.graph;
  ws.prepare(f.num_vertices());
  for (int s = 0; s < pat.count; ++s)
    for (VertexId v : pat.sets[s].vertices)
      ws.tag(v, s);
  const auto rate_of = [&](VertexId v) {
    const int s = ws.set_of(v);
    return s < 0 ? 0.0 : pat.sets[s].rate;
  };

  std::vector<detail::EventChoice> choices;
  double best = std::numeric_limits<double>::infinity();
  const auto offer = [&](double ratio, detail::EventChoice ch) {
    if (ratio < kZeroStep)
      ratio = 0.0;
    ch.event.step = ratio;
    if (ratio > best + kTieTol)
      return;
    if (ratio < best - kTieTol) {
      // Drop choices that are no longer within the tie window.
      std::erase_if(choices, [&](const detail::EventChoice &c) {
        return c.event.step > ratio + kTieTol;
      });
    }
    best = std::min(best, ratio);
    choices.push_back(ch);
  };

  std::size_t scanned = 0;
  for (int s = 0; s < pat.count; ++s) {
    for (VertexId v : pat.sets[s].vertices) {
      for (const auto &inc : g.incident(v)) {
        const EdgeId e = inc.edge;
        const EdgeState st = f.state(e);
        if (st == EdgeState::Tree)
          continue;
        const int other = ws.set_of(inc.other);
        if (other == s || (other >= 0 && other < s))
          continue;
        ++scanned;
        const auto [t, h] = g.edge(e);
        const VertexId from = st == EdgeState::BasicFwd ? t : h;
        const VertexId to = st == EdgeState::BasicFwd ? h : t;
        const double closing = rate_of(from) - rate_of(to);
        if (!(closing < -1e-15))
          continue;
        const double gap = std::max(0.0, f.x(from) - f.x(to));
        detail::EventChoice ch;
        ch.event.tag = EventTag::BlockingEdge;
        ch.event.edge = e;
        ch.priority = 0;
        ch.leaving_index = detail::variable_index(inst, e, st);
        ch.id = e;
        offer(gap / -closing, ch);
      }
    }
  }
  ws.last_boundary = scanned;

  if (f.slack_basic() && pat.slack_rate < 0.0) {
    detail::EventChoice ch;
    ch.event.tag = EventTag::BudgetExhausted;
    ch.priority = 1;
    ch.leaving_index = detail::slack_index(inst);
    offer(std::max(0.0, f.slack()) / -pat.slack_rate, ch);
  }

  for (int s = 0; s < pat.count; ++s) {
    const auto &set = pat.sets[s];
    if (set.rate == 0.0)
      continue;
    const double value = f.x(set.head);
    detail::EventChoice ch;
    ch.event.tag = s == 0 ? EventTag::BoundHit : EventTag::CounterBoundHit;
    ch.event.bound = set.rate > 0.0 ? 1.0 : 0.0;
    ch.priority = 2;
    VertexId leaving = set.head;
    if (rule == PricingRule::Bland)
      for (VertexId v : set.vertices)
        leaving = std::min(leaving, v);
    ch.event.leaving = leaving;
    ch.leaving_index = static_cast<std::size_t>(leaving);
    ch.id = leaving;
    const double dist = set.rate > 0.0 ? 1.0 - value : value;
    offer(std::max(0.0, dist) / std::fabs(set.rate), ch);
  }

  if (choices.empty())
    throw std::logic_error("ratio_test: unbounded step");
  const detail::EventChoice *pick = nullptr;
  for (const auto &ch : choices) {
    if (ch.event.step > best + kTieTol)
      continue;
    if (!pick) {
      pick = &ch;
      continue;
    }
    const bool better =
        rule == PricingRule::Bland
            ? ch.leaving_index < pick->leaving_index
            : (ch.priority < pick->priority ||
               (ch.priority == pick->priority && ch.id < pick->id));
    if (better)
      pick = &ch;
  }
  PivotEvent ev = pick->event;
  ev.step = best;
  return ev;
}

inline PivotEvent ratio_test(const ForestBasis &f, const PivotCandidate &cand,
                             const ShiftPattern &pat,
                             PricingRule rule = PricingRule::Dantzig) {
  Workspace ws;
  return ratio_test(f, cand, pat, rule, ws);
}

namespace detail {

inline void assign_x(ForestBasis &f, const std::vector<VertexId> &set,
                     double value) {
  for (VertexId v : set)
    f.set_x(v, value);
}

inline double snap_unit(double v) {
  constexpr double kSnap = 1e-12;
  if (v < kSnap)
    return 0.0;
  if (v > 1.0 - kSnap)
    return 1.0;
  return v;
}

/// The leaving vertex becomes the nonbasic root of its set at `bound`.
inline void root_at_bound(ForestBasis &f, VertexId leaving, double bound) {
  f.evert(leaving);
  f.set_mark(leaving, bound_mark(bound));
}

} // namespace detail

/// Shifts x along the pattern by the event's step and performs the basis
/// exchange as forest surgery. Returns the pivot case.
inline PivotCase apply_pivot(ForestBasis &f, const PivotCandidate &cand,
                             ShiftPattern &pat, const PivotEvent &ev) {
  using detail::assign_x;
  const auto &g = f.instance().graph;
  const double step = ev.step;

  // Shift values. Rooted trees land exactly on 0/1.
  std::array<double, 2> values{};
  for (int s = 0; s < pat.count; ++s) {
    auto &set = pat.sets[s];
    double v = f.x(set.head) + set.rate * step;
    if ((ev.tag == EventTag::BoundHit && s == 0) ||
        (ev.tag == EventTag::CounterBoundHit && s == 1))
      v = ev.bound;
    v = detail::snap_unit(v);
    values[s] = v;
    assign_x(f, set.vertices, v);
  }
  const bool slack_was_basic = f.slack_basic();
  const double new_slack =
      ev.tag == EventTag::BudgetExhausted
          ? 0.0
          : std::max(0.0, f.slack() + pat.slack_rate * step);

  const VertexId primary_head = pat.sets[0].head;

  if (cand.kind == CandidateKind::TreeEdge ||
      cand.kind == CandidateKind::BasicComponentEdge)
    f.split(cand.edge, detail::entering_orientation(f, cand));

  const auto set_of = [&](VertexId v) {
    for (int s = 0; s < pat.count; ++s)
      if (std::find(pat.sets[s].vertices.begin(), pat.sets[s].vertices.end(),
                    v) != pat.sets[s].vertices.end())
        return s;
    return -1;
  };

  PivotCase kase = PivotCase::C;
  switch (cand.kind) {
  case CandidateKind::RootVertex:
    kase = slack_was_basic ? PivotCase::A : PivotCase::D;
    break;
  case CandidateKind::TreeEdge:
    kase = PivotCase::G;
    break;
  case CandidateKind::BasicComponentEdge:
    kase = PivotCase::H;
    break;
  case CandidateKind::SlackEnter:
    kase = PivotCase::F;
    break;
  }

  switch (ev.tag) {
  case EventTag::BlockingEdge: {
    const auto [t, h] = g.edge(ev.edge);
    const int st = set_of(t);
    const int sh = set_of(h);
    // Which endpoint survives as the tree owner: a rooted tree beats any
    // moving set; the basic component (set 1) beats the primary set.
    int moving_side; // set index of the absorbed side
    VertexId absorbing;
    if (st < 0 || sh < 0) {
      absorbing = st < 0 ? t : h;
      moving_side = st < 0 ? sh : st;
    } else {
      absorbing = st == 1 ? t : h;
      moving_side = 0;
    }
    const VertexId absorbed = g.other_end(ev.edge, absorbing);
    assign_x(f, pat.sets[moving_side].vertices, f.x(absorbing));
    f.merge(ev.edge, absorbing);
    if (cand.kind == CandidateKind::SlackEnter) {
      f.set_slack(step);
    } else if (moving_side == 1) {
      // The basic component joined a rooted tree; the primary set takes over.
      f.set_mark(primary_head, RootMark::BasicComponent);
    } else if (slack_was_basic) {
      f.set_slack(new_slack);
    }
    (void)absorbed;
    if (kase == PivotCase::C)
      kase = PivotCase::A;
    break;
  }
  case EventTag::BudgetExhausted:
    f.set_mark(primary_head, RootMark::BasicComponent);
    if (kase == PivotCase::A)
      kase = PivotCase::B;
    break;
  case EventTag::BoundHit:
    if (cand.kind == CandidateKind::SlackEnter) {
      detail::root_at_bound(f, ev.leaving, values[0]);
      f.set_slack(step);
    } else {
      detail::root_at_bound(f, ev.leaving, values[0]);
      if (slack_was_basic)
        f.set_slack(new_slack);
    }
    if (cand.kind == CandidateKind::RootVertex)
      kase = PivotCase::C;
    break;
  case EventTag::CounterBoundHit:
    detail::root_at_bound(f, ev.leaving, values[1]);
    f.set_mark(primary_head, RootMark::BasicComponent);
    if (cand.kind == CandidateKind::RootVertex)
      kase = PivotCase::E;
    break;
  }
  return kase;
}

/// One inequality of an optimality certificate: the objective rate of moving
/// a nonbasic variable off its bound, which must be >= -tol.
struct CertificateEntry {
  enum class Kind : std::uint8_t {
    RootLower,
    RootUpper,
    EdgeDown,
    EdgeUp,
    BasicEdgeDown,
    BasicEdgeUp,
    Slack,
  };
  Kind kind;
  std::int64_t at = -1;
  double value = 0.0;
};

inline const char *to_string(CertificateEntry::Kind k) {
  using K = CertificateEntry::Kind;
  switch (k) {
  case K::RootLower: return "root_lower";
  case K::RootUpper: return "root_upper";
  case K::EdgeDown: return "edge_down";
  case K::EdgeUp: return "edge_up";
  case K::BasicEdgeDown: return "basic_edge_down";
  case K::BasicEdgeUp: return "basic_edge_up";
  case K::Slack: return "slack";
  }
  return "?";
}

/// Sufficient optimality conditions for a forest basis. With the slack basic
/// every root is at a bound and the entries are F-values of trees and
/// subtrees; with the slack nonbasic, rho = F(B)/h(B) is the basic
/// component's value per unit budget and each entry compares against it.
struct Certificate {
  bool slack_basic = true;
  VertexId basic_root = kNoVertex;
  double rho = 0.0;
  BasisSnapshot basis;
  std::vector<CertificateEntry> entries;
};

struct OptimalityViolation {
  enum class Kind { Structure, ReducedCost };
  Kind kind;
  std::optional<BasisViolation> structure;
  std::optional<CertificateEntry> entry;
  std::string message;
};

inline CertificateEntry::Kind entry_kind(const PivotCandidate &cand) {
  using K = CertificateEntry::Kind;
  switch (cand.kind) {
  case CandidateKind::RootVertex:
    return cand.move == Move::Up ? K::RootLower : K::RootUpper;
  case CandidateKind::TreeEdge:
    return cand.move == Move::Down ? K::EdgeDown : K::EdgeUp;
  case CandidateKind::BasicComponentEdge:
    return cand.move == Move::Down ? K::BasicEdgeDown : K::BasicEdgeUp;
  case CandidateKind::SlackEnter:
    return K::Slack;
  }
  return K::Slack;
}

/// Certifies optimality of the basis or reports the first failing condition.
inline std::variant<Certificate, OptimalityViolation>
check_optimality(const ForestBasis &f, double tol = 1e-9) {
  if (auto bad = f.check_invariants(std::max(tol, 1e-9))) {
    return OptimalityViolation{OptimalityViolation::Kind::Structure, bad,
                               std::nullopt,
                               std::string("basis invariant violated: ") +
                                   to_string(bad->kind) + " at " +
                                   std::to_string(bad->location)};
  }
  Certificate cert;
  cert.slack_basic = f.slack_basic();
  cert.basic_root = f.basic_root();
  if (!cert.slack_basic)
    cert.rho = f.y(cert.basic_root) / f.z(cert.basic_root);
  cert.basis = snapshot(f);
  std::optional<OptimalityViolation> failed;
  Workspace ws;
  for_each_candidate(f, ws, [&](const PivotCandidate &cand) {
    CertificateEntry entry{entry_kind(cand),
                           cand.kind == CandidateKind::RootVertex ||
                                   cand.kind == CandidateKind::SlackEnter
                               ? static_cast<std::int64_t>(cand.vertex)
                               : static_cast<std::int64_t>(cand.edge),
                           cand.objective_rate()};
    if (!failed && entry.value < -tol)
      failed = OptimalityViolation{
          OptimalityViolation::Kind::ReducedCost, std::nullopt, entry,
          std::string("improving direction ") + to_string(entry.kind) +
              " at " + std::to_string(entry.at) + " with rate " +
              std::to_string(entry.value)};
    cert.entries.push_back(entry);
  });
  if (failed)
    return *failed;
  return cert;
}

inline constexpr std::size_t kMinDegeneracySwitch = 50;

struct SolveOptions {
  double tol = 1e-9;
  std::size_t max_iters = std::numeric_limits<std::size_t>::max();
  /// Consecutive degenerate pivots before Bland's rule takes over; 0 picks
  /// max(kMinDegeneracySwitch, |V| + |E|).
  std::size_t degeneracy_switch = 0;
  std::size_t refresh_every = 4096;
  PricingRule pricing = PricingRule::Dantzig;
  /// Optional JSON-lines pivot trace.
  std::ostream *trace = nullptr;
  /// Called with every basis before it is priced, including the final one.
  std::function<void(const ForestBasis &, std::size_t)> visit;
  /// Polled every 64 pivots; returning true stops with Interrupted.
  std::function<bool()> interrupt;
};

enum class SolveStatus : std::uint8_t { Optimal, IterationLimit, Interrupted };

inline const char *to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::Optimal: return "optimal";
  case SolveStatus::IterationLimit: return "iteration_limit";
  case SolveStatus::Interrupted: return "interrupted";
  }
  return "?";
}

/// Final point. `basis` refers to the instance passed to solve().
struct SolveResult {
  SolveStatus status = SolveStatus::Optimal;
  DenseSolution solution;
  SolveStats stats;
  ForestBasis basis;
  std::optional<Certificate> certificate;
};

namespace detail {

inline std::string leaving_name(const ForestBasis &f, const PivotCandidate &cand,
                                const PivotEvent &ev) {
  switch (ev.tag) {
  case EventTag::BlockingEdge:
    return (f.state(ev.edge) == EdgeState::BasicFwd ? "ap" : "am") +
           std::to_string(ev.edge);
  case EventTag::BudgetExhausted:
    return "s";
  case EventTag::BoundHit:
  case EventTag::CounterBoundHit:
    if (cand.kind == CandidateKind::RootVertex && ev.leaving == cand.vertex &&
        ev.tag == EventTag::BoundHit)
      return "x" + std::to_string(cand.vertex);
    return "x" + std::to_string(ev.leaving);
  }
  return "?";
}

/// Recomputes aggregates and the slack (or the basic component's value) from
/// scratch to shed accumulated rounding.
inline void repair(ForestBasis &f) {
  f.refresh_aggregates();
  const auto &inst = f.instance();
  if (f.slack_basic()) {
    f.set_slack(std::max(0.0, inst.delta - budget_used(inst, f.x())));
    return;
  }
  std::vector<VertexId> comp;
  f.collect_subtree(f.basic_root(), comp);
  double inside = 0.0;
  for (VertexId v : comp)
    inside += inst.h[v] * f.x(v);
  const double outside = budget_used(inst, f.x()) - inside;
  const double value =
      snap_unit(std::clamp((inst.delta - outside) / f.z(f.basic_root()), 0.0, 1.0));
  assign_x(f, comp, value);
}

} // namespace detail

/// Primal simplex over forest bases from initial_basis(). Dantzig pricing by
/// default, switching to Bland's rule after `degeneracy_switch` consecutive
/// degenerate pivots and back after the next nondegenerate one.
inline SolveResult solve(const Instance &inst, const SolveOptions &opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  ForestBasis f = initial_basis(inst);
  SolveStats stats;
  Workspace ws;
  double objective = 0.0;
  std::size_t degenerate_streak = 0;
  bool bland = opt.pricing == PricingRule::Bland;
  SolveStatus status = SolveStatus::Optimal;
  ShiftPattern pat;
  const std::size_t switch_after =
      opt.degeneracy_switch > 0
          ? opt.degeneracy_switch
          : std::max(kMinDegeneracySwitch,
                     inst.num_vertices() + inst.num_edges());

  for (std::size_t iter = 0;; ++iter) {
    if (opt.visit)
      opt.visit(f, iter);
    const PricingRule rule = bland ? PricingRule::Bland : PricingRule::Dantzig;
    const auto cand = price(f, rule, opt.tol, ws);
    if (!cand)
      break;
    if (stats.pivots >= opt.max_iters) {
      status = SolveStatus::IterationLimit;
      break;
    }
    if (opt.interrupt && (stats.pivots & 63) == 0 && opt.interrupt()) {
      status = SolveStatus::Interrupted;
      break;
    }
    build_pattern(f, *cand, pat);
    const PivotEvent ev = ratio_test(f, *cand, pat, rule, ws);
    const std::string entering =
        opt.trace ? entering_name(f, *cand) : std::string();
    const std::string leaving =
        opt.trace ? detail::leaving_name(f, *cand, ev) : std::string();
    const PivotCase kase = apply_pivot(f, *cand, pat, ev);

    objective += cand->objective_rate() * ev.step;
    ++stats.pivots;
    if (bland)
      ++stats.bland_pivots;
    ++stats.pivots_by_case[static_cast<std::size_t>(kase)];
    if (!(kase == PivotCase::C && cand->kind == CandidateKind::RootVertex &&
          ev.leaving == cand->vertex))
      ++stats.basis_exchanges;
    std::size_t moved = 0;
    for (int s = 0; s < pat.count; ++s)
      moved += pat.sets[s].vertices.size();
    stats.max_subtree = std::max(stats.max_subtree, moved);
    stats.max_boundary = std::max(stats.max_boundary, ws.last_boundary);

    if (ev.step == 0.0) {
      ++stats.degenerate_pivots;
      if (++degenerate_streak >= switch_after)
        bland = true;
    } else {
      degenerate_streak = 0;
      bland = opt.pricing == PricingRule::Bland;
    }

    if (opt.refresh_every > 0 && stats.pivots % opt.refresh_every == 0)
      detail::repair(f);

    if (opt.trace) {
      *opt.trace << "{\"pivot\":" << stats.pivots << ",\"tag\":\""
                 << case_letter(kase) << "\",\"event\":\"" << to_string(ev.tag)
                 << "\",\"entering\":\"" << entering
                 << "\",\"leaving\":\"" << leaving << "\",\"step\":"
                 << detail::format_number(ev.step) << ",\"objective\":"
                 << detail::format_number(objective) << "}\n";
    }
  }

  stats.max_path_len = f.work().max_path;
  stats.max_degree = f.work().max_degree;
  SolveResult result{status,
                     DenseSolution{f.x(), f.slack(),
                                   evaluate_objective(inst, f.x())},
                     stats, f, std::nullopt};
  if (status == SolveStatus::Optimal) {
    auto cert = check_optimality(f, opt.tol);
    if (auto *c = std::get_if<Certificate>(&cert))
      result.certificate = std::move(*c);
  }
  result.stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

/// Budget to impose: `fraction` of h.x* where x* solves the instance with a
/// non-binding budget h(V).
inline double calibrate_delta(const Instance &inst, double fraction,
                              const SolveOptions &opt = {}) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw InstanceError(InstanceError::Kind::NegativeBudget, -1,
                        "calibration fraction must lie in (0, 1]");
  Instance open = inst;
  open.delta = open.total_weight();
  const SolveResult res = solve(open, opt);
  if (res.status != SolveStatus::Optimal)
    throw std::runtime_error("calibrate_delta: unconstrained solve did not "
                             "reach optimality");
  return fraction * budget_used(open, res.solution.x);
}

} // namespace tvsimplex
