#include "seglink/linker.h"

#include "seglink/geom.h"
#include "seglink/visibility.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace seglink {

namespace {

std::string point_str(const Point& p) {
  return "(" + rat_to_string(p.x) + ", " + rat_to_string(p.y) + ")";
}

/// Canonical endpoint numbering plus the reverse map from (segment, end)
/// to endpoint index.
struct EndpointIndex {
  std::vector<EndpointRecord> eps;
  std::vector<std::array<std::size_t, 2>> of;
};

EndpointIndex make_endpoint_index(const SegmentFamily& family) {
  EndpointIndex idx;
  idx.eps = endpoints(family);
  idx.of.assign(family.segments.size(), {0, 0});
  for (std::size_t i = 0; i < idx.eps.size(); ++i) {
    for (std::size_t s : idx.eps[i].segments) {
      if (family.segments[s].p == idx.eps[i].point) idx.of[s][0] = i;
      if (family.segments[s].q == idx.eps[i].point) idx.of[s][1] = i;
    }
  }
  return idx;
}

/// Straight edges traced by the chain, in order: each segment traversal
/// followed by its outgoing nonzero connector (wrap connector for circuits).
struct TracedEdge {
  Point a, b;
  bool connector = false;
};

std::vector<TracedEdge> traced_edges(const Linking& w, const SegmentFamily& family) {
  std::vector<TracedEdge> edges;
  const std::size_t n = family.segments.size();
  for (std::size_t i = 0; i < n; ++i) {
    edges.push_back({point_of(w.order[2 * i], family),
                     point_of(w.order[2 * i + 1], family), false});
    if (w.mode == LinkMode::Path && i + 1 == n) break;
    const Point exit = point_of(w.order[2 * i + 1], family);
    const Point entry = point_of(w.order[(2 * i + 2) % (2 * n)], family);
    if (!(exit == entry)) edges.push_back({exit, entry, true});
  }
  return edges;
}

}  // namespace

std::string_view link_mode_name(LinkMode mode) {
  return mode == LinkMode::Circuit ? "circuit" : "path";
}

Point point_of(const EndRef& token, const SegmentFamily& family) {
  const Segment& s = family.segments.at(token.seg);
  return token.end == 0 ? s.p : s.q;
}

std::vector<std::pair<Point, Point>> added_edges(const Linking& w,
                                                 const SegmentFamily& family) {
  std::vector<std::pair<Point, Point>> out;
  for (const TracedEdge& e : traced_edges(w, family)) {
    if (e.connector) out.emplace_back(e.a, e.b);
  }
  return out;
}

std::optional<std::string> verify_linking(const Linking& w,
                                          const SegmentFamily& family) {
  const std::size_t n = family.segments.size();
  if (n == 0) return "the family has no segments";
  if (w.order.size() != 2 * n) {
    std::ostringstream msg;
    msg << "order has " << w.order.size() << " tokens, expected " << 2 * n;
    return msg.str();
  }
  for (const EndRef& t : w.order) {
    if (t.seg >= n) {
      std::ostringstream msg;
      msg << "token references segment " << t.seg << " of a " << n
          << "-segment family";
      return msg.str();
    }
    if (t.end != 0 && t.end != 1) {
      std::ostringstream msg;
      msg << "token for segment " << t.seg << " has end flag " << t.end;
      return msg.str();
    }
  }
  std::vector<char> seen(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const EndRef& entry = w.order[2 * i];
    const EndRef& exit = w.order[2 * i + 1];
    if (entry.seg != exit.seg) {
      std::ostringstream msg;
      msg << "tokens " << 2 * i << " and " << 2 * i + 1
          << " reference different segments";
      return msg.str();
    }
    if (entry.end == exit.end) {
      std::ostringstream msg;
      msg << "segment " << entry.seg << " enters and leaves at the same end";
      return msg.str();
    }
    if (seen[entry.seg]) {
      std::ostringstream msg;
      msg << "segment " << entry.seg << " is traversed more than once";
      return msg.str();
    }
    seen[entry.seg] = 1;
  }

  // A point may host at most two tokens, and then only as an exit followed
  // immediately by an entry: the chain passes straight through a shared
  // endpoint. Any other repeat means the curve touches the point twice.
  std::vector<std::pair<Point, std::size_t>> tokens;
  for (std::size_t i = 0; i < w.order.size(); ++i) {
    tokens.emplace_back(point_of(w.order[i], family), i);
  }
  std::sort(tokens.begin(), tokens.end(), [](const auto& a, const auto& b) {
    if (!(a.first == b.first)) return lex_less(a.first, b.first);
    return a.second < b.second;
  });
  for (std::size_t i = 0; i < tokens.size();) {
    std::size_t j = i;
    while (j < tokens.size() && tokens[j].first == tokens[i].first) ++j;
    const std::size_t count = j - i;
    if (count > 2) {
      return "three or more chain tokens meet at " + point_str(tokens[i].first);
    }
    if (count == 2) {
      const std::size_t lo = tokens[i].second;
      const std::size_t hi = tokens[i + 1].second;
      const bool pass_through = (lo % 2 == 1 && hi == lo + 1);
      const bool wrap = w.mode == LinkMode::Circuit && lo == 0 && hi == 2 * n - 1;
      if (!pass_through && !wrap) {
        return "the chain touches " + point_str(tokens[i].first) + " twice";
      }
    }
    i = j;
  }

  // Every nonzero connector must be a sightline of the family.
  const std::vector<TracedEdge> edges = traced_edges(w, family);
  for (const TracedEdge& e : edges) {
    if (e.connector && !points_see(e.a, e.b, family)) {
      return "added edge " + point_str(e.a) + "-" + point_str(e.b) +
             " is not a sightline of the family";
    }
  }

  // Jordan-curve conditions on the traced edge sequence: consecutive edges
  // may meet only at their shared endpoint (straight-through vertices are
  // fine, folding back onto the previous edge is not), and non-adjacent
  // edges must be fully disjoint.
  const std::size_t m = edges.size();
  const bool cyclic = w.mode == LinkMode::Circuit;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const bool adjacent = (j == i + 1) || (cyclic && i == 0 && j == m - 1);
      if (adjacent) {
        const bool forward = j == i + 1;
        const Point& shared = forward ? edges[i].b : edges[j].b;
        const Point& before = forward ? edges[i].a : edges[j].a;
        const Point& after = forward ? edges[j].b : edges[i].b;
        if (orientation(before, shared, after) == 0) {
          const Rat dot = (before.x - shared.x) * (after.x - shared.x) +
                          (before.y - shared.y) * (after.y - shared.y);
          if (dot > 0) {
            return "consecutive edges fold back onto each other at " +
                   point_str(shared);
          }
        }
        if (m == 2 && cyclic) {
          // A two-edge circuit shares both endpoints; check the fold-back
          // condition at the second shared vertex too.
          const Point& shared2 = edges[0].a;
          const Point& before2 = edges[0].b;
          const Point& after2 = edges[1].a;
          if (orientation(before2, shared2, after2) == 0) {
            const Rat dot = (before2.x - shared2.x) * (after2.x - shared2.x) +
                            (before2.y - shared2.y) * (after2.y - shared2.y);
            if (dot > 0) {
              return "consecutive edges fold back onto each other at " +
                     point_str(shared2);
            }
          }
        }
      } else if (segments_intersect(Segment{edges[i].a, edges[i].b},
                                    Segment{edges[j].a, edges[j].b},
                                    IntersectMode::ClosedClosed)) {
        return "edges " + point_str(edges[i].a) + "-" + point_str(edges[i].b) +
               " and " + point_str(edges[j].a) + "-" + point_str(edges[j].b) +
               " intersect";
      }
    }
  }
  return std::nullopt;
}

namespace {

/// Depth-first search for the canonical witness. The chain grows one
/// segment traversal at a time over the precomputed sightline graph;
/// candidates are tried in ascending endpoint order, so the first complete
/// chain found is the lexicographically least one.
class Solver {
 public:
  Solver(const SegmentFamily& family, LinkMode mode)
      : family_(family), mode_(mode), n_(family.segments.size()) {}

  std::optional<Linking> run() {
    if (n_ == 0) return std::nullopt;
    idx_ = make_endpoint_index(family_);
    for (const EndpointRecord& rec : idx_.eps) {
      // Three segments at one point leave no simple curve through all three.
      if (rec.segments.size() > 2) return std::nullopt;
    }
    const VisibilityGraph vg = visibility_graph(family_);
    const std::size_t v = idx_.eps.size();
    adj_.assign(v, {});
    for (const auto& [a, b] : vg.edges) {
      adj_[a].push_back(b);
      adj_[b].push_back(a);
    }
    for (auto& list : adj_) std::sort(list.begin(), list.end());
    tokens_.assign(v, 0);
    used_.assign(n_, 0);
    budget_ = mode_ == LinkMode::Path ? 1 : 0;

    // Machine-integer endpoint coordinates let the candidate-crossing
    // precomputation run on 128-bit cross products instead of rational
    // arithmetic; fractional or oversized coordinates keep the exact path.
    fast_ = true;
    fx_.assign(v, 0);
    fy_.assign(v, 0);
    for (std::size_t e = 0; e < v && fast_; ++e) {
      const auto x = to_fast_int(idx_.eps[e].point.x);
      const auto y = to_fast_int(idx_.eps[e].point.y);
      if (x && y) {
        fx_[e] = *x;
        fy_[e] = *y;
      } else {
        fast_ = false;
      }
    }

    build_candidates();

    if (mode_ == LinkMode::Circuit) {
      start_ = 0;
      const std::vector<std::size_t>& at_start = idx_.eps[0].segments;
      start_junction_ = at_start.size() == 2;
      std::vector<std::size_t> firsts(at_start.begin(), at_start.end());
      std::sort(firsts.begin(), firsts.end(), [&](std::size_t a, std::size_t b) {
        return far_end(a, 0) < far_end(b, 0);
      });
      for (std::size_t s : firsts) {
        if (begin_at(0, s)) break;
      }
    } else {
      for (std::size_t e = 0; e < v; ++e) {
        if (idx_.eps[e].segments.size() != 1) continue;
        start_ = e;
        start_junction_ = false;
        if (begin_at(e, idx_.eps[e].segments[0])) break;
      }
    }
    return result_;
  }

 private:
  /// A candidate connector: an unordered endpoint pair, stored with a < b.
  struct CandEdge {
    std::size_t a, b;
  };

  std::size_t far_end(std::size_t seg, std::size_t near) const {
    return idx_.of[seg][0] == near ? idx_.of[seg][1] : idx_.of[seg][0];
  }

  bool begin_at(std::size_t entry, std::size_t seg) {
    frames_.push_back(undo_.size());
    if (mode_ == LinkMode::Path) {
      // The start of a path is a free chain end: no connector ever lands on
      // it, so its candidate edges are dead for the whole start attempt.
      for (std::uint32_t eid : inc_[entry]) {
        if (live_[eid]) kill(eid);
      }
    }
    traverse(seg, entry);
    const bool found = search(far_end(seg, entry));
    untraverse(seg, entry);
    unwind_frame();
    return found;
  }

  void traverse(std::size_t seg, std::size_t entry) {
    const int flag = idx_.of[seg][0] == entry ? 0 : 1;
    order_.push_back({seg, flag});
    order_.push_back({seg, 1 - flag});
    used_[seg] = 1;
    ++used_count_;
    ++tokens_[entry];
    ++tokens_[far_end(seg, entry)];
  }

  void untraverse(std::size_t seg, std::size_t entry) {
    order_.pop_back();
    order_.pop_back();
    used_[seg] = 0;
    --used_count_;
    --tokens_[entry];
    --tokens_[far_end(seg, entry)];
  }

  static int sign128(__int128 v) { return v > 0 ? 1 : v < 0 ? -1 : 0; }

  int orient_fast(std::size_t a, std::size_t b, std::size_t c) const {
    const __int128 abx = static_cast<__int128>(fx_[b]) - fx_[a];
    const __int128 aby = static_cast<__int128>(fy_[b]) - fy_[a];
    const __int128 acx = static_cast<__int128>(fx_[c]) - fx_[a];
    const __int128 acy = static_cast<__int128>(fy_[c]) - fy_[a];
    return sign128(abx * acy - aby * acx);
  }

  /// p known collinear with u-v: is it inside the closed bounding box?
  bool on_fast(std::size_t u, std::size_t v, std::size_t p) const {
    return std::min(fx_[u], fx_[v]) <= fx_[p] &&
           fx_[p] <= std::max(fx_[u], fx_[v]) &&
           std::min(fy_[u], fy_[v]) <= fy_[p] &&
           fy_[p] <= std::max(fy_[u], fy_[v]);
  }

  /// Closed-closed intersection of endpoint pairs (a,b) and (c,d) on the
  /// cached machine-integer coordinates; same answer as segments_intersect.
  bool fast_closed_intersect(std::size_t a, std::size_t b, std::size_t c,
                             std::size_t d) const {
    const int d1 = orient_fast(c, d, a);
    const int d2 = orient_fast(c, d, b);
    const int d3 = orient_fast(a, b, c);
    const int d4 = orient_fast(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
      return true;
    }
    return (d1 == 0 && on_fast(c, d, a)) || (d2 == 0 && on_fast(c, d, b)) ||
           (d3 == 0 && on_fast(a, b, c)) || (d4 == 0 && on_fast(a, b, d));
  }

  /// Enumerates every endpoint pair that could ever host a connector: two
  /// sightline-visible free ends of distinct segments (junction points pass
  /// the chain straight through, so they never receive one). Each pair gets
  /// a row in a crossing bitmatrix marking the pairs it closed-intersects,
  /// shared endpoints included.
  void build_candidates() {
    const std::size_t v = idx_.eps.size();
    edges_.clear();
    inc_.assign(v, {});
    for (std::size_t a = 0; a < v; ++a) {
      if (idx_.eps[a].segments.size() != 1) continue;
      for (std::size_t b : adj_[a]) {
        if (b <= a) continue;
        if (idx_.eps[b].segments.size() != 1) continue;
        if (idx_.eps[b].segments[0] == idx_.eps[a].segments[0]) continue;
        const auto eid = static_cast<std::uint32_t>(edges_.size());
        edges_.push_back({a, b});
        inc_[a].push_back(eid);
        inc_[b].push_back(eid);
      }
    }
    const std::size_t m = edges_.size();
    words_ = (m + 63) / 64;
    cross_.assign(m * words_, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if (candidates_intersect(edges_[i], edges_[j])) {
          cross_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
          cross_[j * words_ + i / 64] |= std::uint64_t{1} << (i % 64);
        }
      }
    }
    live_.assign(m, 1);
    live_deg_.assign(v, 0);
    for (const CandEdge& e : edges_) {
      ++live_deg_[e.a];
      ++live_deg_[e.b];
    }
    undo_.clear();
    frames_.clear();
  }

  bool candidates_intersect(const CandEdge& x, const CandEdge& y) const {
    if (fast_) return fast_closed_intersect(x.a, x.b, y.a, y.b);
    return segments_intersect(
        Segment{idx_.eps[x.a].point, idx_.eps[x.b].point},
        Segment{idx_.eps[y.a].point, idx_.eps[y.b].point},
        IntersectMode::ClosedClosed);
  }

  void kill(std::uint32_t eid) {
    live_[eid] = 0;
    undo_.push_back(eid);
    --live_deg_[edges_[eid].a];
    --live_deg_[edges_[eid].b];
  }

  /// Commits the connector behind candidate edge eid: the edge itself, every
  /// candidate sharing one of its endpoints, and every candidate its straight
  /// segment intersects all become unusable until the matching unwind.
  void place(std::uint32_t eid) {
    frames_.push_back(undo_.size());
    kill(eid);
    const std::uint64_t* row = cross_.data() + std::size_t{eid} * words_;
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t bits = row[w];
      while (bits != 0) {
        const auto g = static_cast<std::uint32_t>(
            w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
        if (live_[g]) kill(g);
      }
    }
  }

  void unwind_frame() {
    const std::size_t mark = frames_.back();
    frames_.pop_back();
    while (undo_.size() > mark) {
      const std::uint32_t g = undo_.back();
      undo_.pop_back();
      live_[g] = 1;
      ++live_deg_[edges_[g].a];
      ++live_deg_[edges_[g].b];
    }
  }

  std::size_t other_end(std::uint32_t eid, std::size_t e) const {
    const CandEdge& c = edges_[eid];
    return c.a == e ? c.b : c.a;
  }

  bool live_between(std::size_t a, std::size_t b) const {
    for (std::uint32_t eid : inc_[a]) {
      if (other_end(eid, a) == b) return live_[eid] != 0;
    }
    return false;
  }

  void capture() { result_ = Linking{mode_, order_}; }

  /// Feasibility propagation over the open ends: the tip, a circuit's start
  /// (which still owes the wrap connector), and both ends of every unused
  /// segment. Each must eventually host exactly one connector — except one
  /// free chain end on a path — and the live candidate edges are exactly the
  /// pairings still available (they only die as the chain grows). An end
  /// whose last candidate disappears is stranded; an end with a unique
  /// candidate must take it, which removes both ends from play and may
  /// strand or force others, so the elimination cascades to a fixpoint in a
  /// per-node overlay. On a path an end may go unserved only while the free
  /// chain end is unassigned, and two ends fighting over one partner spend
  /// that exemption too. When the cascade commits the tip itself, the tip's
  /// next connector is forced.
  bool prune(std::size_t tip, std::optional<std::size_t>& forced) {
    if (live_deg_[tip] == 0) return false;
    const std::size_t v = idx_.eps.size();
    ov_cnt_.assign(v, 0);
    ov_removed_.assign(v, 0);
    ov_parked_.assign(v, 0);
    ov_dead_.assign(words_, 0);
    wq_.clear();
    pending_.clear();
    std::size_t exemptions = budget_;

    auto note = [&](std::size_t e) {
      if (ov_cnt_[e] <= 1) wq_.push_back(e);
    };
    auto enter = [&](std::size_t e) {
      ov_cnt_[e] = live_deg_[e];
      note(e);
    };
    enter(tip);
    if (mode_ == LinkMode::Circuit && !start_junction_) enter(start_);
    for (std::size_t s = 0; s < n_; ++s) {
      if (used_[s]) continue;
      for (int end = 0; end < 2; ++end) {
        const std::size_t e = idx_.of[s][end];
        if (idx_.eps[e].segments.size() == 1) enter(e);
      }
    }

    auto edge_dead = [&](std::uint32_t eid) {
      return (ov_dead_[eid / 64] >> (eid % 64)) & 1;
    };
    // Marks an end as resolved and withdraws its remaining candidates from
    // the ends that shared them.
    auto retire = [&](std::size_t e) {
      ov_removed_[e] = 1;
      for (std::uint32_t eid : inc_[e]) {
        if (!live_[eid] || edge_dead(eid)) continue;
        ov_dead_[eid / 64] |= std::uint64_t{1} << (eid % 64);
        const std::size_t y = other_end(eid, e);
        if (!ov_removed_[y]) {
          --ov_cnt_[y];
          note(y);
        }
      }
    };
    auto unique_partner = [&](std::size_t e) {
      for (std::uint32_t eid : inc_[e]) {
        if (live_[eid] && !edge_dead(eid)) return other_end(eid, e);
      }
      return e;
    };

    for (;;) {
      while (!wq_.empty()) {
        const std::size_t e = wq_.back();
        wq_.pop_back();
        if (ov_removed_[e]) continue;
        if (ov_cnt_[e] == 0) {
          // Only a path's free chain end may stay unserved, and neither the
          // tip (it must move now) nor the start (it owes the wrap) can be it.
          if (e == tip) return false;
          if (exemptions == 0) return false;
          --exemptions;
          ov_removed_[e] = 1;
          continue;
        }
        if (ov_cnt_[e] != 1) continue;
        if (exemptions > 0) {
          // The unique candidate may still be declined by becoming the free
          // chain end; park the decision until the exemption is spoken for.
          if (!ov_parked_[e]) {
            ov_parked_[e] = 1;
            pending_.push_back(e);
          }
          continue;
        }
        const std::size_t u = unique_partner(e);
        const bool tip_pair = e == tip || u == tip;
        if (tip_pair && (e == start_ || u == start_) &&
            mode_ == LinkMode::Circuit) {
          // The wrap cannot use the current tip while segments remain: the
          // final exit will be a different endpoint.
          return false;
        }
        if (tip_pair) {
          const std::size_t p = e == tip ? u : e;
          if (forced && *forced != p) return false;
          forced = p;
        }
        retire(e);
        retire(u);
      }
      if (exemptions == 0 || pending_.empty()) return true;
      // Unique-candidate ends parked above: two of them demanding the same
      // partner means one must become the free chain end, which settles the
      // exemption and lets the cascade resume.
      claimed_.assign(v, 0);
      std::size_t g1 = v, g2 = v;
      for (std::size_t e : pending_) {
        if (ov_removed_[e] || ov_cnt_[e] != 1) continue;
        const std::size_t u = unique_partner(e);
        if (claimed_[u] == 0) {
          claimed_[u] = 1;
          continue;
        }
        g2 = e;
        g1 = v;
        for (std::size_t f : pending_) {
          if (f == e || ov_removed_[f] || ov_cnt_[f] != 1) continue;
          if (unique_partner(f) == u) {
            g1 = f;
            break;
          }
        }
        break;
      }
      if (g2 == v || g1 == v) return true;
      const std::size_t shared = unique_partner(g2);
      --exemptions;
      retire(g1);
      retire(g2);
      if (!ov_removed_[shared]) retire(shared);
      pending_.clear();
      for (std::size_t s = 0; s < n_; ++s) {
        if (used_[s]) continue;
        for (int end = 0; end < 2; ++end) {
          const std::size_t e = idx_.of[s][end];
          if (idx_.eps[e].segments.size() == 1 && !ov_removed_[e]) note(e);
        }
      }
      if (!ov_removed_[tip]) note(tip);
    }
  }

  /// Every unused segment must still be enterable by a chain growing from
  /// the tip. A breadth-first sweep over the live candidate edges (entering
  /// a segment at one end exits at the other; a junction exit forces the
  /// pass-through) overestimates what the real chain could do, so a segment
  /// the sweep cannot reach is truly stranded.
  bool all_reachable(std::size_t tip) {
    const std::size_t unused = n_ - used_count_;
    if (unused == 0) return true;
    entered_.assign(2 * n_, 0);
    seg_hit_.assign(n_, 0);
    queue_.clear();
    std::size_t hit = 0;
    auto arrive = [&](std::size_t s, int end) {
      const std::size_t node = 2 * s + static_cast<std::size_t>(end);
      if (entered_[node]) return;
      entered_[node] = 1;
      if (!seg_hit_[s]) {
        seg_hit_[s] = 1;
        ++hit;
      }
      queue_.push_back(node);
    };
    auto connect_from = [&](std::size_t e) {
      for (std::uint32_t eid : inc_[e]) {
        if (!live_[eid]) continue;
        const std::size_t g = other_end(eid, e);
        const std::size_t s = idx_.eps[g].segments[0];
        if (used_[s]) continue;
        arrive(s, idx_.of[s][0] == g ? 0 : 1);
      }
    };
    connect_from(tip);
    for (std::size_t i = 0; i < queue_.size() && hit < unused; ++i) {
      const std::size_t s = queue_[i] / 2;
      const std::size_t exit = idx_.of[s][1 - (queue_[i] & 1)];
      const std::vector<std::size_t>& at_exit = idx_.eps[exit].segments;
      if (at_exit.size() == 2) {
        const std::size_t partner = at_exit[0] == s ? at_exit[1] : at_exit[0];
        if (!used_[partner] && tokens_[exit] == 0) {
          arrive(partner, idx_.of[partner][0] == exit ? 0 : 1);
        }
      } else {
        connect_from(exit);
      }
    }
    return hit == unused;
  }

  /// Pops the block edges pushed at stack position mark-1 and later,
  /// recording each distinct endpoint under a fresh block id.
  void close_block(std::size_t mark) {
    const std::uint32_t block = st_blocks_++;
    ++st_epoch_cur_;
    while (st_estack_.size() >= mark) {
      const auto [x, y] = st_estack_.back();
      st_estack_.pop_back();
      for (std::uint32_t z : {x, y}) {
        if (st_epoch_[z] != st_epoch_cur_) {
          st_epoch_[z] = st_epoch_cur_;
          st_members_.push_back({block, z});
        }
      }
    }
  }

  /// Depth-first block sweep for structure_ok: fills st_low_ and closes a
  /// block whenever a vertex separates a child subtree. Recursion depth is
  /// bounded by the segment count.
  int block_dfs(std::uint32_t u, std::uint32_t parent_eid) {
    st_disc_[u] = st_low_[u] = st_timer_++;
    for (const auto& [w, eid] : st_adj_[u]) {
      if (eid == parent_eid) continue;
      if (st_disc_[w] != 0) {
        if (st_disc_[w] < st_disc_[u]) {
          st_estack_.push_back({u, w});
          st_low_[u] = std::min(st_low_[u], st_disc_[w]);
        }
        continue;
      }
      st_estack_.push_back({u, w});
      const std::size_t mark = st_estack_.size();
      const int wl = block_dfs(w, eid);
      st_low_[u] = std::min(st_low_[u], wl);
      if (wl >= st_disc_[u]) close_block(mark);
    }
    return st_low_[u];
  }

  /// Projects the live candidate edges onto segments: one vertex per unused
  /// segment plus a terminal vertex (index 0) for the tip, merged with a
  /// circuit's start since the wrap re-enters there. The remaining chain is
  /// a Hamiltonian path on this graph: back to the terminal for a circuit,
  /// ending anywhere for a path. A Hamiltonian cycle needs the graph
  /// biconnected (no articulation vertex); a Hamiltonian path starting at
  /// the terminal needs the terminal off every cut, a path-shaped block
  /// tree (at most two leaf blocks), and the terminal inside a leaf block
  /// when two exist. All are necessary conditions, so a violation kills the
  /// branch soundly.
  bool structure_ok() {
    const std::size_t unused = n_ - used_count_;
    if (unused < 2) return true;
    // Map unused segments to compact vertex ids 1..unused; 0 is terminal.
    st_vert_of_.assign(n_, 0);
    {
      std::uint32_t next = 1;
      for (std::size_t s = 0; s < n_; ++s) {
        if (!used_[s]) st_vert_of_[s] = next++;
      }
    }
    const std::size_t nv = unused + 1;
    if (st_adj_.size() < nv) st_adj_.resize(nv);
    for (std::size_t i = 0; i < nv; ++i) st_adj_[i].clear();
    const auto m = static_cast<std::uint32_t>(edges_.size());
    std::uint32_t eids = 0;
    for (std::uint32_t eid = 0; eid < m; ++eid) {
      if (!live_[eid]) continue;
      // Edges at consumed endpoints are dead, so a used segment here is the
      // tip's or the start's; both project to the terminal vertex 0.
      const std::size_t sa = idx_.eps[edges_[eid].a].segments[0];
      const std::size_t sb = idx_.eps[edges_[eid].b].segments[0];
      const std::uint32_t va = used_[sa] ? 0 : st_vert_of_[sa];
      const std::uint32_t vb = used_[sb] ? 0 : st_vert_of_[sb];
      if (va == vb) continue;
      st_adj_[va].push_back({vb, eids});
      st_adj_[vb].push_back({va, eids});
      ++eids;
    }

    st_disc_.assign(nv, 0);
    st_low_.assign(nv, 0);
    st_epoch_.assign(nv, 0);
    st_epoch_cur_ = 0;
    st_estack_.clear();
    st_members_.clear();
    st_timer_ = 1;
    st_blocks_ = 0;
    st_disc_[0] = st_low_[0] = st_timer_++;
    for (const auto& [w, eid] : st_adj_[0]) {
      if (st_disc_[w] != 0) continue;
      st_estack_.push_back({0, w});
      const std::size_t mark = st_estack_.size();
      block_dfs(w, eid);
      // Everything this root child left on the edge stack is one block
      // hanging off the terminal.
      close_block(mark);
    }
    // all_reachable runs first over the same live edges, so every unused
    // segment was swept into some block.

    // A vertex is a cut exactly when it lies in two or more blocks.
    if (st_cut_count_.size() < nv) st_cut_count_.resize(nv);
    for (std::size_t i = 0; i < nv; ++i) st_cut_count_[i] = 0;
    for (const auto& [b, z] : st_members_) {
      (void)b;
      ++st_cut_count_[z];
    }
    const bool terminal_cut = st_cut_count_[0] >= 2;
    if (mode_ == LinkMode::Circuit) {
      if (terminal_cut) return false;
      for (std::size_t i = 1; i < nv; ++i) {
        if (st_cut_count_[i] >= 2) return false;
      }
      return true;
    }
    if (terminal_cut) return false;
    if (st_blocks_ <= 1) return true;
    // Count leaf blocks (blocks containing at most one cut vertex) and find
    // the terminal's block.
    if (st_block_cuts_.size() < st_blocks_) st_block_cuts_.resize(st_blocks_);
    for (std::size_t b = 0; b < st_blocks_; ++b) st_block_cuts_[b] = 0;
    std::uint32_t terminal_block = ~0u;
    for (const auto& [b, z] : st_members_) {
      if (z == 0) terminal_block = b;
      if (st_cut_count_[z] >= 2) ++st_block_cuts_[b];
    }
    std::size_t leaves = 0;
    for (std::size_t b = 0; b < st_blocks_; ++b) {
      if (st_block_cuts_[b] <= 1) ++leaves;
    }
    if (leaves > 2) return false;
    return terminal_block != ~0u && st_block_cuts_[terminal_block] <= 1;
  }

  bool search(std::size_t tip) {
    const std::vector<std::size_t>& at_tip = idx_.eps[tip].segments;
    if (at_tip.size() == 2) {
      const std::size_t exited = order_.back().seg;
      const std::size_t partner = at_tip[0] == exited ? at_tip[1] : at_tip[0];
      if (!used_[partner]) {
        // Passing straight through the shared endpoint is the only legal
        // continuation: any detour would touch this point a second time.
        traverse(partner, tip);
        const bool found = search(far_end(partner, tip));
        untraverse(partner, tip);
        return found;
      }
      if (mode_ == LinkMode::Circuit && used_count_ == n_ && tip == start_) {
        capture();
        return true;
      }
      return false;
    }

    if (used_count_ == n_) {
      if (mode_ == LinkMode::Path) {
        capture();
        return true;
      }
      // Close the circuit with the wrap connector back to the start. A
      // junction start closes only by arriving at the junction itself, which
      // the branch above handles.
      if (start_junction_) return false;
      if (!live_between(tip, start_)) return false;
      capture();
      return true;
    }

    std::optional<std::size_t> forced;
    if (!prune(tip, forced)) return false;
    if (!all_reachable(tip)) return false;
    if (!structure_ok()) return false;

    for (std::uint32_t eid : inc_[tip]) {
      if (!live_[eid]) continue;
      const std::size_t f = other_end(eid, tip);
      if (forced && *forced != f) continue;
      const std::size_t s = idx_.eps[f].segments[0];
      if (used_[s]) continue;
      place(eid);
      traverse(s, f);
      const bool found = search(far_end(s, f));
      untraverse(s, f);
      unwind_frame();
      if (found) return true;
    }
    return false;
  }

  const SegmentFamily& family_;
  LinkMode mode_;
  std::size_t n_;
  EndpointIndex idx_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<int> tokens_;
  std::vector<char> used_;
  std::size_t used_count_ = 0;
  std::vector<EndRef> order_;
  std::size_t start_ = 0;
  bool start_junction_ = false;
  std::size_t budget_ = 0;
  std::optional<Linking> result_;
  // Machine-integer coordinate cache; fast_ is false when any coordinate
  // falls outside the to_fast_int range.
  bool fast_ = false;
  std::vector<std::int64_t> fx_;
  std::vector<std::int64_t> fy_;
  // Candidate-edge universe with a precomputed crossing bitmatrix; live_
  // and live_deg_ track which candidates the committed connectors allow,
  // undo_/frames_ roll the state back on backtrack.
  std::vector<CandEdge> edges_;
  std::vector<std::vector<std::uint32_t>> inc_;
  std::vector<std::uint64_t> cross_;
  std::size_t words_ = 0;
  std::vector<unsigned char> live_;
  std::vector<std::uint32_t> live_deg_;
  std::vector<std::uint32_t> undo_;
  std::vector<std::size_t> frames_;
  // Scratch buffers reused across search nodes; ov_* hold the propagation
  // overlay of a single prune call.
  std::vector<unsigned char> entered_;
  std::vector<unsigned char> seg_hit_;
  std::vector<std::size_t> queue_;
  std::vector<unsigned char> claimed_;
  std::vector<std::uint32_t> ov_cnt_;
  std::vector<unsigned char> ov_removed_;
  std::vector<unsigned char> ov_parked_;
  std::vector<std::uint64_t> ov_dead_;
  std::vector<std::size_t> wq_;
  std::vector<std::size_t> pending_;
  // Scratch state of the structure_ok block sweep.
  std::vector<std::uint32_t> st_vert_of_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> st_adj_;
  std::vector<int> st_disc_;
  std::vector<int> st_low_;
  std::vector<std::uint32_t> st_epoch_;
  std::uint32_t st_epoch_cur_ = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> st_estack_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> st_members_;
  int st_timer_ = 1;
  std::uint32_t st_blocks_ = 0;
  std::vector<std::uint32_t> st_cut_count_;
  std::vector<std::uint32_t> st_block_cuts_;
};

std::optional<Linking> decide(const SegmentFamily& family, LinkMode mode) {
  std::optional<Linking> witness = Solver(family, mode).run();
  if (witness) {
    if (auto violation = verify_linking(*witness, family)) {
      throw std::logic_error("solver produced an invalid witness: " + *violation);
    }
  }
  return witness;
}

}  // namespace

std::optional<Linking> decide_circuit(const SegmentFamily& family) {
  return decide(family, LinkMode::Circuit);
}

std::optional<Linking> decide_path(const SegmentFamily& family) {
  return decide(family, LinkMode::Path);
}

std::optional<Linking> oracle_decide(const SegmentFamily& family, LinkMode mode,
                                     std::size_t max_segments) {
  const std::size_t n = family.segments.size();
  if (n > max_segments) {
    std::ostringstream msg;
    msg << "oracle_decide: family has " << n << " segments, cap is "
        << max_segments;
    throw std::invalid_argument(msg.str());
  }
  if (n == 0) return std::nullopt;

  const EndpointIndex idx = make_endpoint_index(family);
  const VisibilityGraph vg = visibility_graph(family);
  const std::size_t v = idx.eps.size();
  std::vector<char> sees(v * v, 0);
  for (const auto& [a, b] : vg.edges) sees[a * v + b] = sees[b * v + a] = 1;

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Linking w;
  w.mode = mode;
  w.order.resize(2 * n);
  do {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      // Cheap necessary condition first: every nonzero connector must be a
      // sightline. Only survivors pay for a full verify_linking run.
      bool plausible = true;
      for (std::size_t i = 0; plausible && i < n; ++i) {
        if (mode == LinkMode::Path && i + 1 == n) break;
        const std::size_t si = perm[i];
        const std::size_t sj = perm[(i + 1) % n];
        const int entry_i = static_cast<int>((mask >> i) & 1);
        const int entry_j = static_cast<int>((mask >> ((i + 1) % n)) & 1);
        const std::size_t exit_ep = idx.of[si][1 - entry_i];
        const std::size_t entry_ep = idx.of[sj][entry_j];
        if (exit_ep == entry_ep) continue;
        plausible = sees[exit_ep * v + entry_ep] != 0;
      }
      if (!plausible) continue;
      for (std::size_t i = 0; i < n; ++i) {
        const int entry = static_cast<int>((mask >> i) & 1);
        w.order[2 * i] = {perm[i], entry};
        w.order[2 * i + 1] = {perm[i], 1 - entry};
      }
      if (!verify_linking(w, family)) return w;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

std::string serialize_linking(const Linking& w) {
  std::ostringstream out;
  out << link_mode_name(w.mode) << '\n';
  for (const EndRef& t : w.order) {
    out << '(' << t.seg << ',' << t.end << ")\n";
  }
  return out.str();
}

namespace {

std::optional<EndRef> parse_token(std::string_view text) {
  if (text.size() < 5 || text.front() != '(' || text.back() != ')') {
    return std::nullopt;
  }
  const std::size_t comma = text.find(',');
  if (comma == std::string_view::npos) return std::nullopt;
  const std::string_view seg_part = text.substr(1, comma - 1);
  const std::string_view end_part = text.substr(comma + 1, text.size() - comma - 2);
  if (seg_part.empty() || end_part.size() != 1) return std::nullopt;
  std::size_t seg = 0;
  for (char c : seg_part) {
    if (c < '0' || c > '9') return std::nullopt;
    seg = seg * 10 + static_cast<std::size_t>(c - '0');
  }
  if (end_part[0] != '0' && end_part[0] != '1') return std::nullopt;
  return EndRef{seg, end_part[0] - '0'};
}

}  // namespace

Linking parse_linking(const std::string& text) {
  Linking w;
  bool have_mode = false;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string field;
    while (fields >> field) {
      if (!have_mode) {
        if (field == "circuit") {
          w.mode = LinkMode::Circuit;
        } else if (field == "path") {
          w.mode = LinkMode::Path;
        } else {
          throw ParseError("expected \"circuit\" or \"path\", got \"" + field + '"',
                           static_cast<int>(line_no));
        }
        have_mode = true;
        continue;
      }
      const std::optional<EndRef> token = parse_token(field);
      if (!token) {
        throw ParseError("malformed token \"" + field + "\", expected \"(segment,end)\"",
                         static_cast<int>(line_no));
      }
      w.order.push_back(*token);
    }
  }
  if (!have_mode) {
    throw ParseError("missing circuit/path header", static_cast<int>(line_no));
  }
  return w;
}

}  // namespace seglink
