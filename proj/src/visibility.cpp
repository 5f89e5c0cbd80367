#include "seglink/visibility.h"

#include <algorithm>
#include <stdexcept>

namespace seglink {

bool points_see(const Point& p, const Point& q, const SegmentFamily& family) {
  if (p == q) throw std::invalid_argument("points_see: identical points");
  const Segment open{p, q};
  for (const Segment& s : family.segments) {
    if (segments_intersect(open, s, IntersectMode::OpenClosed)) return false;
  }
  return true;
}

bool segments_see(std::size_t a, std::size_t b, const SegmentFamily& family) {
  if (a >= family.segments.size() || b >= family.segments.size())
    throw std::out_of_range("segments_see: segment index out of range");
  if (a == b) throw std::invalid_argument("segments_see: identical segments");
  const Segment& sa = family.segments[a];
  const Segment& sb = family.segments[b];
  for (const Point* pa : {&sa.p, &sa.q}) {
    for (const Point* pb : {&sb.p, &sb.q}) {
      // A shared endpoint is a degenerate pair, not a sightline.
      if (*pa == *pb) continue;
      if (points_see(*pa, *pb, family)) return true;
    }
  }
  return false;
}

namespace {

struct FastBox {
  std::int64_t minx, maxx, miny, maxy;
};

bool boxes_meet(const FastBox& a, const FastBox& b) {
  return a.minx <= b.maxx && b.minx <= a.maxx && a.miny <= b.maxy &&
         b.miny <= a.maxy;
}

struct RatBox {
  Rat minx, maxx, miny, maxy;
};

bool boxes_meet(const RatBox& a, const RatBox& b) {
  return a.minx <= b.maxx && b.minx <= a.maxx && a.miny <= b.maxy &&
         b.miny <= a.maxy;
}

}  // namespace

VisibilityGraph visibility_graph(const SegmentFamily& family) {
  VisibilityGraph graph;
  graph.vertices = endpoints(family);
  const auto& segs = family.segments;
  const std::size_t m = graph.vertices.size();
  const std::size_t n = segs.size();

  // Machine-word coordinate mirrors let the bounding-box prefilter run on
  // plain integers; exact predicates still decide every surviving candidate.
  std::vector<std::pair<std::int64_t, std::int64_t>> fast_pts;
  std::vector<FastBox> fast_segs;
  bool fast = true;
  for (const EndpointRecord& rec : graph.vertices) {
    auto x = to_fast_int(rec.point.x);
    auto y = to_fast_int(rec.point.y);
    if (!x || !y) {
      fast = false;
      break;
    }
    fast_pts.emplace_back(*x, *y);
  }
  if (fast) {
    for (const Segment& s : segs) {
      auto x1 = to_fast_int(s.p.x), y1 = to_fast_int(s.p.y);
      auto x2 = to_fast_int(s.q.x), y2 = to_fast_int(s.q.y);
      if (!x1 || !y1 || !x2 || !y2) {
        fast = false;
        fast_segs.clear();
        break;
      }
      fast_segs.push_back(FastBox{std::min(*x1, *x2), std::max(*x1, *x2),
                                  std::min(*y1, *y2), std::max(*y1, *y2)});
    }
  }
  std::vector<RatBox> rat_segs;
  if (!fast) {
    for (const Segment& s : segs) {
      rat_segs.push_back(RatBox{std::min(s.p.x, s.q.x), std::max(s.p.x, s.q.x),
                                std::min(s.p.y, s.q.y), std::max(s.p.y, s.q.y)});
    }
  }

  // Consecutive endpoint pairs tend to be blocked by the same wall, so the
  // previous blocker is retried first.
  std::size_t cached = n;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const Point& p = graph.vertices[i].point;
      const Point& q = graph.vertices[j].point;
      const Segment open{p, q};
      bool blocked = false;
      if (fast) {
        const auto [px, py] = fast_pts[i];
        const auto [qx, qy] = fast_pts[j];
        const FastBox pair_box{std::min(px, qx), std::max(px, qx),
                               std::min(py, qy), std::max(py, qy)};
        if (cached < n && boxes_meet(pair_box, fast_segs[cached]) &&
            segments_intersect(open, segs[cached], IntersectMode::OpenClosed)) {
          blocked = true;
        }
        for (std::size_t k = 0; !blocked && k < n; ++k) {
          if (k == cached || !boxes_meet(pair_box, fast_segs[k])) continue;
          if (segments_intersect(open, segs[k], IntersectMode::OpenClosed)) {
            blocked = true;
            cached = k;
          }
        }
      } else {
        const RatBox pair_box{std::min(p.x, q.x), std::max(p.x, q.x),
                              std::min(p.y, q.y), std::max(p.y, q.y)};
        if (cached < n && boxes_meet(pair_box, rat_segs[cached]) &&
            segments_intersect(open, segs[cached], IntersectMode::OpenClosed)) {
          blocked = true;
        }
        for (std::size_t k = 0; !blocked && k < n; ++k) {
          if (k == cached || !boxes_meet(pair_box, rat_segs[k])) continue;
          if (segments_intersect(open, segs[k], IntersectMode::OpenClosed)) {
            blocked = true;
            cached = k;
          }
        }
      }
      if (!blocked) graph.edges.emplace_back(i, j);
    }
  }
  return graph;
}

}  // namespace seglink
