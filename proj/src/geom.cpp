#include "seglink/geom.h"

#include <stdexcept>
#include <utility>

namespace seglink {

namespace {

// r is known collinear with p and q; true iff r lies in the closed span.
bool within_closed(const Point& r, const Point& p, const Point& q) {
  if (p.x != q.x) {
    return (p.x <= r.x && r.x <= q.x) || (q.x <= r.x && r.x <= p.x);
  }
  return (p.y <= r.y && r.y <= q.y) || (q.y <= r.y && r.y <= p.y);
}

}  // namespace

bool lex_less(const Point& a, const Point& b) {
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

int orientation(const Point& a, const Point& b, const Point& c) {
#ifdef __SIZEOF_INT128__
  // Common case: small integer coordinates run on machine words.
  auto ax = to_fast_int(a.x), ay = to_fast_int(a.y);
  auto bx = to_fast_int(b.x), by = to_fast_int(b.y);
  auto cx = to_fast_int(c.x), cy = to_fast_int(c.y);
  if (ax && ay && bx && by && cx && cy) {
    using Wide = __int128;
    Wide cross = (Wide(*bx) - *ax) * (Wide(*cy) - *ay) -
                 (Wide(*by) - *ay) * (Wide(*cx) - *ax);
    return cross > 0 ? 1 : cross < 0 ? -1 : 0;
  }
#endif
  Rat cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return cross.sign();
}

bool strictly_between(const Point& r, const Point& p, const Point& q) {
  if (p.x != q.x) {
    return (p.x < r.x && r.x < q.x) || (q.x < r.x && r.x < p.x);
  }
  return (p.y < r.y && r.y < q.y) || (q.y < r.y && r.y < p.y);
}

bool segments_intersect(const Segment& s1, const Segment& s2, IntersectMode mode) {
  const Point& p = s1.p;
  const Point& q = s1.q;
  const Point& r = s2.p;
  const Point& s = s2.q;

  const int dr = orientation(p, q, r);
  const int ds = orientation(p, q, s);
  const int dp = orientation(r, s, p);
  const int dq = orientation(r, s, q);

  // A proper crossing meets both interiors, so it counts in either mode.
  if (((dr > 0 && ds < 0) || (dr < 0 && ds > 0)) &&
      ((dp > 0 && dq < 0) || (dp < 0 && dq > 0)))
    return true;

  if (mode == IntersectMode::ClosedClosed) {
    if (dr == 0 && within_closed(r, p, q)) return true;
    if (ds == 0 && within_closed(s, p, q)) return true;
    if (dp == 0 && within_closed(p, r, s)) return true;
    if (dq == 0 && within_closed(q, r, s)) return true;
    return false;
  }

  // Open-closed: points of s2 count only if they fall inside the open s1.
  if (dr == 0 && ds == 0) {
    // All four points on one line; compare the 1-D spans along the
    // dominant axis of s1.
    const bool use_x = (p.x != q.x);
    Rat a = use_x ? p.x : p.y;
    Rat b = use_x ? q.x : q.y;
    if (b < a) std::swap(a, b);
    Rat c = use_x ? r.x : r.y;
    Rat d = use_x ? s.x : s.y;
    if (d < c) std::swap(c, d);
    // Open interval (a, b) meets closed [c, d]?
    return (c > a) ? (c < b) : (d > a);
  }
  if (dr == 0 && strictly_between(r, p, q)) return true;
  if (ds == 0 && strictly_between(s, p, q)) return true;
  return false;
}

bool angle_less(const Point& u, const Point& a, const Point& b,
                const Point& v, const Point& c, const Point& d) {
  if (a == u || b == u || c == v || d == v)
    throw std::invalid_argument("angle_less: zero-length ray");

  const Rat ax = a.x - u.x, ay = a.y - u.y;
  const Rat bx = b.x - u.x, by = b.y - u.y;
  const Rat cx = c.x - v.x, cy = c.y - v.y;
  const Rat dx = d.x - v.x, dy = d.y - v.y;

  const Rat dot1 = ax * bx + ay * by;
  const Rat dot2 = cx * dx + cy * dy;
  const int s1 = dot1.sign();
  const int s2 = dot2.sign();

  // Angles in [0, pi] compare opposite to their cosines.
  if (s1 >= 0 && s2 < 0) return true;
  if (s1 < 0 && s2 >= 0) return false;

  // Same side of pi/2: compare squared cosines scaled by the squared ray
  // lengths; the comparison direction flips for obtuse angles.
  const Rat m1 = (ax * ax + ay * ay) * (bx * bx + by * by);
  const Rat m2 = (cx * cx + cy * cy) * (dx * dx + dy * dy);
  const Rat lhs = dot1 * dot1 * m2;
  const Rat rhs = dot2 * dot2 * m1;
  return (s1 >= 0) ? lhs > rhs : lhs < rhs;
}

Box bounding_box(const std::vector<Point>& points) {
  if (points.empty())
    throw std::invalid_argument("bounding_box: empty point list");
  Box box{points.front(), points.front()};
  for (const Point& p : points) {
    if (p.x < box.min.x) box.min.x = p.x;
    if (p.y < box.min.y) box.min.y = p.y;
    if (p.x > box.max.x) box.max.x = p.x;
    if (p.y > box.max.y) box.max.y = p.y;
  }
  return box;
}

}  // namespace seglink
