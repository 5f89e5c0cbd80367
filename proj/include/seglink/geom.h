#pragma once

#include "seglink/number.h"

#include <vector>

namespace seglink {

struct Point {
  Rat x;
  Rat y;
  bool operator==(const Point&) const = default;
};

/// Strict lexicographic order by x, then y; the order behind endpoint
/// numbering everywhere else.
bool lex_less(const Point& a, const Point& b);

/// A closed segment with distinct endpoints, stored as an unordered pair.
struct Segment {
  Point p;
  Point q;
  bool operator==(const Segment&) const = default;
};

/// Sign of the cross product (b-a) x (c-a): +1 for a counterclockwise turn,
/// -1 for clockwise, 0 iff the three points are collinear.
int orientation(const Point& a, const Point& b, const Point& c);

/// True iff r lies strictly inside the open segment (p, q).
/// Precondition: p, q, r collinear and p != q.
bool strictly_between(const Point& r, const Point& p, const Point& q);

enum class IntersectMode { ClosedClosed, OpenClosed };

/// Whether s1 and s2 share at least one point. In OpenClosed mode s1 is
/// treated as open (its endpoints removed) while s2 stays closed. Collinear
/// overlap, endpoint touching, and proper crossings are all handled exactly.
bool segments_intersect(const Segment& s1, const Segment& s2, IntersectMode mode);

/// True iff the angle at u between rays ua, ub is strictly smaller than the
/// angle at v between rays vc, vd; both angles are unordered ray pairs in
/// [0, pi]. Throws std::invalid_argument on a zero-length ray.
bool angle_less(const Point& u, const Point& a, const Point& b,
                const Point& v, const Point& c, const Point& d);

struct Box {
  Point min;
  Point max;

  bool operator==(const Box&) const = default;
};

/// Componentwise min/max. Throws std::invalid_argument on an empty list.
Box bounding_box(const std::vector<Point>& points);

}  // namespace seglink
