#include "seglink/instance.h"

#include <algorithm>
#include <sstream>
#include <utility>

namespace seglink {

namespace {

bool is_horizontal(const Segment& s) { return s.p.y == s.q.y; }
bool is_vertical(const Segment& s) { return s.p.x == s.q.x; }

// Unordered endpoint pair in lexicographic order, for duplicate detection.
std::pair<Point, Point> normalized_ends(const Segment& s) {
  return lex_less(s.p, s.q) ? std::make_pair(s.p, s.q) : std::make_pair(s.q, s.p);
}

bool on_closed(const Point& r, const Segment& s) {
  return orientation(s.p, s.q, r) == 0 &&
         (r == s.p || r == s.q || strictly_between(r, s.p, s.q));
}

// Some point shared by two intersecting segments, for violation reports.
Point intersection_witness(const Segment& a, const Segment& b) {
  for (const Point* e : {&a.p, &a.q})
    if (on_closed(*e, b)) return *e;
  for (const Point* e : {&b.p, &b.q})
    if (on_closed(*e, a)) return *e;
  // Proper crossing: solve the two line equations.
  const Rat dax = a.q.x - a.p.x, day = a.q.y - a.p.y;
  const Rat dbx = b.q.x - b.p.x, dby = b.q.y - b.p.y;
  const Rat denom = dax * dby - day * dbx;
  const Rat t = ((b.p.x - a.p.x) * dby - (b.p.y - a.p.y) * dbx) / denom;
  return Point{a.p.x + t * dax, a.p.y + t * day};
}

// How two segments sharing exactly the endpoint c may continue: if the other
// two endpoints leave c along the same ray the closed segments overlap.
bool overlap_beyond_shared(const Point& c, const Point& u, const Point& v) {
  if (orientation(c, u, v) != 0) return false;
  const Rat dot = (u.x - c.x) * (v.x - c.x) + (u.y - c.y) * (v.y - c.y);
  return dot > 0;
}

std::optional<Violation> check_pair(const SegmentFamily& family, std::size_t i,
                                    std::size_t j) {
  const Segment& a = family.segments[i];
  const Segment& b = family.segments[j];

  if (!segments_intersect(a, b, IntersectMode::ClosedClosed)) return std::nullopt;

  if (family.declared_class == FamilyClass::Disjoint) {
    return Violation{"segments intersect in a family declared disjoint", i, j,
                     intersection_witness(a, b)};
  }

  // Interior-disjoint: the only permitted contact is one shared endpoint.
  const Point* shared = nullptr;
  const Point* other_a = nullptr;
  const Point* other_b = nullptr;
  int shared_count = 0;
  for (const Point* ea : {&a.p, &a.q}) {
    for (const Point* eb : {&b.p, &b.q}) {
      if (*ea == *eb) {
        ++shared_count;
        shared = ea;
        other_a = (ea == &a.p) ? &a.q : &a.p;
        other_b = (eb == &b.p) ? &b.q : &b.p;
      }
    }
  }
  if (shared_count != 1) {
    return Violation{"segments intersect away from a common endpoint", i, j,
                     intersection_witness(a, b)};
  }
  if (overlap_beyond_shared(*shared, *other_a, *other_b)) {
    return Violation{"segments overlap beyond their common endpoint", i, j, *shared};
  }
  // Not collinear past c means the single shared endpoint is the whole
  // intersection, except when another endpoint also touches: two straight
  // segments meet in at most one point unless collinear, so check the
  // remaining endpoints explicitly only in the collinear case, which
  // overlap_beyond_shared already covered.
  return std::nullopt;
}

}  // namespace

const char* family_class_name(FamilyClass c) {
  return c == FamilyClass::Disjoint ? "disjoint" : "interior-disjoint";
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::RightUp: return "right-up";
    case Variant::LeftUp: return "left-up";
    case Variant::RightDown: return "right-down";
    case Variant::LeftDown: return "left-down";
  }
  return "?";
}

std::optional<Variant> variant_from_name(std::string_view name) {
  if (name == "right-up") return Variant::RightUp;
  if (name == "left-up") return Variant::LeftUp;
  if (name == "right-down") return Variant::RightDown;
  if (name == "left-down") return Variant::LeftDown;
  return std::nullopt;
}

FrameSigns variant_signs(Variant v) {
  switch (v) {
    case Variant::RightUp: return {1, 1};
    case Variant::LeftUp: return {-1, 1};
    case Variant::RightDown: return {1, -1};
    case Variant::LeftDown: return {-1, -1};
  }
  return {1, 1};
}

std::optional<Violation> validate(const SegmentFamily& family) {
  const auto& segs = family.segments;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].p == segs[i].q)
      return Violation{"zero-length segment", i, std::nullopt, segs[i].p};
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      if (normalized_ends(segs[i]) == normalized_ends(segs[j]))
        return Violation{"duplicate segment", i, j, segs[i].p};
      if (auto v = check_pair(family, i, j)) return v;
    }
  }
  if (family.declared_class == FamilyClass::InteriorDisjoint) {
    for (const EndpointRecord& rec : endpoints(family)) {
      int horizontal = 0, vertical = 0;
      for (std::size_t s : rec.segments) {
        if (is_horizontal(segs[s])) ++horizontal;
        if (is_vertical(segs[s])) ++vertical;
      }
      if (horizontal > 1)
        return Violation{"two horizontal segments share an endpoint",
                         rec.segments[0], rec.segments[1], rec.point};
      if (vertical > 1)
        return Violation{"two vertical segments share an endpoint",
                         rec.segments[0], rec.segments[1], rec.point};
    }
  }
  return std::nullopt;
}

std::vector<EndpointRecord> endpoints(const SegmentFamily& family) {
  std::vector<std::pair<Point, std::size_t>> raw;
  raw.reserve(family.segments.size() * 2);
  for (std::size_t i = 0; i < family.segments.size(); ++i) {
    raw.emplace_back(family.segments[i].p, i);
    raw.emplace_back(family.segments[i].q, i);
  }
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    if (a.first == b.first) return a.second < b.second;
    return lex_less(a.first, b.first);
  });
  std::vector<EndpointRecord> out;
  for (auto& [point, index] : raw) {
    if (out.empty() || !(out.back().point == point)) {
      out.push_back(EndpointRecord{point, {}});
    }
    out.back().segments.push_back(index);
  }
  return out;
}

std::vector<Incidence> find_incidences(const SegmentFamily& family) {
  for (std::size_t i = 0; i < family.segments.size(); ++i) {
    const Segment& s = family.segments[i];
    if (!is_horizontal(s) && !is_vertical(s))
      throw std::invalid_argument("segment " + std::to_string(i) +
                                  " is not axis-parallel");
  }
  std::vector<Incidence> out;
  for (const EndpointRecord& rec : endpoints(family)) {
    if (rec.segments.size() < 2) continue;
    std::optional<std::size_t> h, v;
    for (std::size_t s : rec.segments) {
      if (is_horizontal(family.segments[s])) {
        if (h) throw std::invalid_argument("two horizontal segments share an endpoint");
        h = s;
      } else {
        if (v) throw std::invalid_argument("two vertical segments share an endpoint");
        v = s;
      }
    }
    if (!h || !v)
      throw std::invalid_argument("parallel segments share an endpoint");
    const Segment& hs = family.segments[*h];
    const Segment& vs = family.segments[*v];
    const Point& ha = (hs.p == rec.point) ? hs.q : hs.p;
    const Point& vb = (vs.p == rec.point) ? vs.q : vs.p;
    const bool right = ha.x > rec.point.x;
    const bool up = vb.y > rec.point.y;
    Variant variant = right ? (up ? Variant::RightUp : Variant::RightDown)
                            : (up ? Variant::LeftUp : Variant::LeftDown);
    out.push_back(Incidence{rec.point, *h, *v, variant});
  }
  return out;
}

SegmentFamily parse_family(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int stage = 0;  // 0: expect header, 1: expect class, 2: segments
  SegmentFamily family;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<std::string> words;
    for (std::string w; tokens >> w;) words.push_back(std::move(w));
    if (words.empty()) continue;
    if (stage == 0) {
      if (words.size() != 2 || words[0] != "segs" || words[1] != "v1")
        throw ParseError("expected header \"segs v1\"", line_no);
      stage = 1;
      continue;
    }
    if (stage == 1) {
      if (words.size() != 2 || words[0] != "class")
        throw ParseError("expected \"class disjoint|interior-disjoint\"", line_no);
      if (words[1] == "disjoint") {
        family.declared_class = FamilyClass::Disjoint;
      } else if (words[1] == "interior-disjoint") {
        family.declared_class = FamilyClass::InteriorDisjoint;
      } else {
        throw ParseError("unknown class tag \"" + words[1] + "\"", line_no);
      }
      stage = 2;
      continue;
    }
    if (words.size() != 4)
      throw ParseError("expected four coordinates", line_no);
    Rat coords[4];
    for (int i = 0; i < 4; ++i) {
      auto r = rat_from_string(words[i]);
      if (!r) throw ParseError("bad coordinate \"" + words[i] + "\"", line_no);
      coords[i] = *r;
    }
    Segment s{Point{coords[0], coords[1]}, Point{coords[2], coords[3]}};
    if (s.p == s.q) throw ParseError("zero-length segment", line_no);
    family.segments.push_back(std::move(s));
  }
  if (stage == 0) throw ParseError("missing header \"segs v1\"");
  if (stage == 1) throw ParseError("missing class line");
  return family;
}

std::string serialize_family(const SegmentFamily& family) {
  std::string out = "segs v1\nclass ";
  out += family_class_name(family.declared_class);
  out += '\n';
  for (const Segment& s : family.segments) {
    out += rat_to_string(s.p.x);
    out += ' ';
    out += rat_to_string(s.p.y);
    out += ' ';
    out += rat_to_string(s.q.x);
    out += ' ';
    out += rat_to_string(s.q.y);
    out += '\n';
  }
  return out;
}

}  // namespace seglink
