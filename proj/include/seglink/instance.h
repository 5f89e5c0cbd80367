#pragma once

#include "seglink/geom.h"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seglink {

enum class FamilyClass { Disjoint, InteriorDisjoint };

const char* family_class_name(FamilyClass c);  // "disjoint" / "interior-disjoint"

/// An ordered list of closed segments with a declared disjointness class:
/// Disjoint families share no points at all; InteriorDisjoint families may
/// share single endpoints, with at most one horizontal and one vertical
/// segment meeting at any point.
struct SegmentFamily {
  std::vector<Segment> segments;
  FamilyClass declared_class = FamilyClass::Disjoint;
};

/// One endpoint of the family with the segments meeting there (ascending).
struct EndpointRecord {
  Point point;
  std::vector<std::size_t> segments;
};

/// First problem found by validate(); absent index/witness fields do not
/// apply to the violation kind.
struct Violation {
  std::string message;
  std::optional<std::size_t> seg_a;
  std::optional<std::size_t> seg_b;
  std::optional<Point> witness;
};

/// Checks the declared class plus basic sanity (no zero-length or duplicate
/// segments). Returns nullopt when the family is valid.
std::optional<Violation> validate(const SegmentFamily& family);

/// Deduplicated endpoints in lexicographic (x, then y) order; this order is
/// the canonical endpoint numbering used by witnesses and the solver.
std::vector<EndpointRecord> endpoints(const SegmentFamily& family);

/// Which quadrant pair the two segments at a shared endpoint occupy: the
/// horizontal one extends right or left of the meeting point, the vertical
/// one up or down.
enum class Variant { RightUp, LeftUp, RightDown, LeftDown };

const char* variant_name(Variant v);  // "right-up", "left-up", ...
std::optional<Variant> variant_from_name(std::string_view name);

/// Unit signs of the local frame axes: x toward the horizontal partner,
/// y toward the vertical partner.
struct FrameSigns {
  int sx;
  int sy;
};
FrameSigns variant_signs(Variant v);

/// A shared endpoint between one horizontal and one vertical segment.
struct Incidence {
  Point o;
  std::size_t h_index;
  std::size_t v_index;
  Variant variant;
};

/// All shared endpoints of an axis-parallel family, ordered by ascending
/// meeting point (lexicographic). Throws std::invalid_argument on a
/// non-axis-parallel segment or two parallel segments sharing an endpoint.
std::vector<Incidence> find_incidences(const SegmentFamily& family);

/// Error for malformed ".segs" (and other line-oriented) input.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line(line) {}
  int line;
};

/// Parses the line-oriented ".segs" text format:
///
///   segs v1
///   class interior-disjoint
///   # optional comments
///   0 0 2 0
///   1/2 0 1/2 16/3
///
/// Coordinates are integers or fractions "p/q". Throws ParseError on
/// malformed input, an unknown class tag, or a zero-length segment.
SegmentFamily parse_family(const std::string& text);

/// Inverse of parse_family; coordinates print as reduced fractions.
std::string serialize_family(const SegmentFamily& family);

}  // namespace seglink
