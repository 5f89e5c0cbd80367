#pragma once

#include "seglink/instance.h"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace seglink {

enum class LinkMode { Circuit, Path };

std::string_view link_mode_name(LinkMode mode);

/// One chain token: an endpoint of a family segment. `end` selects
/// Segment::p (0) or Segment::q (1).
struct EndRef {
  std::size_t seg = 0;
  int end = 0;
  bool operator==(const EndRef&) const = default;
};

/// A candidate simple circuit or chain through every family segment.
/// `order` alternates entry and exit tokens: order[2i] is where the chain
/// enters the i-th traversed segment and order[2i+1] where it leaves.
/// Between an exit and the following entry (wrapping around for circuits)
/// the chain runs along a straight connector; a zero-length connector is a
/// pass-through at a shared endpoint and contributes no edge.
struct Linking {
  LinkMode mode = LinkMode::Circuit;
  std::vector<EndRef> order;
  bool operator==(const Linking&) const = default;
};

Point point_of(const EndRef& token, const SegmentFamily& family);

/// The nonzero-length connectors of `w` in traversal order (the wrap
/// connector of a circuit comes last).
std::vector<std::pair<Point, Point>> added_edges(const Linking& w,
                                                 const SegmentFamily& family);

/// nullopt when `w` realizes a simple circuit/chain over the family;
/// otherwise a description of the first violation found. Never throws.
std::optional<std::string> verify_linking(const Linking& w,
                                          const SegmentFamily& family);

/// Decide whether the family links into a simple circuit (closed) or chain
/// (open). Returns the canonical witness: the lexicographically least token
/// order under the endpoint numbering of endpoints(), with circuits starting
/// at endpoint 0. Callers pass families that validate() accepts.
std::optional<Linking> decide_circuit(const SegmentFamily& family);
std::optional<Linking> decide_path(const SegmentFamily& family);

/// Exhaustive reference decision: enumerates every segment order and end
/// assignment and returns the first one verify_linking accepts. Throws
/// std::invalid_argument when the family exceeds `max_segments`.
std::optional<Linking> oracle_decide(const SegmentFamily& family, LinkMode mode,
                                     std::size_t max_segments = 7);

std::string serialize_linking(const Linking& w);

/// Inverse of serialize_linking. Throws ParseError on malformed text.
Linking parse_linking(const std::string& text);

}  // namespace seglink
