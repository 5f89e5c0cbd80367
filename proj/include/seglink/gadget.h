#pragma once

#include "seglink/geom.h"
#include "seglink/instance.h"
#include "seglink/linker.h"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace seglink {

/// Positions of the added segments inside GadgetGeometry::added (and inside
/// GadgetRecord::added). The first five exist in every gadget; the rest only
/// when the gadget is extended.
enum AddedPosition : std::size_t {
  kPosA1 = 0,  // displaced blocker A'1
  kPosB1 = 1,
  kPosConnector = 2,  // diagonal sightline shield a'b'
  kPosB2 = 3,
  kPosA2 = 4,
  kPosA3 = 5,
  kPosA4 = 6,
  kPosA5 = 7,
  kPosA6 = 8,
  kPosB3 = 9,
  kPosB4 = 10,
  kPosB5 = 11,
  kPosB6 = 12,
  kPosFarConnector = 13,  // outer diagonal shield a''b''
};

inline constexpr std::size_t kGadgetAdded = 5;
inline constexpr std::size_t kExtendedGadgetAdded = 14;

/// A gadget instantiated at an anchor point: the added segments in template
/// order plus the two relocated endpoints for the carried segments (the
/// horizontal host ends at o_prime, the vertical host at o_dprime).
struct GadgetGeometry {
  std::vector<Segment> added;
  Point o_prime;
  Point o_dprime;
};

/// Builds the blocker gadget for one incidence variant at `anchor`, with the
/// A'1 tip displaced by `delta` (in frame units). Segments are returned with
/// their lexicographically smaller endpoint first. Throws std::invalid_argument
/// unless delta > 0.
GadgetGeometry build_gadget(Variant variant, const Point& anchor,
                            const Rat& delta, bool extended);

/// Largest admissible unit-fraction displacement for a family: the biggest
/// 1/K with 1/K <= 8 / (5 (W + H)), where W and H are the dimensions of the
/// family's bounding box. Throws std::invalid_argument on an empty family.
Rat choose_delta(const SegmentFamily& family);

struct TransformParams {
  int initial_scale = 40;
  Rat delta;
  Int final_scale = 1;
  Box bound{};  // bounding box of the output family

  bool operator==(const TransformParams&) const = default;
};

/// Where one input incidence's gadget went: all indices refer to the output
/// family, the anchor is in output coordinates, and carried_h / carried_v
/// are the hosts whose endpoints were relocated to o' and o''.
struct GadgetRecord {
  Point anchor;
  Variant variant = Variant::RightUp;
  bool extended = false;
  std::size_t carried_h = 0;
  std::size_t carried_v = 0;
  std::vector<std::size_t> added;

  bool operator==(const GadgetRecord&) const = default;
};

/// Full account of one transform run: carry_map[i] is the output index of
/// input segment i, and gadgets lists one record per incidence in ascending
/// anchor order.
struct TransformReport {
  LinkMode mode = LinkMode::Circuit;
  std::size_t input_segments = 0;
  TransformParams params;
  std::vector<std::size_t> carry_map;
  std::vector<GadgetRecord> gadgets;

  bool operator==(const TransformReport&) const = default;
};

struct TransformOptions {
  /// Replaces the automatically chosen displacement. A unit fraction 1/K
  /// keeps the final rescale to the integer grid; any other value skips the
  /// rescale and leaves rational coordinates (test instrumentation).
  std::optional<Rat> delta_override;
};

/// Compiles an interior-disjoint axis-parallel family into a fully disjoint
/// four-orientation family with the same circuit answer. Throws
/// std::invalid_argument on an invalid, non-axis-parallel, or non-integer
/// input.
std::pair<SegmentFamily, TransformReport> transform_circuit(
    const SegmentFamily& input, const TransformOptions& options);
std::pair<SegmentFamily, TransformReport> transform_circuit(
    const SegmentFamily& input);

/// Same compilation, but the circuit answer of the input becomes the path
/// answer of the output: doubles the build scale and extends the gadget at
/// the lexicographically least anchor so the chain must start and end there.
/// Additionally throws std::invalid_argument when the input has no shared
/// endpoint to host that gadget.
std::pair<SegmentFamily, TransformReport> transform_path(
    const SegmentFamily& input, const TransformOptions& options);
std::pair<SegmentFamily, TransformReport> transform_path(
    const SegmentFamily& input);

/// Line-oriented text form of a report ("transform-report v1" header).
std::string serialize_report(const TransformReport& report);

/// Inverse of serialize_report. Throws ParseError on malformed input.
TransformReport parse_report(const std::string& text);

}  // namespace seglink
