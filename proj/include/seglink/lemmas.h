#pragma once

#include "seglink/gadget.h"
#include "seglink/instance.h"
#include "seglink/linker.h"

#include <cstddef>
#include <string>
#include <vector>

namespace seglink {

/// Outcome of one structural check, attributed to the gadget it examined.
struct LemmaCheck {
  std::size_t gadget = 0;
  std::string name;
  bool pass = false;
  std::string detail;  ///< first counterexample found; empty when the check passes
};

/// Checks that every blocker segment of each gadget is invisible from every
/// segment of every other gadget, and that the local sightlines inside each
/// gadget are exactly the intended ones (guards see only their targets and
/// the diagonal shields; the port segments see their host only at the port).
/// Throws std::invalid_argument when the report does not describe `family`.
std::vector<LemmaCheck> verify_invisibility(const SegmentFamily& family,
                                            const TransformReport& report);

/// Checks, for each gadget, that every family endpoint lying strictly on the
/// blocked side of the port line subtends a larger angle at the vertical port
/// than the displaced tip's sight slot does (the tips themselves are exempt).
/// Throws std::invalid_argument when the report does not describe `family`.
std::vector<LemmaCheck> verify_angle_bound(const SegmentFamily& family,
                                           const TransformReport& report);

/// Checks that each gadget's sight-slot slope interval matches the closed
/// form implied by its displacement, that intervals of opposite-handed
/// gadgets are disjoint, and that no two displaced tips see each other.
/// Throws std::invalid_argument when the report does not describe `family`.
std::vector<LemmaCheck> verify_slope_ranges(const SegmentFamily& family,
                                            const TransformReport& report);

/// Checks that a linking traverses each gadget as one contiguous block: the
/// horizontal host, the five core added segments, and the vertical host must
/// occupy consecutive positions (forward or reversed) in the segment visit
/// order, and in path mode both chain ends must lie inside the extended
/// gadget. An invalid witness yields failing checks rather than an error.
/// Throws std::invalid_argument when the report does not describe `family`.
std::vector<LemmaCheck> verify_forced_sequence(const SegmentFamily& family,
                                               const TransformReport& report,
                                               const Linking& witness);

}  // namespace seglink
