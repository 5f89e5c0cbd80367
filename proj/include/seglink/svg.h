#pragma once

#include "seglink/gadget.h"
#include "seglink/instance.h"
#include "seglink/linker.h"

#include <string>

namespace seglink {

/// Display-only settings for render_svg. `zoom` multiplies each gadget's tip
/// displacement so it becomes visible (at true scale it is far below one
/// pixel); locating the tips requires the transform report.
struct RenderOptions {
  const Linking* witness = nullptr;      ///< overlay the added edges, dashed
  const TransformReport* report = nullptr;
  Rat zoom = Rat(1);                     ///< tip displacement multiplier
};

/// Renders the family as standalone SVG 1.1 text, deterministically. The
/// output is a pure sink: nothing downstream reads it back. Throws
/// std::invalid_argument when zoom != 1 without a report, or when the report
/// does not locate the tips inside `family`.
std::string render_svg(const SegmentFamily& family,
                       const RenderOptions& options = {});

}  // namespace seglink
