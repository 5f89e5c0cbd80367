#include "seglink/svg.h"

#include "seglink/geom.h"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace seglink {

namespace {

double approx(const Rat& r) { return r.convert_to<double>(); }

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// Copy of the family with every gadget tip pulled `zoom` times further from
/// its corner, so the displacement shows up at screen resolution.
std::vector<Segment> display_segments(const SegmentFamily& family,
                                      const RenderOptions& options) {
  std::vector<Segment> segments = family.segments;
  if (options.zoom == Rat(1)) return segments;
  if (options.report == nullptr)
    throw std::invalid_argument("zooming the displacement requires the report");
  const TransformReport& report = *options.report;
  const Rat unit(report.params.final_scale);
  for (const GadgetRecord& g : report.gadgets) {
    if (g.added.size() <= kPosA1 || g.added[kPosA1] >= segments.size())
      throw std::invalid_argument("report does not locate the tips");
    const FrameSigns signs = variant_signs(g.variant);
    const Rat sy(signs.sy);
    const Point tip{g.anchor.x + Rat(8) * unit * Rat(signs.sx),
                    g.anchor.y + (Rat(3) - report.params.delta) * unit * sy};
    const Point shown{tip.x,
                      g.anchor.y +
                          (Rat(3) - options.zoom * report.params.delta) * unit * sy};
    Segment& blocker = segments[g.added[kPosA1]];
    if (blocker.p == tip)
      blocker.p = shown;
    else if (blocker.q == tip)
      blocker.q = shown;
    else
      throw std::invalid_argument("report does not locate the tips");
  }
  return segments;
}

}  // namespace

std::string render_svg(const SegmentFamily& family,
                       const RenderOptions& options) {
  const std::vector<Segment> segments = display_segments(family, options);

  std::vector<std::pair<Point, Point>> overlay;
  if (options.witness != nullptr) {
    SegmentFamily shown{segments, family.declared_class};
    overlay = added_edges(*options.witness, shown);
  }

  double min_x = 0, min_y = 0, max_x = 1, max_y = 1;
  bool first = true;
  const auto grow = [&](const Point& p) {
    const double x = approx(p.x);
    const double y = approx(p.y);
    if (first) {
      min_x = max_x = x;
      min_y = max_y = y;
      first = false;
      return;
    }
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  };
  for (const Segment& s : segments) {
    grow(s.p);
    grow(s.q);
  }

  const double margin = 24;
  const double span = std::max({max_x - min_x, max_y - min_y, 1e-9});
  const double scale = 752 / span;
  const double width = (max_x - min_x) * scale + 2 * margin;
  const double height = (max_y - min_y) * scale + 2 * margin;
  const auto sx = [&](const Point& p) {
    return num(margin + (approx(p.x) - min_x) * scale);
  };
  const auto sy = [&](const Point& p) {
    return num(margin + (max_y - approx(p.y)) * scale);
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         num(width) + "\" height=\"" + num(height) + "\" viewBox=\"0 0 " +
         num(width) + " " + num(height) + "\">\n";
  out += "<g stroke=\"#1f2430\" stroke-width=\"2\" stroke-linecap=\"round\">\n";
  for (const Segment& s : segments)
    out += "<line x1=\"" + sx(s.p) + "\" y1=\"" + sy(s.p) + "\" x2=\"" +
           sx(s.q) + "\" y2=\"" + sy(s.q) + "\"/>\n";
  out += "</g>\n<g fill=\"#1f2430\">\n";
  for (const Segment& s : segments) {
    out += "<circle cx=\"" + sx(s.p) + "\" cy=\"" + sy(s.p) + "\" r=\"2.4\"/>\n";
    out += "<circle cx=\"" + sx(s.q) + "\" cy=\"" + sy(s.q) + "\" r=\"2.4\"/>\n";
  }
  out += "</g>\n";
  if (!overlay.empty()) {
    out += "<g stroke=\"#c0392b\" stroke-width=\"1.6\" "
           "stroke-dasharray=\"6 4\" stroke-linecap=\"round\">\n";
    for (const auto& [a, b] : overlay)
      out += "<line x1=\"" + sx(a) + "\" y1=\"" + sy(a) + "\" x2=\"" + sx(b) +
             "\" y2=\"" + sy(b) + "\"/>\n";
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace seglink
