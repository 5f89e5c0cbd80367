#include "seglink/gadget.h"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace seglink {

namespace {

Segment normalized(Segment s) {
  if (lex_less(s.q, s.p)) std::swap(s.p, s.q);
  return s;
}

Point scale_point(const Point& p, const Rat& k) { return {p.x * k, p.y * k}; }

Segment scale_segment(const Segment& s, const Rat& k) {
  return {scale_point(s.p, k), scale_point(s.q, k)};
}

/// The gadget in its own frame (anchor at the origin, both carried segments
/// leaving along the positive axes). Offsets fit in [-4, 17]^2, or [-4, 33]^2
/// extended, so gadgets at distinct incidences of a x40 (or x80) rescaled
/// family can never touch.
std::vector<Segment> local_template(const Rat& delta, bool extended) {
  auto seg = [](long long x1, long long y1, long long x2, long long y2) {
    return Segment{{Rat(x1), Rat(y1)}, {Rat(x2), Rat(y2)}};
  };
  std::vector<Segment> t = {
      {{Rat(8), Rat(3) - delta}, {Rat(8), Rat(7)}},  // A'1 (displaced tip)
      seg(9, 4, 9, 5),                               // B1
      seg(1, 16, 16, 1),                             // a'b' sightline shield
      seg(4, 9, 5, 9),                               // B2
      seg(3, 8, 7, 8),                               // A2
  };
  if (extended) {
    t.push_back(seg(10, 9, 15, 9));    // A3
    t.push_back(seg(9, 10, 9, 15));    // A4
    t.push_back(seg(16, 10, 16, 15));  // A5
    t.push_back(seg(10, 16, 15, 16));  // A6
    t.push_back(seg(12, 8, 13, 8));    // B3
    t.push_back(seg(8, 12, 8, 13));    // B4
    t.push_back(seg(17, 12, 17, 13));  // B5
    t.push_back(seg(12, 17, 13, 17));  // B6
    t.push_back(seg(1, 32, 32, 1));    // a''b'' outer shield
  }
  return t;
}

Point place_point(const Point& local, const Point& anchor, FrameSigns f) {
  return {anchor.x + local.x * f.sx, anchor.y + local.y * f.sy};
}

Segment place_segment(const Segment& local, const Point& anchor, FrameSigns f) {
  return normalized(
      {place_point(local.p, anchor, f), place_point(local.q, anchor, f)});
}

bool axis_parallel(const Segment& s) {
  return s.p.x == s.q.x || s.p.y == s.q.y;
}

bool integer_segment(const Segment& s) {
  return is_integer(s.p.x) && is_integer(s.p.y) && is_integer(s.q.x) &&
         is_integer(s.q.y);
}

std::pair<SegmentFamily, TransformReport> run_transform(
    const SegmentFamily& input, LinkMode mode, const TransformOptions& options) {
  if (input.segments.empty()) {
    throw std::invalid_argument("transform: the input family is empty");
  }
  if (auto violation = validate(input)) {
    throw std::invalid_argument("transform: invalid input family: " +
                                violation->message);
  }
  for (const Segment& s : input.segments) {
    if (!axis_parallel(s)) {
      throw std::invalid_argument(
          "transform: input segments must be axis-parallel");
    }
    if (!integer_segment(s)) {
      throw std::invalid_argument(
          "transform: input coordinates must be integers");
    }
  }

  const std::vector<Incidence> incidences = find_incidences(input);
  if (mode == LinkMode::Path && incidences.empty()) {
    throw std::invalid_argument(
        "transform: path mode needs a shared endpoint to host the extended "
        "gadget");
  }
  const int initial_scale = mode == LinkMode::Circuit ? 40 : 80;

  // Rescale the input and relocate each incidence's two carried endpoints:
  // the horizontal host grows 4 units past the meeting point, the vertical
  // host gives up its last unit.
  std::vector<Segment> carried;
  carried.reserve(input.segments.size());
  for (const Segment& s : input.segments) {
    carried.push_back(scale_segment(s, Rat(initial_scale)));
  }
  std::vector<Point> anchors;
  anchors.reserve(incidences.size());
  for (const Incidence& inc : incidences) {
    anchors.push_back(scale_point(inc.o, Rat(initial_scale)));
  }
  auto relocate = [](Segment& host, const Point& from, const Point& to) {
    if (host.p == from) {
      host.p = to;
    } else if (host.q == from) {
      host.q = to;
    } else {
      throw std::logic_error("transform: lost track of a carried endpoint");
    }
    if (host.p == host.q) {
      throw std::logic_error("transform: a carried segment collapsed");
    }
  };
  for (std::size_t i = 0; i < incidences.size(); ++i) {
    const FrameSigns f = variant_signs(incidences[i].variant);
    const Point& o = anchors[i];
    relocate(carried[incidences[i].h_index], o, {o.x - Rat(4) * f.sx, o.y});
    relocate(carried[incidences[i].v_index], o, {o.x, o.y + f.sy});
  }

  auto build_all = [&](const Rat& delta) {
    std::vector<GadgetGeometry> out;
    out.reserve(incidences.size());
    for (std::size_t i = 0; i < incidences.size(); ++i) {
      const bool extended = mode == LinkMode::Path && i == 0;
      out.push_back(
          build_gadget(incidences[i].variant, anchors[i], delta, extended));
    }
    return out;
  };

  // The displaced tip sits strictly inside its gadget's extent for any
  // displacement in (0, 1], so a probe with delta = 1 already has the exact
  // bounding box of the real construction.
  Rat delta;
  if (options.delta_override) {
    delta = *options.delta_override;
    if (delta <= 0) {
      throw std::invalid_argument("transform: delta must be positive");
    }
  } else {
    SegmentFamily probe;
    probe.segments = carried;
    for (const GadgetGeometry& g : build_all(Rat(1))) {
      probe.segments.insert(probe.segments.end(), g.added.begin(),
                            g.added.end());
    }
    delta = choose_delta(probe);
  }

  const std::vector<GadgetGeometry> gadgets = build_all(delta);

  // A unit-fraction displacement rescales onto the integer grid; any other
  // (overridden) value leaves the coordinates rational.
  const Int factor = rat_num(delta) == 1 ? rat_den(delta) : Int(1);
  const Rat factor_r(factor);

  SegmentFamily out;
  out.declared_class = FamilyClass::Disjoint;
  out.segments.reserve(carried.size() + incidences.size() * kGadgetAdded + 9);

  TransformReport report;
  report.mode = mode;
  report.input_segments = input.segments.size();
  report.params.initial_scale = initial_scale;
  report.params.delta = delta;
  report.params.final_scale = factor;

  for (std::size_t i = 0; i < carried.size(); ++i) {
    report.carry_map.push_back(out.segments.size());
    out.segments.push_back(normalized(scale_segment(carried[i], factor_r)));
  }
  for (std::size_t i = 0; i < incidences.size(); ++i) {
    GadgetRecord rec;
    rec.anchor = scale_point(anchors[i], factor_r);
    rec.variant = incidences[i].variant;
    rec.extended = mode == LinkMode::Path && i == 0;
    rec.carried_h = report.carry_map[incidences[i].h_index];
    rec.carried_v = report.carry_map[incidences[i].v_index];
    for (const Segment& s : gadgets[i].added) {
      rec.added.push_back(out.segments.size());
      out.segments.push_back(normalized(scale_segment(s, factor_r)));
    }
    report.gadgets.push_back(std::move(rec));
  }

  if (rat_num(delta) == 1) {
    for (const Segment& s : out.segments) {
      if (!integer_segment(s)) {
        throw std::logic_error("transform: non-integer output coordinate");
      }
    }
  }

  std::vector<Point> pts;
  pts.reserve(out.segments.size() * 2);
  for (const Segment& s : out.segments) {
    pts.push_back(s.p);
    pts.push_back(s.q);
  }
  report.params.bound = bounding_box(pts);
  return {std::move(out), std::move(report)};
}

}  // namespace

GadgetGeometry build_gadget(Variant variant, const Point& anchor,
                            const Rat& delta, bool extended) {
  if (delta <= 0) {
    throw std::invalid_argument("build_gadget: delta must be positive");
  }
  const FrameSigns f = variant_signs(variant);
  GadgetGeometry g;
  for (const Segment& s : local_template(delta, extended)) {
    g.added.push_back(place_segment(s, anchor, f));
  }
  g.o_prime = {anchor.x - Rat(4) * f.sx, anchor.y};
  g.o_dprime = {anchor.x, anchor.y + f.sy};
  return g;
}

Rat choose_delta(const SegmentFamily& family) {
  if (family.segments.empty()) {
    throw std::invalid_argument("choose_delta: empty family");
  }
  std::vector<Point> pts;
  pts.reserve(family.segments.size() * 2);
  for (const Segment& s : family.segments) {
    pts.push_back(s.p);
    pts.push_back(s.q);
  }
  const Box box = bounding_box(pts);
  const Rat span = (box.max.x - box.min.x) + (box.max.y - box.min.y);
  if (span <= 0) {
    throw std::invalid_argument("choose_delta: degenerate bounding box");
  }
  // Smallest K with 1/K <= 8 / (5 span), i.e. K = ceil(5 span / 8).
  const Rat bound = Rat(5) * span / Rat(8);
  Int k = ceil_div(rat_num(bound), rat_den(bound));
  if (k < 1) {
    k = 1;
  }
  return Rat(1) / Rat(k);
}

std::pair<SegmentFamily, TransformReport> transform_circuit(
    const SegmentFamily& input, const TransformOptions& options) {
  return run_transform(input, LinkMode::Circuit, options);
}

std::pair<SegmentFamily, TransformReport> transform_circuit(
    const SegmentFamily& input) {
  return transform_circuit(input, TransformOptions{});
}

std::pair<SegmentFamily, TransformReport> transform_path(
    const SegmentFamily& input, const TransformOptions& options) {
  return run_transform(input, LinkMode::Path, options);
}

std::pair<SegmentFamily, TransformReport> transform_path(
    const SegmentFamily& input) {
  return transform_path(input, TransformOptions{});
}

std::string serialize_report(const TransformReport& report) {
  std::ostringstream out;
  out << "transform-report v1\n";
  out << "mode " << link_mode_name(report.mode) << "\n";
  out << "input-segments " << report.input_segments << "\n";
  out << "initial-scale " << report.params.initial_scale << "\n";
  out << "delta " << rat_to_string(report.params.delta) << "\n";
  out << "final-scale " << report.params.final_scale << "\n";
  out << "bound " << rat_to_string(report.params.bound.min.x) << " "
      << rat_to_string(report.params.bound.min.y) << " "
      << rat_to_string(report.params.bound.max.x) << " "
      << rat_to_string(report.params.bound.max.y) << "\n";
  for (std::size_t i = 0; i < report.carry_map.size(); ++i) {
    out << "carry " << i << " " << report.carry_map[i] << "\n";
  }
  for (std::size_t i = 0; i < report.gadgets.size(); ++i) {
    const GadgetRecord& g = report.gadgets[i];
    out << "gadget " << i << " anchor " << rat_to_string(g.anchor.x) << " "
        << rat_to_string(g.anchor.y) << " variant " << variant_name(g.variant)
        << " extended " << (g.extended ? 1 : 0) << " carried " << g.carried_h
        << " " << g.carried_v << " added";
    for (std::size_t idx : g.added) {
      out << " " << idx;
    }
    out << "\n";
  }
  return out.str();
}

namespace {

/// Cursor over the non-blank, comment-stripped lines of a report.
struct LineCursor {
  std::vector<std::pair<int, std::string>> lines;
  std::size_t pos = 0;
  int last_line = 1;

  explicit LineCursor(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      lines.emplace_back(number, line);
    }
  }

  bool done() const { return pos == lines.size(); }
  int line_number() const {
    return done() ? (lines.empty() ? 1 : lines.back().first) : lines[pos].first;
  }
  /// First word of the current line without consuming it.
  std::string peek_key() const {
    std::istringstream in(lines[pos].second);
    std::string key;
    in >> key;
    return key;
  }
  std::istringstream take() {
    last_line = lines[pos].first;
    return std::istringstream(lines[pos++].second);
  }
};

template <typename T>
T read_value(std::istringstream& in, const LineCursor& cur,
             const std::string& what) {
  T value;
  if (!(in >> value)) {
    throw ParseError("expected " + what, cur.last_line);
  }
  return value;
}

Rat read_rat(std::istringstream& in, const LineCursor& cur,
             const std::string& what) {
  const std::string word = read_value<std::string>(in, cur, what);
  if (auto r = rat_from_string(word)) {
    return *r;
  }
  throw ParseError("bad number '" + word + "' for " + what, cur.last_line);
}

std::istringstream expect_line(LineCursor& cur, const std::string& key) {
  if (cur.done() || cur.peek_key() != key) {
    throw ParseError("expected '" + key + "' line", cur.line_number());
  }
  auto in = cur.take();
  std::string consumed;
  in >> consumed;
  return in;
}

void expect_end(std::istringstream& in, const LineCursor& cur) {
  std::string extra;
  if (in >> extra) {
    throw ParseError("unexpected trailing token '" + extra + "'",
                     cur.last_line);
  }
}

}  // namespace

TransformReport parse_report(const std::string& text) {
  LineCursor cur(text);
  if (cur.done()) {
    throw ParseError("missing 'transform-report v1' header", 1);
  }
  {
    auto in = cur.take();
    std::string word, version, extra;
    in >> word >> version;
    if (word != "transform-report" || version != "v1" || (in >> extra)) {
      throw ParseError("missing 'transform-report v1' header", cur.last_line);
    }
  }

  TransformReport report;
  {
    auto in = expect_line(cur, "mode");
    const std::string mode = read_value<std::string>(in, cur, "mode name");
    if (mode == "circuit") {
      report.mode = LinkMode::Circuit;
    } else if (mode == "path") {
      report.mode = LinkMode::Path;
    } else {
      throw ParseError("unknown mode '" + mode + "'", cur.last_line);
    }
  }
  {
    auto in = expect_line(cur, "input-segments");
    report.input_segments =
        read_value<std::size_t>(in, cur, "input segment count");
  }
  {
    auto in = expect_line(cur, "initial-scale");
    report.params.initial_scale = read_value<int>(in, cur, "initial scale");
  }
  {
    auto in = expect_line(cur, "delta");
    report.params.delta = read_rat(in, cur, "delta");
    if (report.params.delta <= 0) {
      throw ParseError("delta must be positive", cur.last_line);
    }
  }
  {
    auto in = expect_line(cur, "final-scale");
    report.params.final_scale = read_value<Int>(in, cur, "final scale");
  }
  {
    auto in = expect_line(cur, "bound");
    report.params.bound.min.x = read_rat(in, cur, "bound min x");
    report.params.bound.min.y = read_rat(in, cur, "bound min y");
    report.params.bound.max.x = read_rat(in, cur, "bound max x");
    report.params.bound.max.y = read_rat(in, cur, "bound max y");
  }
  while (!cur.done() && cur.peek_key() == "carry") {
    auto in = cur.take();
    std::string key;
    in >> key;
    const auto index = read_value<std::size_t>(in, cur, "carry input index");
    if (index != report.carry_map.size()) {
      throw ParseError("carry lines out of order", cur.last_line);
    }
    report.carry_map.push_back(
        read_value<std::size_t>(in, cur, "carry output index"));
    expect_end(in, cur);
  }
  if (report.carry_map.size() != report.input_segments) {
    throw ParseError("expected one carry line per input segment",
                     cur.line_number());
  }
  while (!cur.done() && cur.peek_key() == "gadget") {
    auto in = cur.take();
    std::string key;
    in >> key;
    const auto index = read_value<std::size_t>(in, cur, "gadget index");
    if (index != report.gadgets.size()) {
      throw ParseError("gadget lines out of order", cur.last_line);
    }
    GadgetRecord rec;
    auto expect_word = [&](const char* word) {
      if (read_value<std::string>(in, cur, std::string("'") + word + "'") !=
          word) {
        throw ParseError(std::string("expected '") + word + "'",
                         cur.last_line);
      }
    };
    expect_word("anchor");
    rec.anchor.x = read_rat(in, cur, "anchor x");
    rec.anchor.y = read_rat(in, cur, "anchor y");
    expect_word("variant");
    const std::string name = read_value<std::string>(in, cur, "variant name");
    if (auto v = variant_from_name(name)) {
      rec.variant = *v;
    } else {
      throw ParseError("unknown variant '" + name + "'", cur.last_line);
    }
    expect_word("extended");
    rec.extended = read_value<int>(in, cur, "extended flag") != 0;
    expect_word("carried");
    rec.carried_h = read_value<std::size_t>(in, cur, "carried horizontal");
    rec.carried_v = read_value<std::size_t>(in, cur, "carried vertical");
    expect_word("added");
    std::size_t idx;
    while (in >> idx) {
      rec.added.push_back(idx);
    }
    const std::size_t want =
        rec.extended ? kExtendedGadgetAdded : kGadgetAdded;
    if (rec.added.size() != want) {
      throw ParseError("gadget lists " + std::to_string(rec.added.size()) +
                           " added segments, expected " + std::to_string(want),
                       cur.last_line);
    }
    report.gadgets.push_back(std::move(rec));
  }
  if (!cur.done()) {
    throw ParseError("unexpected line '" + cur.lines[cur.pos].second + "'",
                     cur.line_number());
  }
  return report;
}

}  // namespace seglink
