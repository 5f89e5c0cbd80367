#include "seglink/lemmas.h"

#include "seglink/geom.h"
#include "seglink/visibility.h"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace seglink {

namespace {

std::string point_str(const Point& p) {
  return "(" + rat_to_string(p.x) + ", " + rat_to_string(p.y) + ")";
}

/// Landmark points of one gadget, reconstructed at the report's output scale.
struct Frame {
  FrameSigns signs{1, 1};
  int parity = 1;      // signs.sx * signs.sy; flips the slot slopes' sign
  Point o_prime;       // relocated end of the horizontal host
  Point o_dprime;      // relocated end of the vertical host
  Point corner;        // target corner the displaced tip points past
  Point tip;           // displaced tip of the first blocker
  Rat slope_lo;        // sight-slot slope interval, sorted
  Rat slope_hi;
};

Frame make_frame(const GadgetRecord& g, const TransformParams& params) {
  Frame f;
  f.signs = variant_signs(g.variant);
  f.parity = f.signs.sx * f.signs.sy;
  const Rat dx = Rat(params.final_scale) * Rat(f.signs.sx);
  const Rat dy = Rat(params.final_scale) * Rat(f.signs.sy);
  f.o_prime = Point{g.anchor.x - Rat(4) * dx, g.anchor.y};
  f.o_dprime = Point{g.anchor.x, g.anchor.y + dy};
  f.corner = Point{g.anchor.x + Rat(8) * dx, g.anchor.y + Rat(3) * dy};
  f.tip = Point{g.anchor.x + Rat(8) * dx,
                g.anchor.y + (Rat(3) - params.delta) * dy};
  const Rat par(f.parity);
  const Rat a = par * (Rat(6) - Rat(3) * params.delta) / Rat(24);
  const Rat b = par * (Rat(6) - Rat(2) * params.delta) / Rat(24);
  f.slope_lo = std::min(a, b);
  f.slope_hi = std::max(a, b);
  return f;
}

[[noreturn]] void mismatch(const std::string& why) {
  throw std::invalid_argument("report does not describe this family: " + why);
}

/// Verifies that the report is a faithful account of `family`: every segment
/// is claimed exactly once as carried or added, each gadget's added segments
/// reproduce the template at the report's delta and scale, and each carried
/// host ends at its gadget's port.
void require_match(const SegmentFamily& family, const TransformReport& report) {
  const std::size_t n = family.segments.size();
  if (report.carry_map.size() != report.input_segments)
    mismatch("carry map size disagrees with the input segment count");
  if (!(report.params.delta > 0)) mismatch("displacement must be positive");
  if (report.params.final_scale < 1) mismatch("output scale must be positive");

  std::vector<char> covered(n, 0);
  const auto claim = [&](std::size_t idx) {
    if (idx >= n) mismatch("segment index " + std::to_string(idx) + " out of range");
    if (covered[idx]) mismatch("segment " + std::to_string(idx) + " claimed twice");
    covered[idx] = 1;
  };
  for (std::size_t idx : report.carry_map) claim(idx);

  for (std::size_t i = 0; i < report.gadgets.size(); ++i) {
    const GadgetRecord& g = report.gadgets[i];
    const std::string tag = "gadget " + std::to_string(i);
    const std::size_t want = g.extended ? kExtendedGadgetAdded : kGadgetAdded;
    if (g.added.size() != want) mismatch(tag + " has the wrong added count");
    if (g.carried_h >= n || g.carried_v >= n || !covered[g.carried_h] ||
        !covered[g.carried_v])
      mismatch(tag + " names hosts outside the carried segments");
    for (std::size_t idx : g.added) claim(idx);

    const GadgetGeometry local =
        build_gadget(g.variant, Point{Rat(0), Rat(0)}, report.params.delta,
                     g.extended);
    const Rat unit(report.params.final_scale);
    for (std::size_t j = 0; j < want; ++j) {
      const Segment& s = local.added[j];
      const Segment scaled{
          Point{g.anchor.x + unit * s.p.x, g.anchor.y + unit * s.p.y},
          Point{g.anchor.x + unit * s.q.x, g.anchor.y + unit * s.q.y}};
      if (!(family.segments[g.added[j]] == scaled))
        mismatch(tag + " added segment " + std::to_string(j) +
                 " does not match the template");
    }

    const Frame f = make_frame(g, report.params);
    const Segment& h = family.segments[g.carried_h];
    if (!(h.p == f.o_prime || h.q == f.o_prime))
      mismatch(tag + " horizontal host does not end at its port");
    const Segment& v = family.segments[g.carried_v];
    if (!(v.p == f.o_dprime || v.q == f.o_dprime))
      mismatch(tag + " vertical host does not end at its port");
  }
  for (std::size_t idx = 0; idx < n; ++idx)
    if (!covered[idx]) mismatch("segment " + std::to_string(idx) + " unclaimed");
}

struct PointLess {
  bool operator()(const Point& a, const Point& b) const {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  }
};

/// All endpoint-pair sightlines of the family, computed once and queried by
/// point or by segment index.
class VisCache {
 public:
  explicit VisCache(const SegmentFamily& family) : family_(&family) {
    const VisibilityGraph graph = visibility_graph(family);
    v_ = graph.vertices.size();
    see_.assign(v_ * v_, 0);
    for (std::size_t i = 0; i < v_; ++i)
      index_.emplace(graph.vertices[i].point, i);
    for (const auto& [i, j] : graph.edges) {
      see_[i * v_ + j] = 1;
      see_[j * v_ + i] = 1;
    }
  }

  bool point_pair(const Point& a, const Point& b) const {
    return see_[at(a) * v_ + at(b)];
  }

  /// Whether any endpoint of segment `a` sees any endpoint of segment `b`.
  bool segment_pair(std::size_t a, std::size_t b) const {
    for (const Point& pa : {family_->segments[a].p, family_->segments[a].q})
      for (const Point& pb : {family_->segments[b].p, family_->segments[b].q})
        if (!(pa == pb) && point_pair(pa, pb)) return true;
    return false;
  }

 private:
  std::size_t at(const Point& p) const {
    const auto it = index_.find(p);
    if (it == index_.end())
      throw std::logic_error("visibility cache queried with a foreign point");
    return it->second;
  }

  const SegmentFamily* family_;
  std::size_t v_ = 0;
  std::vector<char> see_;
  std::map<Point, std::size_t, PointLess> index_;
};

/// Per-gadget membership bitmaps over the family's segments (hosts + added).
std::vector<std::vector<char>> member_maps(const SegmentFamily& family,
                                           const TransformReport& report) {
  std::vector<std::vector<char>> maps(report.gadgets.size());
  for (std::size_t i = 0; i < report.gadgets.size(); ++i) {
    const GadgetRecord& g = report.gadgets[i];
    maps[i].assign(family.segments.size(), 0);
    maps[i][g.carried_h] = 1;
    maps[i][g.carried_v] = 1;
    for (std::size_t idx : g.added) maps[i][idx] = 1;
  }
  return maps;
}

/// The guard and blocker segments of a gadget: every added segment except the
/// two diagonal shields, which are deliberately long and visible.
std::vector<std::size_t> blocker_positions(const GadgetRecord& g) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < g.added.size(); ++j)
    if (j != kPosConnector && j != kPosFarConnector) out.push_back(j);
  return out;
}

LemmaCheck guard_check(const SegmentFamily& family, const VisCache& vis,
                       const GadgetRecord& g, std::size_t gadget_index,
                       std::string name, std::size_t guard_pos,
                       const std::vector<std::size_t>& expected_pos) {
  LemmaCheck check{gadget_index, std::move(name), true, ""};
  const std::size_t guard = g.added[guard_pos];
  std::vector<char> expected(family.segments.size(), 0);
  for (std::size_t pos : expected_pos) expected[g.added[pos]] = 1;
  for (std::size_t j = 0; j < family.segments.size(); ++j) {
    if (j == guard) continue;
    const bool seen = vis.segment_pair(guard, j);
    if (seen == static_cast<bool>(expected[j])) continue;
    check.pass = false;
    check.detail = "segment " + std::to_string(guard) +
                   (seen ? " sees unexpected segment " : " fails to see segment ") +
                   std::to_string(j);
    break;
  }
  return check;
}

/// Seeing endpoint pairs between segments `a` and `b`, as (endpoint of a,
/// endpoint of b).
std::vector<std::pair<Point, Point>> seeing_pairs(const SegmentFamily& family,
                                                  const VisCache& vis,
                                                  std::size_t a,
                                                  std::size_t b) {
  std::vector<std::pair<Point, Point>> pairs;
  for (const Point& pa : {family.segments[a].p, family.segments[a].q})
    for (const Point& pb : {family.segments[b].p, family.segments[b].q})
      if (!(pa == pb) && vis.point_pair(pa, pb)) pairs.emplace_back(pa, pb);
  return pairs;
}

}  // namespace

std::vector<LemmaCheck> verify_invisibility(const SegmentFamily& family,
                                            const TransformReport& report) {
  require_match(family, report);
  std::vector<LemmaCheck> checks;
  if (report.gadgets.empty()) return checks;
  const VisCache vis(family);
  const std::vector<std::vector<char>> members = member_maps(family, report);

  for (std::size_t i = 0; i < report.gadgets.size(); ++i) {
    const GadgetRecord& g = report.gadgets[i];

    LemmaCheck isolation{i, "isolation", true, ""};
    for (std::size_t pos : blocker_positions(g)) {
      const std::size_t blocker = g.added[pos];
      for (std::size_t other = 0; isolation.pass && other < report.gadgets.size();
           ++other) {
        if (other == i) continue;
        for (std::size_t j = 0; j < family.segments.size(); ++j) {
          if (!members[other][j] || members[i][j]) continue;
          if (!vis.segment_pair(blocker, j)) continue;
          isolation.pass = false;
          isolation.detail = "segment " + std::to_string(blocker) +
                             " sees segment " + std::to_string(j) +
                             " of gadget " + std::to_string(other);
          break;
        }
      }
      if (!isolation.pass) break;
    }
    checks.push_back(std::move(isolation));

    checks.push_back(guard_check(family, vis, g, i, "guard-b1", kPosB1,
                                 {kPosA1, kPosConnector}));
    checks.push_back(guard_check(family, vis, g, i, "guard-b2", kPosB2,
                                 {kPosA2, kPosConnector}));
    if (g.extended) {
      LemmaCheck ring{i, "guard-ring", true, ""};
      const std::pair<std::size_t, std::size_t> pairs[] = {
          {kPosB3, kPosA3}, {kPosB4, kPosA4}, {kPosB5, kPosA5}, {kPosB6, kPosA6}};
      for (const auto& [guard_pos, target_pos] : pairs) {
        const LemmaCheck one =
            guard_check(family, vis, g, i, "guard-ring", guard_pos,
                        {target_pos, kPosConnector, kPosFarConnector});
        if (one.pass) continue;
        ring = one;
        break;
      }
      checks.push_back(std::move(ring));
    }

    const Frame f = make_frame(g, report.params);

    LemmaCheck port1{i, "port-a1", true, ""};
    const auto a1_pairs =
        seeing_pairs(family, vis, g.added[kPosA1], g.carried_h);
    if (a1_pairs.empty()) {
      port1.pass = false;
      port1.detail = "first blocker cannot see its horizontal host";
    }
    for (const auto& [bp, hp] : a1_pairs) {
      if (hp == f.o_prime) continue;
      port1.pass = false;
      port1.detail = "sightline from " + point_str(bp) + " reaches the host at " +
                     point_str(hp) + " instead of the port";
      break;
    }
    checks.push_back(std::move(port1));

    LemmaCheck port2{i, "port-a2", true, ""};
    if (vis.segment_pair(g.added[kPosA2], g.carried_h)) {
      port2.pass = false;
      port2.detail = "second blocker sees the horizontal host";
    } else {
      const auto a2_pairs =
          seeing_pairs(family, vis, g.added[kPosA2], g.carried_v);
      if (a2_pairs.empty()) {
        port2.pass = false;
        port2.detail = "second blocker cannot see its vertical host";
      }
      for (const auto& [bp, vp] : a2_pairs) {
        if (vp == f.o_dprime) continue;
        port2.pass = false;
        port2.detail = "sightline from " + point_str(bp) +
                       " reaches the host at " + point_str(vp) +
                       " instead of the port";
        break;
      }
    }
    checks.push_back(std::move(port2));
  }
  return checks;
}

std::vector<LemmaCheck> verify_angle_bound(const SegmentFamily& family,
                                           const TransformReport& report) {
  require_match(family, report);
  std::vector<LemmaCheck> checks;
  if (report.gadgets.empty()) return checks;

  std::vector<Frame> frames;
  frames.reserve(report.gadgets.size());
  for (const GadgetRecord& g : report.gadgets)
    frames.push_back(make_frame(g, report.params));

  const std::vector<EndpointRecord> points = endpoints(family);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    LemmaCheck check{i, "angle-bound", true, ""};
    const int blocked_side = f.parity == 1 ? -1 : 1;
    for (const EndpointRecord& rec : points) {
      const Point& p = rec.point;
      const bool is_tip = std::any_of(
          frames.begin(), frames.end(),
          [&](const Frame& other) { return other.tip == p; });
      if (is_tip) continue;
      if (orientation(f.o_dprime, f.o_prime, p) != blocked_side) continue;
      if (angle_less(f.o_dprime, f.corner, f.tip, f.o_dprime, f.o_prime, p))
        continue;
      check.pass = false;
      check.detail = "endpoint " + point_str(p) +
                     " subtends no more than the sight slot at the port";
      break;
    }
    checks.push_back(std::move(check));
  }
  return checks;
}

std::vector<LemmaCheck> verify_slope_ranges(const SegmentFamily& family,
                                            const TransformReport& report) {
  require_match(family, report);
  std::vector<LemmaCheck> checks;
  if (report.gadgets.empty()) return checks;

  std::vector<Frame> frames;
  frames.reserve(report.gadgets.size());
  for (const GadgetRecord& g : report.gadgets)
    frames.push_back(make_frame(g, report.params));

  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    LemmaCheck check{i, "slit-slope", true, ""};
    const Rat to_dport =
        (f.tip.y - f.o_dprime.y) / (f.tip.x - f.o_dprime.x);
    const Rat to_port = (f.tip.y - f.o_prime.y) / (f.tip.x - f.o_prime.x);
    const Rat lo = std::min(to_dport, to_port);
    const Rat hi = std::max(to_dport, to_port);
    if (!(lo == f.slope_lo && hi == f.slope_hi)) {
      check.pass = false;
      check.detail = "slot slopes [" + rat_to_string(lo) + ", " +
                     rat_to_string(hi) + "] differ from the closed form [" +
                     rat_to_string(f.slope_lo) + ", " +
                     rat_to_string(f.slope_hi) + "]";
    }
    checks.push_back(std::move(check));
  }

  const VisCache vis(family);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    for (std::size_t j = i + 1; j < frames.size(); ++j) {
      if (frames[i].parity != frames[j].parity) {
        LemmaCheck sep{i, "slope-separation", true, ""};
        if (!(frames[i].slope_hi < frames[j].slope_lo ||
              frames[j].slope_hi < frames[i].slope_lo)) {
          sep.pass = false;
          sep.detail = "slot interval overlaps gadget " + std::to_string(j);
        }
        checks.push_back(std::move(sep));
      }
      LemmaCheck blind{i, "tip-blind", true, ""};
      if (vis.point_pair(frames[i].tip, frames[j].tip)) {
        blind.pass = false;
        blind.detail = "tip " + point_str(frames[i].tip) + " sees tip " +
                       point_str(frames[j].tip) + " of gadget " +
                       std::to_string(j);
      }
      checks.push_back(std::move(blind));
    }
  }
  return checks;
}

std::vector<LemmaCheck> verify_forced_sequence(const SegmentFamily& family,
                                               const TransformReport& report,
                                               const Linking& witness) {
  require_match(family, report);
  std::vector<LemmaCheck> checks;
  if (report.gadgets.empty()) return checks;

  if (const auto violation = verify_linking(witness, family)) {
    for (std::size_t i = 0; i < report.gadgets.size(); ++i)
      checks.push_back({i, "witness-invalid", false, *violation});
    return checks;
  }

  const std::size_t n = family.segments.size();
  std::vector<std::size_t> pos(n, 0);
  std::vector<std::size_t> seq(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    seq[i] = witness.order[2 * i].seg;
    pos[seq[i]] = i;
  }
  const bool cyclic = witness.mode == LinkMode::Circuit;

  for (std::size_t i = 0; i < report.gadgets.size(); ++i) {
    const GadgetRecord& g = report.gadgets[i];
    if (g.extended) {
      if (witness.mode != LinkMode::Path) continue;
      LemmaCheck ends{i, "chain-ends", true, ""};
      const auto inside = [&](std::size_t seg) {
        return std::find(g.added.begin(), g.added.end(), seg) != g.added.end();
      };
      if (!inside(seq.front()) || !inside(seq.back())) {
        ends.pass = false;
        ends.detail = "chain ends at segments " + std::to_string(seq.front()) +
                      " and " + std::to_string(seq.back()) +
                      ", outside the extended gadget";
      }
      checks.push_back(std::move(ends));
      continue;
    }

    const std::size_t run[7] = {g.carried_h,        g.added[kPosA1],
                                g.added[kPosB1],    g.added[kPosConnector],
                                g.added[kPosB2],    g.added[kPosA2],
                                g.carried_v};
    const auto follows = [&](std::size_t a, std::size_t b) {
      // b occupies the position right after a in the visit order
      if (cyclic) return pos[b] == (pos[a] + 1) % n;
      return pos[a] + 1 == pos[b];
    };
    bool forward = true;
    bool backward = true;
    for (std::size_t k = 0; k + 1 < 7; ++k) {
      forward = forward && follows(run[k], run[k + 1]);
      backward = backward && follows(run[k + 1], run[k]);
    }
    LemmaCheck block{i, "contiguous-run", forward || backward, ""};
    if (!block.pass) {
      std::ostringstream out;
      out << "visit positions";
      for (std::size_t seg : run) out << ' ' << pos[seg];
      out << " are not consecutive";
      block.detail = out.str();
    }
    checks.push_back(std::move(block));
  }
  return checks;
}

}  // namespace seglink
