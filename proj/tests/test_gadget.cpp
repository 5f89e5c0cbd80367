#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "seglink/gadget.h"
#include "seglink/linker.h"
#include "seglink/visibility.h"

#include "corpus.h"

#include <string>
#include <vector>

using namespace seglink;
using corpus::pt;
using corpus::seg;

namespace {

Rat frac(long long num, long long den) { return Rat(num) / Rat(den); }

bool axis_or_diagonal(const Segment& s) {
  const Rat dx = s.q.x - s.p.x;
  const Rat dy = s.q.y - s.p.y;
  return dx == 0 || dy == 0 || dx == dy || dx == -dy;
}

bool on_integer_grid(const SegmentFamily& family) {
  for (const Segment& s : family.segments) {
    if (!is_integer(s.p.x) || !is_integer(s.p.y) || !is_integer(s.q.x) ||
        !is_integer(s.q.y)) {
      return false;
    }
  }
  return true;
}

SegmentFamily single_family() {
  return SegmentFamily{{seg(0, 0, 1, 0)}, FamilyClass::InteriorDisjoint};
}

SegmentFamily two_l_family() {
  return SegmentFamily{{seg(0, 0, 2, 0), seg(0, 0, 0, 2), seg(6, 0, 8, 0),
                        seg(6, 0, 6, 2)},
                       FamilyClass::InteriorDisjoint};
}

}  // namespace

TEST_CASE("base gadget at the origin places every blocker exactly") {
  const GadgetGeometry g =
      build_gadget(Variant::RightUp, pt(0, 0), frac(1, 800), false);
  REQUIRE(g.added.size() == kGadgetAdded);
  CHECK(g.added[kPosA1] ==
        Segment{{Rat(8), frac(2399, 800)}, {Rat(8), Rat(7)}});
  CHECK(g.added[kPosB1] == seg(9, 4, 9, 5));
  CHECK(g.added[kPosConnector] == seg(1, 16, 16, 1));
  CHECK(g.added[kPosB2] == seg(4, 9, 5, 9));
  CHECK(g.added[kPosA2] == seg(3, 8, 7, 8));
  CHECK(g.o_prime == pt(-4, 0));
  CHECK(g.o_dprime == pt(0, 1));
}

TEST_CASE("extended gadget adds the outer ring and far shield") {
  const GadgetGeometry g =
      build_gadget(Variant::RightUp, pt(0, 0), frac(1, 800), true);
  REQUIRE(g.added.size() == kExtendedGadgetAdded);
  CHECK(g.added[kPosA3] == seg(10, 9, 15, 9));
  CHECK(g.added[kPosA4] == seg(9, 10, 9, 15));
  CHECK(g.added[kPosA5] == seg(16, 10, 16, 15));
  CHECK(g.added[kPosA6] == seg(10, 16, 15, 16));
  CHECK(g.added[kPosB3] == seg(12, 8, 13, 8));
  CHECK(g.added[kPosB4] == seg(8, 12, 8, 13));
  CHECK(g.added[kPosB5] == seg(17, 12, 17, 13));
  CHECK(g.added[kPosB6] == seg(12, 17, 13, 17));
  CHECK(g.added[kPosFarConnector] == seg(1, 32, 32, 1));
}

TEST_CASE("gadget frames reflect with the variant") {
  const Rat delta = frac(1, 5);
  const Point anchor = pt(10, 5);
  for (Variant v : {Variant::RightUp, Variant::LeftUp, Variant::RightDown,
                    Variant::LeftDown}) {
    CAPTURE(variant_name(v));
    const FrameSigns f = variant_signs(v);
    const GadgetGeometry g = build_gadget(v, anchor, delta, false);
    CHECK(g.o_prime == Point{anchor.x - 4 * f.sx, anchor.y});
    CHECK(g.o_dprime == Point{anchor.x, anchor.y + f.sy});

    // The moved tip keeps its offset (8, 3 - delta) in frame units, and the
    // undisplaced tip location stays collinear with o' and o''.
    const Point a1{anchor.x + 8 * f.sx, anchor.y + 3 * f.sy};
    const Point a1_moved{anchor.x + 8 * f.sx,
                         anchor.y + (Rat(3) - delta) * f.sy};
    CHECK(orientation(g.o_prime, g.o_dprime, a1) == 0);
    const Segment& blocker = g.added[kPosA1];
    CHECK((blocker.p == a1_moved || blocker.q == a1_moved));

    // A2 mirrors the same way.
    const Segment a2 = g.added[kPosA2];
    const Point lo{anchor.x + 3 * f.sx, anchor.y + 8 * f.sy};
    const Point hi{anchor.x + 7 * f.sx, anchor.y + 8 * f.sy};
    CHECK((a2 == Segment{lo, hi} || a2 == Segment{hi, lo}));
    CHECK(lex_less(a2.p, a2.q));
  }

  // Spot-check the left-down frame against hand-worked coordinates.
  const GadgetGeometry ld =
      build_gadget(Variant::LeftDown, pt(0, 0), frac(1, 5), false);
  CHECK(ld.o_prime == pt(4, 0));
  CHECK(ld.o_dprime == pt(0, -1));
  CHECK(ld.added[kPosB1] == seg(-9, -5, -9, -4));
  CHECK(ld.added[kPosConnector] == seg(-16, -1, -1, -16));
}

TEST_CASE("gadget blockers are pairwise disjoint") {
  for (Variant v : {Variant::RightUp, Variant::LeftUp, Variant::RightDown,
                    Variant::LeftDown}) {
    for (bool extended : {false, true}) {
      CAPTURE(variant_name(v));
      CAPTURE(extended);
      SegmentFamily fam{build_gadget(v, pt(3, 4), frac(1, 7), extended).added,
                        FamilyClass::Disjoint};
      CHECK(validate(fam) == std::nullopt);
    }
  }
}

TEST_CASE("gadget rejects a non-positive displacement") {
  CHECK_THROWS_AS(build_gadget(Variant::RightUp, pt(0, 0), Rat(0), false),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_gadget(Variant::RightUp, pt(0, 0), frac(-1, 2), true),
                  std::invalid_argument);
}

TEST_CASE("choose_delta picks the largest admissible unit fraction") {
  // 100 x 60 box: 8 / (5 * 160) = 1/100 exactly.
  SegmentFamily box{{seg(0, 0, 100, 0), seg(0, 60, 100, 60)},
                    FamilyClass::Disjoint};
  CHECK(choose_delta(box) == frac(1, 100));

  // Unit box: the bound 8/5 exceeds 1, and 1/1 is the largest unit fraction.
  CHECK(choose_delta(single_family()) == Rat(1));

  // A span that does not divide evenly rounds the denominator up.
  SegmentFamily odd{{seg(0, 0, 3, 0)}, FamilyClass::Disjoint};
  CHECK(choose_delta(odd) == frac(1, 2));  // 5*3/8 = 15/8, ceil = 2

  CHECK_THROWS_AS(choose_delta(SegmentFamily{}), std::invalid_argument);

  for (long long w : {1, 7, 40, 164, 1000, 12345}) {
    CAPTURE(w);
    SegmentFamily fam{{seg(0, 0, w, 0), seg(0, 1, w, 1)},
                      FamilyClass::Disjoint};
    const Rat delta = choose_delta(fam);
    const Rat span = Rat(w) + Rat(1);
    REQUIRE(rat_num(delta) == 1);
    CHECK(delta <= Rat(8) / (Rat(5) * span));
    if (rat_den(delta) > 1) {
      CHECK(Rat(1) / Rat(rat_den(delta) - 1) > Rat(8) / (Rat(5) * span));
    }
  }
}

TEST_CASE("displacement shrinks with the square of the instance size") {
  for (long long n : {4, 10, 100}) {
    CAPTURE(n);
    const Rat side = Rat(1280) * n * n;
    SegmentFamily fam{{Segment{pt(0, 0), {side, Rat(0)}}},
                      FamilyClass::Disjoint};
    CHECK(choose_delta(fam) == Rat(1) / (Rat(800) * n * n));
  }
}

TEST_CASE("transforming the corner family freezes every coordinate") {
  const auto [out, report] = transform_circuit(corpus::l_family());
  REQUIRE(out.segments.size() == 7);
  CHECK(out.declared_class == FamilyClass::Disjoint);
  CHECK(validate(out) == std::nullopt);

  CHECK(out.segments[0] == seg(-412, 0, 8240, 0));   // carried horizontal
  CHECK(out.segments[1] == seg(0, 103, 0, 8240));    // carried vertical
  CHECK(out.segments[2] == seg(824, 308, 824, 721));  // displaced blocker
  CHECK(out.segments[3] == seg(927, 412, 927, 515));
  CHECK(out.segments[4] == seg(103, 1648, 1648, 103));
  CHECK(out.segments[5] == seg(412, 927, 515, 927));
  CHECK(out.segments[6] == seg(309, 824, 721, 824));

  CHECK(report.mode == LinkMode::Circuit);
  CHECK(report.input_segments == 2);
  CHECK(report.params.initial_scale == 40);
  CHECK(report.params.delta == frac(1, 103));
  CHECK(report.params.final_scale == 103);
  CHECK(report.params.bound.min == pt(-412, 0));
  CHECK(report.params.bound.max == pt(8240, 8240));
  CHECK(report.carry_map == std::vector<std::size_t>{0, 1});
  REQUIRE(report.gadgets.size() == 1);
  const GadgetRecord& g = report.gadgets[0];
  CHECK(g.anchor == pt(0, 0));
  CHECK(g.variant == Variant::RightUp);
  CHECK_FALSE(g.extended);
  CHECK(g.carried_h == 0);
  CHECK(g.carried_v == 1);
  CHECK(g.added == std::vector<std::size_t>{2, 3, 4, 5, 6});
}

TEST_CASE("path transform doubles the scale and extends one gadget") {
  const auto [out, report] = transform_path(corpus::l_family());
  REQUIRE(out.segments.size() == 16);
  CHECK(validate(out) == std::nullopt);
  CHECK(report.mode == LinkMode::Path);
  CHECK(report.params.initial_scale == 80);
  CHECK(report.params.delta == frac(1, 203));
  CHECK(report.params.final_scale == 203);

  CHECK(out.segments[0] == seg(-812, 0, 32480, 0));
  CHECK(out.segments[1] == seg(0, 203, 0, 32480));
  CHECK(out.segments[2] == seg(1624, 608, 1624, 1421));   // displaced blocker
  CHECK(out.segments[14] == seg(2436, 3451, 2639, 3451));  // outer ring
  CHECK(out.segments[15] == seg(203, 6496, 6496, 203));    // far shield

  REQUIRE(report.gadgets.size() == 1);
  CHECK(report.gadgets[0].extended);
  CHECK(report.gadgets[0].added.size() == kExtendedGadgetAdded);
}

TEST_CASE("transform output stays on the integer grid with four slopes") {
  struct Row {
    const char* name;
    SegmentFamily family;
    LinkMode mode;
    std::size_t count;
    Int final_scale;
  };
  const Row rows[] = {
      {"corner circuit", corpus::l_family(), LinkMode::Circuit, 7, 103},
      {"square circuit", corpus::rect_family(), LinkMode::Circuit, 24, 105},
      {"nested circuit", corpus::nested_family(), LinkMode::Circuit, 48, 405},
      {"corner path", corpus::l_family(), LinkMode::Path, 16, 203},
      {"square path", corpus::rect_family(), LinkMode::Path, 33, 205},
  };
  for (const Row& row : rows) {
    CAPTURE(row.name);
    const auto [out, report] = row.mode == LinkMode::Circuit
                                   ? transform_circuit(row.family)
                                   : transform_path(row.family);
    CHECK(out.segments.size() == row.count);
    CHECK(report.params.final_scale == row.final_scale);
    CHECK(on_integer_grid(out));
    CHECK(validate(out) == std::nullopt);
    for (const Segment& s : out.segments) {
      CHECK(axis_or_diagonal(s));
    }
    // One gadget per incidence, each keeping its own record.
    CHECK(report.gadgets.size() == (out.segments.size() -
                                    row.family.segments.size() -
                                    (row.mode == LinkMode::Path ? 9 : 0)) /
                                       kGadgetAdded);
  }
}

TEST_CASE("every incidence gets its own gadget record") {
  const auto [out, report] = transform_circuit(corpus::rect_family());
  REQUIRE(report.gadgets.size() == 4);
  const Rat k(105 * 40);
  const Variant variants[] = {Variant::RightUp, Variant::RightDown,
                              Variant::LeftUp, Variant::LeftDown};
  const Point corners[] = {pt(0, 0), pt(0, 2), pt(2, 0), pt(2, 2)};
  for (std::size_t i = 0; i < 4; ++i) {
    CAPTURE(i);
    const GadgetRecord& g = report.gadgets[i];
    CHECK(g.variant == variants[i]);
    CHECK(g.anchor == Point{corners[i].x * k, corners[i].y * k});
    CHECK_FALSE(g.extended);
    REQUIRE(g.added.size() == kGadgetAdded);
    CHECK(g.added.front() == 4 + i * kGadgetAdded);
    // The carried indices name one horizontal and one vertical output host
    // that really end next to the anchor.
    const Segment& h = out.segments[g.carried_h];
    const Segment& v = out.segments[g.carried_v];
    CHECK(h.p.y == h.q.y);
    CHECK(v.p.x == v.q.x);
    const FrameSigns f = variant_signs(g.variant);
    const Point o_prime{g.anchor.x - Rat(105) * 4 * f.sx, g.anchor.y};
    const Point o_dprime{g.anchor.x, g.anchor.y + Rat(105) * f.sy};
    CHECK((h.p == o_prime || h.q == o_prime));
    CHECK((v.p == o_dprime || v.q == o_dprime));
  }
}

TEST_CASE("the extended gadget sits at the smallest anchor") {
  const auto [out, report] = transform_path(two_l_family());
  CHECK(out.segments.size() == 4 + kExtendedGadgetAdded + kGadgetAdded);
  REQUIRE(report.gadgets.size() == 2);
  CHECK(report.gadgets[0].anchor == pt(0, 0));
  CHECK(report.gadgets[0].extended);
  CHECK_FALSE(report.gadgets[1].extended);
  CHECK(report.gadgets[1].added.size() == kGadgetAdded);
  CHECK(validate(out) == std::nullopt);
}

TEST_CASE("a family without meetings keeps only its rescaled segments") {
  const auto [out, report] = transform_circuit(single_family());
  REQUIRE(out.segments.size() == 1);
  CHECK(out.segments[0] == seg(0, 0, 1000, 0));  // x40, then x25
  CHECK(report.params.delta == frac(1, 25));
  CHECK(report.gadgets.empty());
  CHECK(report.carry_map == std::vector<std::size_t>{0});

  CHECK_THROWS_AS(transform_path(single_family()), std::invalid_argument);
}

TEST_CASE("transform rejects malformed inputs") {
  CHECK_THROWS_AS(transform_circuit(SegmentFamily{}), std::invalid_argument);

  SegmentFamily fractional{{Segment{pt(0, 0), {frac(1, 2), Rat(0)}}},
                           FamilyClass::InteriorDisjoint};
  CHECK_THROWS_AS(transform_circuit(fractional), std::invalid_argument);

  SegmentFamily diagonal{{seg(0, 0, 3, 3)}, FamilyClass::InteriorDisjoint};
  CHECK_THROWS_AS(transform_circuit(diagonal), std::invalid_argument);

  SegmentFamily crossing{{seg(0, 1, 2, 1), seg(1, 0, 1, 2)},
                         FamilyClass::InteriorDisjoint};
  CHECK_THROWS_AS(transform_circuit(crossing), std::invalid_argument);
}

TEST_CASE("transform is deterministic") {
  const auto [out1, report1] = transform_path(corpus::rect_family());
  const auto [out2, report2] = transform_path(corpus::rect_family());
  CHECK(serialize_family(out1) == serialize_family(out2));
  CHECK(report1 == report2);
  CHECK(serialize_report(report1) == serialize_report(report2));
}

TEST_CASE("the transformed corner family still links into a circuit") {
  const auto [out, report] = transform_circuit(corpus::l_family());
  const auto direct = decide_circuit(corpus::l_family());
  const auto compiled = decide_circuit(out);
  REQUIRE(direct.has_value());
  REQUIRE(compiled.has_value());
  CHECK(verify_linking(*compiled, out) == std::nullopt);

  // Small enough for the brute-force reference to cross-check.
  const auto oracle = oracle_decide(out, LinkMode::Circuit, 7);
  REQUIRE(oracle.has_value());
  CHECK(*oracle == *compiled);
}

TEST_CASE("a displacement override changes the construction faithfully") {
  TransformOptions options;

  // Half the automatic displacement still yields a valid integer instance.
  options.delta_override = frac(1, 206);
  const auto [half, half_report] =
      transform_circuit(corpus::l_family(), options);
  CHECK(half_report.params.final_scale == 206);
  CHECK(half.segments[2] == seg(1648, 617, 1648, 1442));
  CHECK(on_integer_grid(half));
  CHECK(validate(half) == std::nullopt);

  // An oversized displacement (the admissible bound times 10(W+H)) drives the
  // blocker tip through the carried horizontal: the output no longer
  // validates, and no grid rescale applies.
  options.delta_override = Rat(16);
  const auto [bad, bad_report] = transform_circuit(corpus::l_family(), options);
  CHECK(bad_report.params.final_scale == 1);
  CHECK(bad.segments[2] == Segment{pt(8, -13), pt(8, 7)});
  CHECK(validate(bad) != std::nullopt);

  options.delta_override = Rat(0);
  CHECK_THROWS_AS(transform_circuit(corpus::l_family(), options),
                  std::invalid_argument);
}

TEST_CASE("report round-trips through its text form") {
  for (bool path : {false, true}) {
    CAPTURE(path);
    const auto [out, report] = path ? transform_path(corpus::rect_family())
                                    : transform_circuit(corpus::l_family());
    const std::string text = serialize_report(report);
    CHECK(parse_report(text) == report);
  }
}

TEST_CASE("report parser pinpoints malformed input") {
  auto line_of = [](const std::string& text) {
    try {
      parse_report(text);
    } catch (const ParseError& e) {
      return e.line;
    }
    return -1;
  };

  CHECK_THROWS_AS(parse_report(""), ParseError);
  CHECK(line_of("segs v1\n") == 1);
  CHECK(line_of("transform-report v1\nmode loop\n") == 2);

  const std::string good =
      "transform-report v1\n"
      "mode circuit\n"
      "input-segments 1\n"
      "initial-scale 40\n"
      "delta 1/25\n"
      "final-scale 25\n"
      "bound 0 0 1000 0\n"
      "carry 0 0\n";
  const TransformReport tiny = parse_report(good);
  CHECK(tiny.input_segments == 1);
  CHECK(tiny.gadgets.empty());
  CHECK(tiny.params.delta == frac(1, 25));

  // Comments and blank lines are fine.
  CHECK(parse_report("# note\n\n" + good) == tiny);

  CHECK_THROWS_AS(parse_report(good + "junk 1\n"), ParseError);
  // A carry line is missing: input-segments says two.
  std::string missing = good;
  missing.replace(missing.find("input-segments 1"), 16, "input-segments 2");
  CHECK_THROWS_AS(parse_report(missing), ParseError);
  // Wrong added count for a plain gadget.
  CHECK_THROWS_AS(
      parse_report(good +
                   "gadget 0 anchor 0 0 variant right-up extended 0 "
                   "carried 0 0 added 1 2 3 4\n"),
      ParseError);
  // Wrong added count for an extended gadget.
  CHECK_THROWS_AS(
      parse_report(good +
                   "gadget 0 anchor 0 0 variant right-up extended 1 "
                   "carried 0 0 added 1 2 3 4 5\n"),
      ParseError);
  CHECK_THROWS_AS(
      parse_report(good +
                   "gadget 0 anchor 0 0 variant diagonal extended 0 "
                   "carried 0 0 added 1 2 3 4 5\n"),
      ParseError);
}
