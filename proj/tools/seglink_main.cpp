#include "CLI11.hpp"

#include "seglink/gadget.h"
#include "seglink/instance.h"
#include "seglink/lemmas.h"
#include "seglink/linker.h"
#include "seglink/svg.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using namespace seglink;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::string point_str(const Point& p) {
  return "(" + rat_to_string(p.x) + ", " + rat_to_string(p.y) + ")";
}

int run_validate(const std::string& path) {
  const SegmentFamily family = parse_family(read_file(path));
  if (const auto violation = validate(family)) {
    std::cout << "invalid: " << violation->message;
    if (violation->witness) std::cout << " at " << point_str(*violation->witness);
    std::cout << "\n";
    return 2;
  }
  std::cout << family_class_name(family.declared_class) << "\n";
  return 0;
}

int run_solve(const std::string& mode, const std::string& path, bool oracle,
              const std::string& witness_out) {
  const SegmentFamily family = parse_family(read_file(path));
  if (const auto violation = validate(family))
    throw std::invalid_argument(violation->message);
  const LinkMode link_mode =
      mode == "circuit" ? LinkMode::Circuit : LinkMode::Path;
  const std::optional<Linking> witness =
      oracle ? oracle_decide(family, link_mode)
      : link_mode == LinkMode::Circuit ? decide_circuit(family)
                                       : decide_path(family);
  if (!witness) {
    std::cout << "NO\n";
    return 3;
  }
  std::cout << "YES\n";
  if (!witness_out.empty()) write_file(witness_out, serialize_linking(*witness));
  return 0;
}

int run_transform(const std::string& mode, const std::string& in,
                  const std::string& out, const std::string& report_path) {
  const SegmentFamily input = parse_family(read_file(in));
  const auto [family, report] =
      mode == "circuit" ? transform_circuit(input) : transform_path(input);
  write_file(out, serialize_family(family));
  write_file(report_path.empty() ? out + ".report" : report_path,
             serialize_report(report));
  std::cout << "delta " << rat_to_string(report.params.delta) << "\n"
            << "input-segments " << report.input_segments << "\n"
            << "output-segments " << family.segments.size() << "\n";
  return 0;
}

int run_verify(const std::string& path, const std::string& report_path,
               const std::string& witness_path) {
  const SegmentFamily family = parse_family(read_file(path));
  const TransformReport report = parse_report(read_file(report_path));
  std::vector<LemmaCheck> checks = verify_invisibility(family, report);
  const auto append = [&checks](std::vector<LemmaCheck> more) {
    checks.insert(checks.end(), std::make_move_iterator(more.begin()),
                  std::make_move_iterator(more.end()));
  };
  append(verify_angle_bound(family, report));
  append(verify_slope_ranges(family, report));
  if (!witness_path.empty())
    append(verify_forced_sequence(family, report,
                                  parse_linking(read_file(witness_path))));
  bool all_pass = true;
  for (const LemmaCheck& check : checks) {
    std::cout << "gadget " << check.gadget << " " << check.name << ": "
              << (check.pass ? "pass" : "FAIL");
    if (!check.detail.empty()) std::cout << " (" << check.detail << ")";
    std::cout << "\n";
    all_pass = all_pass && check.pass;
  }
  return all_pass ? 0 : 2;
}

int run_render(const std::string& path, const std::string& witness_path,
               const std::string& report_path, long long zoom) {
  const SegmentFamily family = parse_family(read_file(path));
  std::optional<Linking> witness;
  std::optional<TransformReport> report;
  RenderOptions options;
  if (!witness_path.empty()) {
    witness = parse_linking(read_file(witness_path));
    options.witness = &*witness;
  }
  if (zoom != 1 && report_path.empty())
    throw std::invalid_argument("--zoom-delta requires --report");
  if (!report_path.empty()) {
    report = parse_report(read_file(report_path));
    options.report = &*report;
  }
  options.zoom = Rat(zoom);
  std::cout << render_svg(family, options);
  return 0;
}

SegmentFamily gen_random_disjoint(long long n, long long seed) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  const auto coord = [&rng] { return Rat(static_cast<long long>(rng() % 13)); };
  SegmentFamily family;
  family.declared_class = FamilyClass::Disjoint;
  int attempts = 0;
  while (family.segments.size() < static_cast<std::size_t>(n)) {
    if (++attempts > 20000)
      throw std::invalid_argument("rejection sampling failed to place " +
                                  std::to_string(n) + " disjoint segments");
    const Segment candidate{Point{coord(), coord()}, Point{coord(), coord()}};
    if (candidate.p == candidate.q) continue;
    const bool clashes = std::any_of(
        family.segments.begin(), family.segments.end(), [&](const Segment& s) {
          return segments_intersect(candidate, s, IntersectMode::ClosedClosed);
        });
    if (!clashes) family.segments.push_back(candidate);
  }
  return family;
}

int run_gen(const std::string& kind, std::optional<long long> n,
            std::optional<long long> seed) {
  SegmentFamily family;
  if (kind == "l") {
    family = SegmentFamily{{Segment{Point{Rat(0), Rat(0)}, Point{Rat(2), Rat(0)}},
                            Segment{Point{Rat(0), Rat(0)}, Point{Rat(0), Rat(2)}}},
                           FamilyClass::InteriorDisjoint};
  } else if (kind == "rect") {
    family = SegmentFamily{{Segment{Point{Rat(0), Rat(0)}, Point{Rat(2), Rat(0)}},
                            Segment{Point{Rat(2), Rat(0)}, Point{Rat(2), Rat(2)}},
                            Segment{Point{Rat(2), Rat(2)}, Point{Rat(0), Rat(2)}},
                            Segment{Point{Rat(0), Rat(2)}, Point{Rat(0), Rat(0)}}},
                           FamilyClass::InteriorDisjoint};
  } else {
    if (!n || !seed)
      throw std::runtime_error("random-disjoint needs a count and a seed");
    if (*n < 0) throw std::runtime_error("the segment count cannot be negative");
    family = gen_random_disjoint(*n, *seed);
  }
  std::cout << serialize_family(family);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact toolkit for linking segment families into simple "
               "circuits and chains"};
  app.require_subcommand(1);

  std::string val_file;
  CLI::App* cmd_validate =
      app.add_subcommand("validate", "check a .segs file against its class");
  cmd_validate->add_option("file", val_file, ".segs instance")->required();

  std::string solve_mode, solve_file, solve_witness;
  bool solve_oracle = false;
  CLI::App* cmd_solve = app.add_subcommand(
      "solve", "decide whether the family links into a circuit or chain");
  cmd_solve->add_option("mode", solve_mode, "circuit or path")
      ->required()
      ->check(CLI::IsMember({"circuit", "path"}));
  cmd_solve->add_option("file", solve_file, ".segs instance")->required();
  cmd_solve->add_flag("--oracle", solve_oracle,
                      "use the exhaustive reference decider (small inputs)");
  cmd_solve->add_option("--witness", solve_witness,
                        "write the canonical witness here on YES");

  std::string tf_mode, tf_in, tf_out, tf_report;
  CLI::App* cmd_transform = app.add_subcommand(
      "transform", "compile meetings into disjoint blocker gadgets");
  cmd_transform->add_option("mode", tf_mode, "circuit or path")
      ->required()
      ->check(CLI::IsMember({"circuit", "path"}));
  cmd_transform->add_option("in", tf_in, "input .segs")->required();
  cmd_transform->add_option("out", tf_out, "output .segs")->required();
  cmd_transform->add_option("--report", tf_report,
                            "report path (default: <out>.report)");

  std::string vf_file, vf_report, vf_witness;
  CLI::App* cmd_verify = app.add_subcommand(
      "verify", "audit a transformed instance against its report");
  cmd_verify->add_option("file", vf_file, "transformed .segs")->required();
  cmd_verify->add_option("--report", vf_report, "transform report")->required();
  cmd_verify->add_option("--witness", vf_witness,
                         "also audit this linking's traversal order");

  std::string rd_file, rd_witness, rd_report;
  long long rd_zoom = 1;
  CLI::App* cmd_render =
      app.add_subcommand("render", "emit an SVG drawing to stdout");
  cmd_render->add_option("file", rd_file, ".segs instance")->required();
  cmd_render->add_option("--witness", rd_witness, "overlay these added edges");
  cmd_render->add_option("--report", rd_report,
                         "transform report (needed for --zoom-delta)");
  cmd_render->add_option("--zoom-delta", rd_zoom,
                         "display-only tip displacement multiplier")
      ->check(CLI::PositiveNumber);

  std::string gen_kind;
  std::optional<long long> gen_n, gen_seed;
  CLI::App* cmd_gen =
      app.add_subcommand("gen", "emit a sample .segs family to stdout");
  cmd_gen->add_option("kind", gen_kind, "l, rect, or random-disjoint")
      ->required()
      ->check(CLI::IsMember({"l", "rect", "random-disjoint"}));
  cmd_gen->add_option("n", gen_n, "segment count (random-disjoint)");
  cmd_gen->add_option("seed", gen_seed, "RNG seed (random-disjoint)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  // Domain rejections (invalid family, unmet preconditions, sampling failure)
  // exit 2 for the commands whose job is the domain decision; for the rest an
  // invalid_argument is a usage problem and exits 1 like other input errors.
  const int domain_code =
      (cmd_solve->parsed() || cmd_transform->parsed() || cmd_gen->parsed()) ? 2
                                                                            : 1;
  try {
    if (cmd_validate->parsed()) return run_validate(val_file);
    if (cmd_solve->parsed())
      return run_solve(solve_mode, solve_file, solve_oracle, solve_witness);
    if (cmd_transform->parsed())
      return run_transform(tf_mode, tf_in, tf_out, tf_report);
    if (cmd_verify->parsed()) return run_verify(vf_file, vf_report, vf_witness);
    if (cmd_render->parsed())
      return run_render(rd_file, rd_witness, rd_report, rd_zoom);
    if (cmd_gen->parsed()) return run_gen(gen_kind, gen_n, gen_seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return domain_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
