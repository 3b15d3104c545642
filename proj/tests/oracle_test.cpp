#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "geoloop/dsl/parse.hpp"
#include "geoloop/exec/evaluate.hpp"
#include "geoloop/gen/program_generator.hpp"
#include "geoloop/oracle/engine.hpp"

using namespace geoloop;

namespace {

oracle::SolveResult solve_text(const std::string& src,
                               const oracle::SolveOptions& opts = {}) {
  auto p = dsl::parse(src);
  auto ex = exec::execute(p);
  return oracle::solve(p, ex.diagram, opts);
}

bool trace_has_rule(const oracle::DerivationTrace& t, const std::string& rule) {
  for (const auto& s : t.steps)
    if (s.rule == rule) return true;
  return false;
}

const std::string kInscribedSrc =
    "point O = free(0, 0)\n"
    "circle K = circle(O, 2)\n"
    "point A = on_circle(K, 10)\n"
    "point D = on_circle(K, 130)\n"
    "point P = on_circle(K, 250)\n"
    "segment A P\n"
    "segment D P\n"
    "given angle(A, O, D) = 120\n"
    "ask angle(A, P, D)\n";

const std::string kPythagorasSrc =
    "point A = free(0, 0)\n"
    "point B = free(3, 0)\n"
    "point C = free(0, 4)\n"
    "segment A B\n"
    "segment A C\n"
    "segment B C\n"
    "given angle(B, A, C) = 90\n"
    "given dist(A, B) = 3\n"
    "given dist(A, C) = 4\n"
    "ask dist(B, C)\n";

}  // namespace

TEST_CASE("triangle angle sum from two given angles") {
  // third angle = 180 - 50 - 60 = 70.
  auto r = solve_text(
      "point A = free(0, 0)\n"
      "point B = free(4, 0)\n"
      "point C = free(1.5, 2)\n"
      "given angle(B, A, C) = 50\n"
      "given angle(A, B, C) = 60\n"
      "ask angle(A, C, B)\n");
  REQUIRE(r.status == oracle::SolveStatus::Solved);
  CHECK(r.answer->value == doctest::Approx(70.0).epsilon(1e-12));
  CHECK(r.answer->unit == dsl::Unit::Degrees);
  CHECK(trace_has_rule(r.answer->trace, "triangle-angle-sum"));
  CHECK(r.answer->trace.uses_given(0));
  CHECK(r.answer->trace.uses_given(1));
}

TEST_CASE("inscribed angle on the major arc is half the central angle") {
  // central angle AOD = 120 (thetas 10 and 130); P at 250 lies on
  // the major arc (same side of chord AD as the center), so APD = 60.
  auto r = solve_text(kInscribedSrc);
  REQUIRE(r.status == oracle::SolveStatus::Solved);
  CHECK(r.answer->value == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(trace_has_rule(r.answer->trace, "inscribed-angle"));
  CHECK(r.answer->trace.uses_given(0));
}

TEST_CASE("inscribed angle on the minor arc is the supplement of half") {
  // central AOD = 120, Q at 70 is on the minor arc: 180 - 60 = 120.
  auto r = solve_text(
      "point O = free(0, 0)\n"
      "circle K = circle(O, 2)\n"
      "point A = on_circle(K, 10)\n"
      "point D = on_circle(K, 130)\n"
      "point Q = on_circle(K, 70)\n"
      "given angle(A, O, D) = 120\n"
      "ask angle(A, Q, D)\n");
  REQUIRE(r.status == oracle::SolveStatus::Solved);
  CHECK(r.answer->value == doctest::Approx(120.0).epsilon(1e-12));
}

TEST_CASE("diameter subtends a right angle") {
  // thetas 0 and 180 make AD a diameter: any third point sees 90.
  auto r = solve_text(
      "point O = free(0, 0)\n"
      "circle K = circle(O, 1.5)\n"
      "point A = on_circle(K, 0)\n"
      "point D = on_circle(K, 180)\n"
      "point P = on_circle(K, 75)\n"
      "ask angle(A, P, D)\n");
  REQUIRE(r.status == oracle::SolveStatus::Solved);
  CHECK(r.answer->value == doctest::Approx(90.0).epsilon(1e-12));
}

TEST_CASE("pythagoras agrees with coordinate measurement") {
  auto p = dsl::parse(kPythagorasSrc);
  auto ex = exec::execute(p);
  REQUIRE(ex.report.valid());
  auto r = oracle::solve(p, ex.diagram);
  REQUIRE(r.status == oracle::SolveStatus::Solved);
  CHECK(r.answer->value == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(r.answer->unit == dsl::Unit::Length);
  CHECK(trace_has_rule(r.answer->trace, "pythagoras"));
  double measured = exec::measure(ex.diagram, p.ask()->query);
  CHECK(measured == doctest::Approx(r.answer->value).epsilon(1e-12));
  CHECK(oracle::cross_check(*r.answer, ex.diagram));
}

TEST_CASE("cross_check rejects a drifted value and flags unit mismatch") {
  auto p = dsl::parse(kPythagorasSrc);
  auto ex = exec::execute(p);
  auto r = oracle::solve(p, ex.diagram);
  REQUIRE(r.status == oracle::SolveStatus::Solved);
  oracle::OracleAnswer drifted = *r.answer;
  drifted.value += 1e-3;
  CHECK_FALSE(oracle::cross_check(drifted, ex.diagram));
  oracle::OracleAnswer wrong_unit = *r.answer;
  wrong_unit.unit = dsl::Unit::Degrees;
  CHECK_THROWS_AS(oracle::cross_check(wrong_unit, ex.diagram),
                  oracle::UnitMismatch);
}

TEST_CASE("midpoint halves a given length") {
  // dist(A, B) = 13 given; AM = 6.5.
  auto r = solve_text(
      "point A = free(0, 0)\n"
      "point B = free(5, 12)\n"
      "point M = midpoint(A, B)\n"
      "given dist(A, B) = 13\n"
      "ask dist(A, M)\n");
  REQUIRE(r.status == oracle::SolveStatus::Solved);
  CHECK(r.answer->value == doctest::Approx(6.5).epsilon(1e-12));
  CHECK(trace_has_rule(r.answer->trace, "midpoint-halving"));
}

TEST_CASE("isosceles triangle at a circle center splits the remainder") {
  // central angle 100; OA = OB (equal radii), so the base angles
  // are (180 - 100) / 2 = 40 each.
  auto r = solve_text(
      "point O = free(0, 0)\n"
      "circle K = circle(O, 2)\n"
      "point A = on_circle(K, 15)\n"
      "point B = on_circle(K, 115)\n"
      "segment O A\n"
      "segment O B\n"
      "segment A B\n"
      "given angle(A, O, B) = 100\n"
      "ask angle(O, A, B)\n");
  REQUIRE(r.status == oracle::SolveStatus::Solved);
  CHECK(r.answer->value == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(trace_has_rule(r.answer->trace, "isosceles-base-angles"));
  CHECK(trace_has_rule(r.answer->trace, "triangle-angle-sum"));
}

TEST_CASE("skipping a load-bearing given makes the query underivable") {
  auto full = solve_text(kPythagorasSrc);
  REQUIRE(full.status == oracle::SolveStatus::Solved);
  oracle::SolveOptions opts;
  opts.skip_givens = {1};  // drop dist(A, B) = 3
  auto relaxed = solve_text(kPythagorasSrc, opts);
  CHECK(relaxed.status == oracle::SolveStatus::Unsolvable);
}

TEST_CASE("assume probes candidate answers for consistency") {
  auto p = dsl::parse(kPythagorasSrc);
  auto ex = exec::execute(p);
  oracle::SolveOptions ok;
  ok.assume = {{p.ask()->query, 5.0}};
  CHECK(oracle::solve(p, ex.diagram, ok).status == oracle::SolveStatus::Solved);
  oracle::SolveOptions bad;
  bad.assume = {{p.ask()->query, 6.0}};
  CHECK(oracle::solve(p, ex.diagram, bad).status ==
        oracle::SolveStatus::Inconsistent);
}

TEST_CASE("a given that contradicts the construction is inconsistent") {
  // Thetas fix the central angle at 120; the given claims 130.
  auto r = solve_text(
      "point O = free(0, 0)\n"
      "circle K = circle(O, 2)\n"
      "point A = on_circle(K, 10)\n"
      "point D = on_circle(K, 130)\n"
      "point P = on_circle(K, 250)\n"
      "given angle(A, O, D) = 130\n"
      "ask angle(A, P, D)\n");
  CHECK(r.status == oracle::SolveStatus::Inconsistent);
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("trace is a topologically ordered DAG ending at the answer") {
  auto r = solve_text(kInscribedSrc);
  REQUIRE(r.status == oracle::SolveStatus::Solved);
  const auto& steps = r.answer->trace.steps;
  REQUIRE(!steps.empty());
  std::set<int> seen;
  for (const auto& s : steps) {
    for (int pid : s.premise_ids) {
      CHECK(pid < s.fact_id);
      CHECK(seen.count(pid));
    }
    seen.insert(s.fact_id);
  }
  // answer last, and its value is the reported one
  REQUIRE(steps.back().value.has_value());
  CHECK(*steps.back().value == doctest::Approx(r.answer->value));
  // every recorded given index is in range
  auto p = dsl::parse(kInscribedSrc);
  for (int gi : r.answer->trace.given_indices) {
    CHECK(gi >= 0);
    CHECK(gi < oracle::count_givens(p));
  }
  // serialization carries every step
  auto j = oracle::to_json(r.answer->trace);
  CHECK(j["steps"].size() == steps.size());
}

TEST_CASE("solver is sound over a generated corpus") {
  auto corpus = gen::random_corpus(60, 20260823);
  REQUIRE(corpus.size() == 60);
  for (const auto& prog : corpus) {
    CAPTURE(prog.source_text);
    auto ex = exec::execute(prog);
    REQUIRE(ex.report.valid());
    REQUIRE(exec::check_nondegeneracy(prog, ex.diagram).valid());
    auto r = oracle::solve(prog, ex.diagram);
    REQUIRE(r.status == oracle::SolveStatus::Solved);
    CHECK(oracle::cross_check(*r.answer, ex.diagram));
  }
}

TEST_CASE("solving is deterministic") {
  auto p = dsl::parse(kInscribedSrc);
  auto ex = exec::execute(p);
  auto r1 = oracle::solve(p, ex.diagram);
  auto r2 = oracle::solve(p, ex.diagram);
  REQUIRE(r1.status == oracle::SolveStatus::Solved);
  CHECK(r1.answer->value == r2.answer->value);
  CHECK(oracle::to_json(r1.answer->trace) == oracle::to_json(r2.answer->trace));
}
