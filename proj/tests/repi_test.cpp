#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "geoloop/dsl/parse.hpp"
#include "geoloop/exec/evaluate.hpp"
#include "geoloop/oracle/engine.hpp"
#include "geoloop/repi/diagnose.hpp"
#include "geoloop/repi/mutate.hpp"

using namespace geoloop;

namespace {

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

struct Fixture {
  dsl::ConstructionProgram p;
  exec::Diagram d;
  oracle::OracleAnswer ref;
};

Fixture load(const std::string& src) {
  Fixture f;
  f.p = dsl::parse(src);
  auto ex = exec::execute(f.p);
  f.d = ex.diagram;
  auto r = oracle::solve(f.p, f.d);
  REQUIRE(r.status == oracle::SolveStatus::Solved);
  f.ref = *r.answer;
  return f;
}

std::vector<repi::Attempt> attempts_of(std::vector<double> vals) {
  std::vector<repi::Attempt> out;
  for (double v : vals) out.push_back({"\\boxed{x}", v});
  return out;
}

}  // namespace

TEST_CASE("a correct attempt is not a failure") {
  auto f = load(kInscribedSrc);
  CHECK_THROWS_AS(repi::diagnose(f.p, f.d, attempts_of({60.0, 90.0}), f.ref),
                  repi::NotAFailure);
}

TEST_CASE("empty answers diagnose as Unparseable") {
  auto f = load(kInscribedSrc);
  std::vector<repi::Attempt> atts{{"", std::nullopt}, {"", std::nullopt}};
  auto diag = repi::diagnose(f.p, f.d, atts, f.ref);
  REQUIRE(diag.tags.size() == 1);
  CHECK(diag.tags[0].kind == repi::TagKind::Unparseable);
}

TEST_CASE("answering the central angle tags WrongTheorem(inscribed-angle)") {
  auto f = load(kInscribedSrc);
  auto diag = repi::diagnose(f.p, f.d, attempts_of({120.0, 120.0}), f.ref);
  REQUIRE(!diag.tags.empty());
  CHECK(diag.tags[0].kind == repi::TagKind::WrongTheorem);
  CHECK(diag.tags[0].detail == "inscribed-angle");
}

TEST_CASE("an answer admissible only without the right angle is MissedGiven") {
  // 6 is consistent once the 90-degree given is dropped but contradicts the
  // full fact base (which forces BC = 5)
  auto f = load(kPythagorasSrc);
  auto diag = repi::diagnose(f.p, f.d, attempts_of({6.0}), f.ref);
  REQUIRE(!diag.tags.empty());
  CHECK(diag.tags[0].kind == repi::TagKind::MissedGiven);
  REQUIRE(diag.tags[0].given_index.has_value());
  CHECK(*diag.tags[0].given_index == 0);
  CHECK(diag.tags[0].detail == "angle(B, A, C) = 90");
}

TEST_CASE("a value unexplained by trace or givens is an ArithmeticSlip") {
  auto f = load(kInscribedSrc);
  auto diag = repi::diagnose(f.p, f.d, attempts_of({61.7}), f.ref);
  REQUIRE(diag.tags.size() == 1);
  CHECK(diag.tags[0].kind == repi::TagKind::ArithmeticSlip);
}

TEST_CASE("tags appear in deterministic precedence order") {
  auto f = load(kInscribedSrc);
  std::vector<repi::Attempt> atts{{"", std::nullopt},
                                  {"x", 120.0},
                                  {"y", 61.7}};
  auto diag = repi::diagnose(f.p, f.d, atts, f.ref);
  REQUIRE(diag.tags.size() == 3);
  CHECK(diag.tags[0].kind == repi::TagKind::Unparseable);
  CHECK(diag.tags[1].kind == repi::TagKind::WrongTheorem);
  CHECK(diag.tags[2].kind == repi::TagKind::ArithmeticSlip);
}

TEST_CASE("invent is deterministic under seed and every candidate parses") {
  auto f = load(kInscribedSrc);
  auto diag = repi::diagnose(f.p, f.d, attempts_of({120.0}), f.ref);
  auto a = repi::invent(f.p, diag, 7);
  auto b = repi::invent(f.p, diag, 7);
  REQUIRE(!a.empty());
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first.op == b[i].first.op);
    CHECK(a[i].second.program_id == b[i].second.program_id);
    auto reparsed = dsl::parse(a[i].second.source_text);
    CHECK(reparsed == a[i].second);
  }
}

TEST_CASE("inscribed-angle diagnosis adds circle structure") {
  auto f = load(kInscribedSrc);
  auto diag = repi::diagnose(f.p, f.d, attempts_of({120.0}), f.ref);
  auto cands = repi::invent(f.p, diag, 3);
  REQUIRE(!cands.empty());
  bool saw_point = false, saw_chord = false;
  for (const auto& [m, child] : cands) {
    if (m.op == repi::Operator::AddPointOnCircle) saw_point = true;
    if (m.op == repi::Operator::AddChord) saw_chord = true;
    CHECK(child.statements.size() > f.p.statements.size());
  }
  CHECK(saw_point);
  CHECK(saw_chord);
}

TEST_CASE("lineage: replaying the mutation reproduces the child byte-for-byte") {
  auto f = load(kInscribedSrc);
  auto diag = repi::diagnose(f.p, f.d, attempts_of({120.0}), f.ref);
  for (const auto& [m, child] : repi::invent(f.p, diag, 11)) {
    auto replay = repi::apply_mutation(f.p, m);
    CHECK(replay.source_text == child.source_text);
    CHECK(replay.program_id == child.program_id);
  }
}

TEST_CASE("MissedGiven candidates all derive through the missed given") {
  auto f = load(kPythagorasSrc);
  auto diag = repi::diagnose(f.p, f.d, attempts_of({6.0}), f.ref);
  REQUIRE(diag.tags[0].kind == repi::TagKind::MissedGiven);
  auto cands = repi::invent(f.p, diag, 5);
  REQUIRE(!cands.empty());
  for (const auto& [m, child] : cands) {
    auto ex = exec::execute(child);
    REQUIRE(ex.report.valid());
    auto r = oracle::solve(child, ex.diagram);
    REQUIRE(r.status == oracle::SolveStatus::Solved);
    CHECK(r.answer->trace.uses_given(*diag.tags[0].given_index));
  }
}

TEST_CASE("a program without targets for any operator raises") {
  auto f = load(kPythagorasSrc);
  repi::Diagnosis diag;
  diag.problem_id = f.p.program_id;
  diag.tags = {{repi::TagKind::WrongTheorem, "inscribed-angle", {}}};
  CHECK_THROWS_AS(repi::invent(f.p, diag, 1), repi::NoApplicableOperator);
}

TEST_CASE("retry_loop returns the first fully validated candidate") {
  auto f = load(kInscribedSrc);
  auto diag = repi::diagnose(f.p, f.d, attempts_of({120.0}), f.ref);
  auto res = repi::retry_loop(f.p, diag, 13, 8);
  REQUIRE(res.candidate.has_value());
  CHECK(res.tried >= 1);
  CHECK(res.tried <= 8);
  const auto& child = res.candidate->second;
  auto ex = exec::execute(child);
  CHECK(ex.report.valid());
  CHECK(exec::check_nondegeneracy(child, ex.diagram).valid());
  CHECK(oracle::solve(child, ex.diagram).status ==
        oracle::SolveStatus::Solved);
}

TEST_CASE("mutation log entries round-trip operator and parameters") {
  auto f = load(kInscribedSrc);
  auto diag = repi::diagnose(f.p, f.d, attempts_of({120.0}), f.ref);
  auto cands = repi::invent(f.p, diag, 19);
  REQUIRE(!cands.empty());
  auto j = repi::to_json(cands[0].first, f.p.program_id,
                         cands[0].second.program_id);
  CHECK(j["parent_id"] == f.p.program_id);
  CHECK(j["child_id"] == cands[0].second.program_id);
  CHECK(j["operator"] == repi::operator_name(cands[0].first.op));
  CHECK(j["seed"] == 19);
}
