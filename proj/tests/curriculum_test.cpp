#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "geoloop/curriculum/problem.hpp"
#include "geoloop/curriculum/store.hpp"
#include "geoloop/dsl/parse.hpp"
#include "geoloop/repi/mutate.hpp"

using namespace geoloop;
namespace cur = geoloop::curriculum;

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

cur::Problem seed_problem() {
  auto p = cur::make_seed(dsl::parse(kInscribedSrc));
  REQUIRE(p.status == cur::Status::Seed);
  return p;
}

// a qualified child of the inscribed seed via a replayable chord mutation
cur::Problem child_of(const cur::Problem& parent) {
  repi::Mutation m;
  m.op = repi::Operator::AddChord;
  m.targets = {"A", "D"};
  auto prog = repi::apply_mutation(parent.program, m);
  auto child = cur::qualify(std::move(prog), 1,
                            cur::Lineage{parent.problem_id, m});
  REQUIRE(child.status == cur::Status::Qualified);
  return child;
}

}  // namespace

TEST_CASE("a valid candidate qualifies with the oracle answer") {
  auto p = cur::qualify(dsl::parse(kInscribedSrc), 0, std::nullopt);
  CHECK(p.status == cur::Status::Qualified);
  REQUIRE(p.reference_value.has_value());
  CHECK(*p.reference_value == doctest::Approx(60.0));
  CHECK(p.reference_unit == dsl::Unit::Degrees);
  CHECK(!p.question_text.empty());
  CHECK(p.derivation_trace.contains("steps"));
  CHECK(p.problem_id == p.program.program_id);
}

TEST_CASE("gate order: violated givens reject first") {
  auto p = cur::qualify(dsl::parse(
      "point A = free(0, 0)\n"
      "point B = free(3, 0)\n"
      "given dist(A, B) = 4\n"
      "ask dist(A, B)\n"), 0, std::nullopt);
  CHECK(p.status == cur::Status::Rejected);
  CHECK(p.reject_reason == "GivenViolated");
}

TEST_CASE("near-coincident points reject as degenerate") {
  auto p = cur::qualify(dsl::parse(
      "point O = free(0, 0)\n"
      "circle K = circle(O, 2)\n"
      "point A = on_circle(K, 0)\n"
      "point B = on_circle(K, 0.01)\n"
      "ask dist(A, B)\n"), 0, std::nullopt);
  CHECK(p.status == cur::Status::Rejected);
  CHECK(p.reject_reason == "DegeneratePoints");
}

TEST_CASE("problems outside the rule family reject as unsolvable") {
  auto p = cur::qualify(dsl::parse(
      "point A = free(0, 0)\n"
      "point B = free(4, 0)\n"
      "point C = free(1, 2)\n"
      "ask angle(A, C, B)\n"), 0, std::nullopt);
  CHECK(p.status == cur::Status::Rejected);
  CHECK(p.reject_reason == "Unsolvable");
}

TEST_CASE("rejected problems are never sampleable") {
  cur::Curriculum c;
  c.append(seed_problem());
  auto bad = cur::qualify(dsl::parse(
      "point A = free(0, 0)\n"
      "point B = free(3, 0)\n"
      "given dist(A, B) = 4\n"
      "ask dist(A, B)\n"), 0, std::nullopt);
  c.append(bad);
  CHECK(c.problems.size() == 2);
  CHECK(c.sampleable().size() == 1);
}

TEST_CASE("update admits children of all-fail parents and grows by one") {
  cur::Curriculum c;
  auto parent = seed_problem();
  c.append(parent);
  auto child = child_of(parent);
  auto next = cur::update(c, {{parent.problem_id, {0, 0, 0, 0, 0, 0, 0, 0}}},
                          {child});
  CHECK(next.version == c.version + 1);
  CHECK(next.problems.size() == c.problems.size() + 1);
  // append-only chain: every old problem survives
  for (const auto& p : c.problems) CHECK(next.contains(p.problem_id));
  CHECK(next.fail_groups.at(parent.problem_id) == std::vector<int>{8});
}

TEST_CASE("a parent with any passing attempt violates the trigger") {
  cur::Curriculum c;
  auto parent = seed_problem();
  c.append(parent);
  auto child = child_of(parent);
  CHECK_THROWS_AS(
      cur::update(c, {{parent.problem_id, {0, 1, 0, 0, 0, 0, 0, 0}}}, {child}),
      cur::TriggerViolation);
}

TEST_CASE("empty invented list leaves the contents unchanged") {
  cur::Curriculum c;
  c.append(seed_problem());
  auto next = cur::update(c, {}, {});
  CHECK(next.problems.size() == c.problems.size());
  CHECK(next.version == c.version + 1);
}

TEST_CASE("sampling is seeded-deterministic and without replacement") {
  cur::Curriculum c;
  auto parent = seed_problem();
  c.append(parent);
  auto child = child_of(parent);
  child.status = cur::Status::Qualified;
  c.append(child);
  auto a = cur::sample(c, 2, 5);
  auto b = cur::sample(c, 2, 5);
  REQUIRE(a.size() == 2);
  CHECK(a[0].problem_id == b[0].problem_id);
  CHECK(a[1].problem_id == b[1].problem_id);
  CHECK(a[0].problem_id != a[1].problem_id);
  CHECK_THROWS_AS(cur::sample(c, 3, 5), cur::InsufficientProblems);
}

TEST_CASE("single draws are roughly uniform over ten problems") {
  cur::Curriculum c;
  auto parent = seed_problem();
  c.append(parent);
  // build 9 more qualified variants via distinct chords / added points
  repi::Mutation add;
  add.op = repi::Operator::AddPointOnCircle;
  for (int i = 0; i < 9; ++i) {
    add.targets = {"K", "Q"};
    add.params["theta"] = 30.0 + 5.0 * i;
    auto prog = repi::apply_mutation(parent.program, add);
    auto q = cur::qualify(std::move(prog), 1,
                          cur::Lineage{parent.problem_id, add});
    REQUIRE(q.status == cur::Status::Qualified);
    c.append(q);
  }
  REQUIRE(c.sampleable().size() == 10);
  std::map<std::string, int> counts;
  for (int s = 0; s < 1000; ++s) counts[cur::sample(c, 1, s)[0].problem_id]++;
  for (const auto& [id, n] : counts) {
    CHECK(n >= 60);
    CHECK(n <= 140);
  }
  CHECK(counts.size() == 10);
}

TEST_CASE("store round-trips problems, version, and audit trail") {
  namespace fs = std::filesystem;
  auto dir = (fs::temp_directory_path() / "curriculum_store_test").string();
  fs::remove_all(dir);

  cur::Curriculum c;
  auto parent = seed_problem();
  c.append(parent);
  auto next = cur::update(c, {{parent.problem_id, {0, 0, 0, 0}}},
                          {child_of(parent)});

  cur::Store store(dir);
  store.save(next);
  CHECK(!fs::exists(store.curriculum_path() + ".tmp"));

  auto loaded = cur::Store(dir).load();
  CHECK(loaded.version == next.version);
  REQUIRE(loaded.problems.size() == next.problems.size());
  for (size_t i = 0; i < loaded.problems.size(); ++i) {
    CHECK(loaded.problems[i].problem_id == next.problems[i].problem_id);
    CHECK(loaded.problems[i].program.source_text ==
          next.problems[i].program.source_text);
    CHECK(loaded.problems[i].status == next.problems[i].status);
  }
  CHECK(loaded.fail_groups == next.fail_groups);
  // lineage replay from the loaded store still reproduces the child
  const auto& child = loaded.problems.back();
  REQUIRE(child.lineage.has_value());
  auto replay = repi::apply_mutation(
      loaded.find(child.lineage->parent_id)->program, child.lineage->mutation);
  CHECK(replay.source_text == child.program.source_text);
  fs::remove_all(dir);
}

TEST_CASE("incremental saves trigger every ten problems") {
  namespace fs = std::filesystem;
  auto dir = (fs::temp_directory_path() / "curriculum_incr_test").string();
  fs::remove_all(dir);
  cur::Store store(dir);

  cur::Curriculum c;
  auto parent = seed_problem();
  c.append(parent);
  CHECK_FALSE(store.maybe_save(c));  // 1 unsaved problem, below threshold
  repi::Mutation add;
  add.op = repi::Operator::AddPointOnCircle;
  for (int i = 0; i < 9; ++i) {
    add.targets = {"K", "Q"};
    add.params["theta"] = 30.0 + 5.0 * i;
    c.append(cur::qualify(repi::apply_mutation(parent.program, add), 1,
                          cur::Lineage{parent.problem_id, add}));
  }
  CHECK(store.maybe_save(c));  // 10 unsaved problems
  CHECK_FALSE(store.maybe_save(c));  // nothing new since snapshot
  fs::remove_all(dir);
}
