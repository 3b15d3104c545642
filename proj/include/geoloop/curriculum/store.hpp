#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoloop/curriculum/problem.hpp"

namespace geoloop::curriculum {

class TriggerViolation : public std::runtime_error {
 public:
  explicit TriggerViolation(const std::string& problem_id)
      : std::runtime_error("parent " + problem_id +
                           " had a passing attempt; all-fail trigger unmet"),
        problem_id(problem_id) {}
  std::string problem_id;
};

class InsufficientProblems : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One solver attempt group against a problem (k rewards in {0,1}).
struct AttemptGroup {
  std::string problem_id;
  std::vector<int> rewards;

  bool all_fail() const {
    for (int r : rewards)
      if (r != 0) return false;
    return !rewards.empty();
  }
};

// Append-only versioned problem set.
struct Curriculum {
  int version = 0;
  std::vector<Problem> problems;
  // parent problem_id -> recorded all-fail group sizes (audit trail)
  std::map<std::string, std::vector<int>> fail_groups;

  bool contains(const std::string& id) const;
  const Problem* find(const std::string& id) const;
  std::vector<const Problem*> sampleable() const;
  void append(Problem p);  // dedupe on problem_id (first wins)
};

// Version step: records failure groups, then admits invented problems whose
// parent is present and carries a recorded all-fail group (the invention trigger).
Curriculum update(const Curriculum& c, const std::vector<AttemptGroup>& failures,
                  const std::vector<Problem>& invented);

// Uniform sample without replacement over sampleable problems,
// seeded-deterministic (order-stable Fisher-Yates).
std::vector<Problem> sample(const Curriculum& c, int n, std::uint64_t seed);

// JSONL + meta.json persistence with snapshot-then-commit semantics.
class Store {
 public:
  explicit Store(std::string dir) : dir_(std::move(dir)) {}

  void save(const Curriculum& c);           // unconditional snapshot
  bool maybe_save(const Curriculum& c);     // snapshot every 10 new problems
  Curriculum load() const;

  std::string curriculum_path() const { return dir_ + "/curriculum.jsonl"; }
  std::string meta_path() const { return dir_ + "/curriculum.meta.json"; }

 private:
  std::string dir_;
  size_t last_saved_ = 0;
};

}  // namespace geoloop::curriculum
