#pragma once

#include <optional>
#include <string>

#include "geoloop/dsl/ast.hpp"
#include "geoloop/oracle/engine.hpp"
#include "geoloop/repi/mutate.hpp"
#include "json.hpp"

namespace geoloop::curriculum {

enum class Status { Seed, Invented, Qualified, Rejected };

std::string status_name(Status s);

struct Lineage {
  std::string parent_id;
  repi::Mutation mutation;
};

struct Problem {
  std::string problem_id;  // == program_id of the construction
  dsl::ConstructionProgram program;
  std::string question_text;
  std::optional<double> reference_value;  // set on qualification
  dsl::Unit reference_unit = dsl::Unit::Degrees;
  nlohmann::json derivation_trace;  // oracle trace, serialized
  std::string svg_path;
  int stage = 0;
  std::optional<Lineage> lineage;  // present iff not a seed
  Status status = Status::Seed;
  std::string reject_reason;

  bool sampleable() const {
    return status == Status::Seed || status == Status::Qualified;
  }
};

// Admission gate: execute-valid -> non-degeneracy -> oracle solve ->
// cross-check. The first failing stage stamps Rejected with its reason code
// (GivenViolated, DegeneratePoints, DegenerateAngle, IntersectionMiss,
// NonFiniteCoordinate, Unsolvable, Inconsistent, CrossCheckFailed); success
// stamps Qualified and fills the reference answer, question text, and trace.
Problem qualify(dsl::ConstructionProgram program, int stage,
                std::optional<Lineage> lineage);

// Seed admission: same gate, but success keeps Seed status.
Problem make_seed(dsl::ConstructionProgram program);

nlohmann::json to_json(const Problem& p);
Problem problem_from_json(const nlohmann::json& j);

}  // namespace geoloop::curriculum
