#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoloop/dsl/ast.hpp"
#include "geoloop/exec/diagram.hpp"
#include "geoloop/oracle/engine.hpp"

namespace geoloop::repi {

enum class TagKind {
  MissedGiven,
  WrongTheorem,
  StructureAssumed,
  ArithmeticSlip,
  Unparseable,
};

std::string tag_kind_name(TagKind k);

struct Tag {
  TagKind kind;
  std::string detail;               // given text / rule name / structure kind
  std::optional<int> given_index;   // MissedGiven only

  bool operator==(const Tag&) const = default;
};

struct Diagnosis {
  std::string problem_id;
  std::vector<Tag> tags;  // deterministic order: Unparseable, WrongTheorem,
                          // MissedGiven, ArithmeticSlip
  std::vector<std::optional<double>> attempt_values;  // evidence
  double reference_value = 0.0;

  bool has(TagKind k) const {
    for (const auto& t : tags)
      if (t.kind == k) return true;
    return false;
  }
};

class NotAFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Attempt {
  std::string raw_text;
  std::optional<double> value;  // extracted numeric answer, absent if none
};

// Deterministic failure analysis over extracted answers. Precondition: no
// attempt matched the reference (all-fail trigger); otherwise NotAFailure.
Diagnosis diagnose(const dsl::ConstructionProgram& p, const exec::Diagram& d,
                   const std::vector<Attempt>& attempts,
                   const oracle::OracleAnswer& reference);

}  // namespace geoloop::repi
