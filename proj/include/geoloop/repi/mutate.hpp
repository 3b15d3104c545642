#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geoloop/dsl/ast.hpp"
#include "geoloop/repi/diagnose.hpp"
#include "json.hpp"

namespace geoloop::repi {

enum class Operator {
  AddPointOnCircle,
  AddChord,
  AddMidpoint,
  AddPerpendicularFoot,
  PerturbGivenAngle,
  InscribePolygon,
  SwapAskedQuery,
};

std::string operator_name(Operator op);
std::optional<Operator> operator_from_name(const std::string& name);

// A statement-level edit, fully determined by its recorded parameters:
// apply_mutation(parent, m) rebuilds the child byte-for-byte.
struct Mutation {
  Operator op;
  std::vector<std::string> targets;       // identifiers in operator order
  std::map<std::string, double> params;   // numeric parameters
  std::uint64_t seed = 0;                 // invention seed (log metadata)
};

nlohmann::json to_json(const Mutation& m, const std::string& parent_id,
                       const std::string& child_id);

class NoApplicableOperator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic replay of a recorded mutation.
dsl::ConstructionProgram apply_mutation(const dsl::ConstructionProgram& p,
                                        const Mutation& m);

// Up to max_candidates mutated programs chosen by the tag -> operator table,
// seeded-deterministic, each guaranteed to parse. MissedGiven candidates are
// post-filtered so their oracle trace uses the missed given.
std::vector<std::pair<Mutation, dsl::ConstructionProgram>> invent(
    const dsl::ConstructionProgram& p, const Diagnosis& diag,
    std::uint64_t rng_seed, int max_candidates = 8);

struct RetryResult {
  std::optional<std::pair<Mutation, dsl::ConstructionProgram>> candidate;
  int tried = 0;  // candidates examined before success / exhaustion
};

// Runs invent candidates through geom-exec + oracle; first candidate that
// executes valid, is non-degenerate, and solves wins. Empty = Exhausted.
RetryResult retry_loop(const dsl::ConstructionProgram& p, const Diagnosis& diag,
                       std::uint64_t rng_seed, int budget = 8);

}  // namespace geoloop::repi
