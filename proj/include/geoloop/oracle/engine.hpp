#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoloop/exec/diagram.hpp"
#include "json.hpp"

namespace geoloop::oracle {

// One applied rule (or axiom) in a derivation. Facts form a DAG rooted at
// "given" and "structural" nodes; premise_ids always point at earlier steps.
struct TraceStep {
  int fact_id = 0;
  std::string rule;  // "given", "structural", or a derivation rule name
  std::vector<int> premise_ids;
  std::string conclusion;            // e.g. "angle(A, O, D) = 120"
  std::optional<double> value;       // numeric facts only
  std::optional<int> given_index;    // for rule == "given"
};

struct DerivationTrace {
  std::vector<TraceStep> steps;      // topological order, answer last
  std::set<int> given_indices;       // givens the answer depends on

  bool uses_given(int idx) const { return given_indices.count(idx) > 0; }
};

struct OracleAnswer {
  double value = 0.0;
  dsl::Unit unit = dsl::Unit::Degrees;
  DerivationTrace trace;
};

enum class SolveStatus { Solved, Unsolvable, Inconsistent };

struct SolveResult {
  SolveStatus status = SolveStatus::Unsolvable;
  std::optional<OracleAnswer> answer;  // present iff Solved
  std::string diagnostic;              // cap overflow / conflicting facts
};

struct SolveOptions {
  // Given statements (0-based index among the program's givens) to ignore.
  std::set<int> skip_givens;
  // Extra value fact asserted before chaining; used to probe whether a
  // candidate answer is consistent with a relaxed fact base.
  std::optional<std::pair<dsl::Query, double>> assume;
};

// Forward-chains the fixed rule set to fixpoint (fact cap 10000) and reads
// off the asked quantity. Structural incidence comes from the program;
// coordinates are consulted only for orientation predicates (arc side,
// betweenness), never for numeric facts.
SolveResult solve(const dsl::ConstructionProgram& p, const exec::Diagram& d,
                  const SolveOptions& opts = {});

class UnitMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Qualify cross-check: symbolic vs coordinate measurement.
// |delta| <= 1e-6 deg for angles, relative 1e-9 for lengths.
bool cross_check(const OracleAnswer& answer, const exec::Diagram& d);

nlohmann::json to_json(const DerivationTrace& t);

// Number of `given` statements in the program (indexing domain for
// SolveOptions::skip_givens and TraceStep::given_index).
int count_givens(const dsl::ConstructionProgram& p);

}  // namespace geoloop::oracle
