#include "geoloop/repi/diagnose.hpp"

#include <algorithm>
#include <cmath>

#include "geoloop/dsl/print.hpp"

namespace geoloop::repi {

namespace {

bool close(double a, double b) {
  return std::fabs(a - b) <= std::max(1e-9, 1e-6 * std::max(std::fabs(a),
                                                            std::fabs(b)));
}

std::string given_text(const dsl::ConstructionProgram& p, int index) {
  int idx = -1;
  for (const auto& s : p.statements) {
    auto* g = std::get_if<dsl::Given>(&s);
    if (!g) continue;
    if (++idx != index) continue;
    if (auto* a = std::get_if<dsl::AngleAssert>(&g->assertion))
      return "angle(" + a->a + ", " + a->b + ", " + a->c + ") = " +
             dsl::format_number(a->value_deg);
    if (auto* ds = std::get_if<dsl::DistAssert>(&g->assertion))
      return "dist(" + ds->a + ", " + ds->b + ") = " +
             dsl::format_number(ds->value);
    auto& eq = std::get<dsl::EqDistAssert>(g->assertion);
    return "eq(dist(" + eq.a1 + ", " + eq.b1 + "), dist(" + eq.a2 + ", " +
           eq.b2 + "))";
  }
  return "given #" + std::to_string(index);
}

// Rule that separates the wrong value from the right one: the rule of the
// first trace step consuming the matching fact, falling back to the fact's
// own rule.
std::optional<std::string> wrong_theorem_rule(
    const oracle::DerivationTrace& trace, double wrong) {
  for (size_t i = 0; i + 1 < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    if (!s.value || !close(*s.value, wrong)) continue;
    for (size_t j = i + 1; j < trace.steps.size(); ++j) {
      const auto& later = trace.steps[j];
      if (std::find(later.premise_ids.begin(), later.premise_ids.end(),
                    s.fact_id) != later.premise_ids.end())
        return later.rule;
    }
    return s.rule;
  }
  return std::nullopt;
}

std::optional<int> missed_given(const dsl::ConstructionProgram& p,
                                const exec::Diagram& d,
                                const oracle::OracleAnswer& ref, double wrong) {
  for (int g : ref.trace.given_indices) {
    oracle::SolveOptions relaxed;
    relaxed.skip_givens = {g};
    auto r = oracle::solve(p, d, relaxed);
    if (r.status == oracle::SolveStatus::Solved &&
        close(r.answer->value, wrong))
      return g;
    // Removing a given from a consistent base can leave the query derivable
    // with the same value; probe instead whether the wrong answer is
    // admissible without the given yet contradicts the full base.
    oracle::SolveOptions probe_relaxed = relaxed;
    probe_relaxed.assume = {{p.ask()->query, wrong}};
    oracle::SolveOptions probe_full;
    probe_full.assume = {{p.ask()->query, wrong}};
    if (oracle::solve(p, d, probe_relaxed).status !=
            oracle::SolveStatus::Inconsistent &&
        oracle::solve(p, d, probe_full).status ==
            oracle::SolveStatus::Inconsistent)
      return g;
  }
  return std::nullopt;
}

}  // namespace

std::string tag_kind_name(TagKind k) {
  switch (k) {
    case TagKind::MissedGiven: return "MissedGiven";
    case TagKind::WrongTheorem: return "WrongTheorem";
    case TagKind::StructureAssumed: return "StructureAssumed";
    case TagKind::ArithmeticSlip: return "ArithmeticSlip";
    case TagKind::Unparseable: return "Unparseable";
  }
  return "?";
}

Diagnosis diagnose(const dsl::ConstructionProgram& p, const exec::Diagram& d,
                   const std::vector<Attempt>& attempts,
                   const oracle::OracleAnswer& reference) {
  for (const auto& a : attempts)
    if (a.value && close(*a.value, reference.value))
      throw NotAFailure("attempt matched the reference answer");

  Diagnosis diag;
  diag.problem_id = p.program_id;
  diag.reference_value = reference.value;

  bool any_unparseable = false;
  std::vector<double> wrong_values;  // first-occurrence order, deduped
  for (const auto& a : attempts) {
    diag.attempt_values.push_back(a.value);
    if (!a.value) {
      any_unparseable = true;
      continue;
    }
    bool seen = false;
    for (double w : wrong_values)
      if (close(w, *a.value)) seen = true;
    if (!seen) wrong_values.push_back(*a.value);
  }

  std::vector<Tag> theorem, missed, slip;
  for (double w : wrong_values) {
    if (auto rule = wrong_theorem_rule(reference.trace, w)) {
      Tag t{TagKind::WrongTheorem, *rule, std::nullopt};
      if (std::find(theorem.begin(), theorem.end(), t) == theorem.end())
        theorem.push_back(t);
      continue;
    }
    if (auto g = missed_given(p, d, reference, w)) {
      Tag t{TagKind::MissedGiven, given_text(p, *g), *g};
      if (std::find(missed.begin(), missed.end(), t) == missed.end())
        missed.push_back(t);
      continue;
    }
    if (slip.empty()) slip.push_back({TagKind::ArithmeticSlip, "", {}});
  }

  if (any_unparseable) diag.tags.push_back({TagKind::Unparseable, "", {}});
  for (auto& t : theorem) diag.tags.push_back(std::move(t));
  for (auto& t : missed) diag.tags.push_back(std::move(t));
  for (auto& t : slip) diag.tags.push_back(std::move(t));
  return diag;
}

}  // namespace geoloop::repi
